#pragma once

#include <filesystem>
#include <string>

#include "tweetlab/rng.hpp"
#include "tweetlab/synth.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return TWEETLAB_TEST_DATA; }
inline std::filesystem::path repo_data_dir() { return TWEETLAB_REPO_DATA; }

// 5000 users, same shape as the defaults.
inline tweetlab::synth::SynthSpec five_k_spec(std::uint64_t seed = 7) {
  using tweetlab::synth::Archetype;
  auto spec = tweetlab::synth::SynthSpec::defaults();
  spec.seed = seed;
  spec[Archetype::traditional_spammer].count = 500;
  spec[Archetype::social_spam_bot].count = 700;
  spec[Archetype::influential].count = 250;
  spec[Archetype::hidden_influential].count = 150;
  spec[Archetype::common_human].count = 3400;
  return spec;
}

// Flat-layout lines with an embedded profile; cheap to generate in bulk.
inline std::string bulk_archive(std::size_t records, std::size_t users, std::uint64_t seed) {
  static const char* words[] = {"vote", "debate", "poll", "rally", "free", "win", "good", "bad",
                                "news", "live", "speech", "tonight", "state", "media"};
  tweetlab::Rng rng(seed);
  std::string out;
  out.reserve(records * 260);
  const long long t0 = 1473984000;
  for (std::size_t i = 0; i < records; ++i) {
    const auto u = rng.below(users);
    const auto t = t0 + static_cast<long long>(i) * 2;
    std::string text;
    for (int w = 0; w < 6; ++w) {
      if (w) text += ' ';
      text += words[rng.below(14)];
    }
    const auto kind = rng.below(10);
    out += "{\"id\":\"b" + std::to_string(i) + "\",\"author\":\"u" + std::to_string(u) +
           "\",\"created_at\":" + std::to_string(t) + ",\"text\":\"" + text + " #h" +
           std::to_string(rng.below(50)) + "\"";
    if (kind < 3)
      out += ",\"kind\":\"retweet\",\"target\":\"u" + std::to_string(rng.below(users)) + "\"";
    else if (kind < 4)
      out += ",\"kind\":\"reply\",\"target\":\"u" + std::to_string(rng.below(users)) + "\"";
    else
      out += ",\"kind\":\"original\"";
    out += ",\"retweet_count\":" + std::to_string(rng.below(20)) +
           ",\"geo\":false,\"user\":{\"followers\":" + std::to_string(100 + u + i / users) +
           ",\"friends\":" + std::to_string(50 + u % 97) + ",\"statuses\":" + std::to_string(1000 + i / users) +
           ",\"created_at\":1400000000,\"default_profile\":false,\"screen_name\":\"n" + std::to_string(u) +
           "\"}}\n";
  }
  return out;
}

}  // namespace fixtures
