#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tweetlab/common.hpp"
#include "tweetlab/dacmap.hpp"
#include "tweetlab/kvconfig.hpp"

namespace tweetlab::synth {

enum class Archetype { traditional_spammer, social_spam_bot, influential, hidden_influential, common_human };

inline constexpr std::size_t kArchetypeCount = 5;

std::string_view to_string(Archetype a);

/// Quadrant the archetype is planted in. Common users sit bottom-left.
dac::Quadrant planted_quadrant(Archetype a);

/// Planted DAC coordinates are drawn log-uniformly from these ranges.
struct ArchetypeSpec {
  std::size_t count = 0;
  double bot_fraction = 0;
  std::size_t tweets_min = 2;
  std::size_t tweets_max = 10;
  double log10_x_min = 0;
  double log10_x_max = 0;
  double log10_y_min = 0;
  double log10_y_max = 0;
};

struct SynthSpec {
  std::array<ArchetypeSpec, kArchetypeCount> archetypes{};
  std::uint64_t seed = 1;
  Timestamp start = 0;
  double duration_days = 30;

  double bot_spam_probability = 0.5;      // per tweet
  double human_spam_probability = 0.01;
  double bot_retweet_probability = 0.5;
  double human_retweet_probability = 0.2;
  double bot_reply_probability = 0.03;
  double human_reply_probability = 0.15;
  double bot_default_profile_probability = 0.7;
  double human_default_profile_probability = 0.1;
  double human_geo_probability = 0.3;  // per tweet; bots never geotag
  double faction_probability = 0.6;    // user supports a candidate
  double homophily = 0.8;              // interaction target drawn from own group
  std::size_t malformed_lines = 0;     // junk lines spread through the archive

  ArchetypeSpec& operator[](Archetype a) { return archetypes[static_cast<std::size_t>(a)]; }
  const ArchetypeSpec& operator[](Archetype a) const { return archetypes[static_cast<std::size_t>(a)]; }

  std::size_t users() const;

  /// Throws ConfigError on probabilities outside [0, 1], empty tweet ranges,
  /// or planted ranges that leave the archetype's quadrant.
  void validate() const;

  static SynthSpec defaults();
  /// Keys: seed, start, duration_days, the probabilities above, and
  /// <archetype>.{count, bot_fraction, tweets_min, tweets_max, log10_x_min,
  /// log10_x_max, log10_y_min, log10_y_max}. Unset keys keep the defaults.
  static SynthSpec from_config(const KeyValueConfig& cfg);
  static SynthSpec load(const std::filesystem::path& path);
};

struct PlantedUser {
  std::string author_id;
  Archetype archetype = Archetype::common_human;
  bool is_bot = false;
  std::string faction;  // clinton, trump or none
  double x = 1;         // realized from the integer counters (platform retweet counter)
  double y = 1;
};

struct SynthOutput {
  std::string archive;  // JSONL, flat layout
  std::vector<PlantedUser> users;
  std::size_t tweets = 0;

  std::string ground_truth_csv() const;
  std::string labels_csv() const;
};

SynthOutput generate_fixture(const SynthSpec& spec);

/// Writes archive.jsonl (or archive.jsonl.gz when `gzip`), ground_truth.csv
/// and labels.csv into `dir`.
void write_fixture(const SynthOutput& out, const std::filesystem::path& dir, bool gzip = false);

/// Writes text, gzip-compressed when the path ends in ".gz".
void write_maybe_gz(const std::filesystem::path& path, std::string_view text);

}  // namespace tweetlab::synth
