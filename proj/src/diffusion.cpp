#include "tweetlab/diffusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace tweetlab::diffusion {

CcdfSeries ccdf(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("ccdf of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  CcdfSeries out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    out.values.push_back(v[i]);
    out.p.push_back(static_cast<double>(v.size() - i) / n);
  }
  return out;
}

std::string_view to_string(Group g) { return g == Group::bot ? "bot" : "human"; }

std::string_view to_string(InteractionKind k) {
  return k == InteractionKind::reply ? "reply" : "retweet";
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::within: return "within";
    case Scope::across: return "across";
    case Scope::total: return "total";
  }
  return "total";
}

std::uint64_t UserInteractions::get(InteractionKind k, Scope s) const {
  const auto& c = counts[static_cast<std::size_t>(k)];
  switch (s) {
    case Scope::within: return c[0];
    case Scope::across: return c[1];
    case Scope::total: return c[0] + c[1];
  }
  return 0;
}

std::uint64_t GroupInteractionMatrix::get(InteractionKind k, Group source, Group target) const {
  return counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(source)]
               [static_cast<std::size_t>(target)];
}

GroupInteractionMatrix interaction_matrix(std::span<const ingest::TweetRecord> records,
                                          const GroupLabels& labels) {
  GroupInteractionMatrix m;
  for (const auto& [id, g] : labels) m.per_user[id];
  for (const auto& r : records) {
    if (r.kind == ingest::TweetKind::original || !r.target_author_id) continue;
    const auto src = labels.find(r.author_id);
    const auto dst = labels.find(*r.target_author_id);
    if (src == labels.end() || dst == labels.end()) {
      ++m.excluded;
      continue;
    }
    const auto k = r.kind == ingest::TweetKind::reply ? InteractionKind::reply : InteractionKind::retweet;
    const auto ki = static_cast<std::size_t>(k);
    ++m.counts[ki][static_cast<std::size_t>(src->second)][static_cast<std::size_t>(dst->second)];
    ++m.per_user[r.author_id].counts[ki][src->second == dst->second ? 0 : 1];
  }
  return m;
}

std::vector<InteractionCcdf> interaction_ccdfs(const GroupInteractionMatrix& matrix,
                                               const GroupLabels& labels) {
  std::vector<InteractionCcdf> out;
  for (const auto g : {Group::bot, Group::human}) {
    for (const auto k : {InteractionKind::reply, InteractionKind::retweet}) {
      for (const auto s : {Scope::within, Scope::across, Scope::total}) {
        InteractionCcdf c;
        c.group = g;
        c.kind = k;
        c.scope = s;
        std::vector<double> sample;
        for (const auto& [id, label] : labels) {
          if (label != g) continue;
          ++c.users;
          const auto it = matrix.per_user.find(id);
          const std::uint64_t n = it == matrix.per_user.end() ? 0 : it->second.get(k, s);
          if (n == 0) {
            ++c.zero_users;
          } else {
            sample.push_back(static_cast<double>(n));
          }
        }
        if (!sample.empty()) c.series = ccdf(sample);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Faction f) {
  switch (f) {
    case Faction::clinton: return "clinton";
    case Faction::trump: return "trump";
    case Faction::none: return "none";
  }
  return "none";
}

void FactionTags::validate() const {
  for (const auto& t : clinton)
    if (trump.count(t)) throw ConfigError("hashtag '" + t + "' is listed for both factions");
}

FactionTags FactionTags::defaults() {
  FactionTags t;
  t.trump = {"donaldtrump", "trump2016", "neverhillary", "trumppence16", "trump"};
  t.clinton = {"hillaryclinton", "imwithher", "nevertrump", "hillary"};
  return t;
}

std::vector<std::pair<std::string, std::uint64_t>> top_hashtags(
    const std::map<std::string, std::uint64_t>& counts, std::size_t k) {
  std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(), counts.end());
  const auto take = std::min(k, v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(take), v.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  v.resize(take);
  return v;
}

FactionAssignment assign_faction(const ingest::UserAggregate& agg, const FactionTags& tags) {
  FactionAssignment a;
  for (const auto& [tag, n] : top_hashtags(agg.hashtag_counts, 10)) {
    if (tags.clinton.count(tag)) ++a.clinton_tags;
    if (tags.trump.count(tag)) ++a.trump_tags;
  }
  if (a.clinton_tags > a.trump_tags) a.faction = Faction::clinton;
  if (a.trump_tags > a.clinton_tags) a.faction = Faction::trump;
  return a;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Candidate c) { return c == Candidate::clinton ? "clinton" : "trump"; }

CandidateTerms CandidateTerms::defaults() {
  CandidateTerms t;
  t.clinton = {"clinton", "hillary", "hillaryclinton", "imwithher", "nevertrump"};
  t.trump = {"trump", "donaldtrump", "trump2016", "neverhillary", "trumppence16"};
  return t;
}

unsigned mentions(const ingest::TweetRecord& record, const CandidateTerms& terms) {
  unsigned bits = 0;
  auto check = [&](const std::string& w) {
    if (terms.clinton.count(w)) bits |= 1u;
    if (terms.trump.count(w)) bits |= 2u;
  };
  for (const auto& tag : record.hashtags) check(tag);
  const auto& text = record.text;
  std::size_t i = 0;
  while (i < text.size() && bits != 3u) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) check(to_lower_ascii(std::string_view(text).substr(i, j - i)));
    i = j;
  }
  return bits;
}

SentimentVolumes sentiment_volume_by_group(std::span<const ingest::TweetRecord> records,
                                           std::span<const sentiment::SentimentScore> scores,
                                           const GroupLabels& labels,
                                           const std::map<std::string, Faction>& factions,
                                           const CandidateTerms& terms) {
  if (scores.size() != records.size()) throw DataError("sentiment scores do not match records");
  SentimentVolumes out;
  for (const auto f : {Faction::clinton, Faction::trump})
    for (const auto g : {Group::bot, Group::human}) {
      for (const auto c : {Candidate::clinton, Candidate::trump}) out.volume[{f, g, c}] = {};
      out.difference[{f, g}] = {};
    }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto lab = labels.find(r.author_id);
    const auto fac = factions.find(r.author_id);
    if (lab == labels.end() || fac == factions.end() || fac->second == Faction::none) continue;
    const unsigned m = mentions(r, terms);
    const auto bucket = static_cast<std::size_t>(scores[i].s + 4);
    if (m & 1u) ++out.volume[{fac->second, lab->second, Candidate::clinton}][bucket];
    if (m & 2u) ++out.volume[{fac->second, lab->second, Candidate::trump}][bucket];
  }

  for (auto& [key, diff] : out.difference) {
    const auto& a = out.volume[{key.faction, key.group, Candidate::clinton}];
    const auto& b = out.volume[{key.faction, key.group, Candidate::trump}];
    for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = a[s] > b[s] ? a[s] - b[s] : b[s] - a[s];
  }
  return out;
}

std::map<std::string, sentiment::SentimentHistogram> hashtag_sentiment(
    std::span<const ingest::TweetRecord> records, std::span<const sentiment::SentimentScore> scores,
    const std::set<std::string>& tracked) {
  if (scores.size() != records.size()) throw DataError("sentiment scores do not match records");
  std::map<std::string, sentiment::SentimentHistogram> out;
  for (const auto& t : tracked) out[t] = {};
  for (std::size_t i = 0; i < records.size(); ++i)
    for (const auto& tag : records[i].hashtags)
      if (const auto it = out.find(tag); it != out.end())
        ++it->second[static_cast<std::size_t>(scores[i].s + 4)];
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ConditionFeature f) {
  switch (f) {
    case ConditionFeature::tweets_posted: return "tweets_posted";
    case ConditionFeature::retweets_received: return "retweets_received";
    case ConditionFeature::friends: return "friends";
    case ConditionFeature::followers: return "followers";
  }
  return "tweets_posted";
}

void MomentAccumulator::add(std::uint64_t v) {
  ++n_;
  sum_ += v;
  sumsq_ += static_cast<uint128>(v) * v;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  n_ += other.n_;
  sum_ += other.sum_;
  sumsq_ += other.sumsq_;
}

double MomentAccumulator::mean() const {
  return n_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(n_);
}

double MomentAccumulator::stddev() const {
  if (n_ < 2) return 0.0;
  // n * sum(x^2) - sum(x)^2 is exact in 128 bits for realistic inputs.
  const auto s = static_cast<uint128>(sum_);
  const auto num = static_cast<uint128>(n_) * sumsq_ - s * s;
  const double n = static_cast<double>(n_);
  return std::sqrt(static_cast<double>(num) / (n * (n - 1.0)));
}

double MomentAccumulator::standard_error() const {
  if (n_ < 2) return 0.0;
  return stddev() / std::sqrt(static_cast<double>(n_));
}

std::optional<std::uint64_t> user_feature(const ingest::UserAggregate& agg, ConditionFeature f,
                                          ingest::RetweetMode mode) {
  switch (f) {
    case ConditionFeature::tweets_posted: return agg.tweets_posted;
    case ConditionFeature::retweets_received: return agg.retweets_received(mode);
    case ConditionFeature::friends:
      if (agg.friends.empty) return std::nullopt;
      return static_cast<std::uint64_t>(agg.friends.max);
    case ConditionFeature::followers:
      if (agg.followers.empty) return std::nullopt;
      return static_cast<std::uint64_t>(agg.followers.max);
  }
  return std::nullopt;
}

ConditionedMeans sentiment_conditioned_means(std::span<const ingest::TweetRecord> records,
                                             std::span<const sentiment::SentimentScore> scores,
                                             const ingest::AggregateMap& users,
                                             ingest::RetweetMode mode, unsigned workers) {
  if (scores.size() != records.size()) throw DataError("sentiment scores do not match records");
  workers = resolve_workers(workers);
  struct Partial {
    std::array<ConditionedTable, 4> tables{};
    std::uint64_t skipped = 0;
  };
  std::vector<Partial> partial(workers);
  parallel_for(records.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& p = partial[w];
    for (std::size_t i = begin; i < end; ++i) {
      const int s = scores[i].s;
      if (s < kConditionedMin || s > kConditionedMax) continue;
      const auto& r = records[i];
      const auto it = users.find(r.author_id);
      if (it == users.end()) {
        ++p.skipped;
        continue;
      }
      const std::size_t split = r.retweet_count.value_or(0) > 1 ? 1 : 0;
      const auto bucket = static_cast<std::size_t>(s - kConditionedMin);
      bool missing = false;
      for (std::size_t f = 0; f < kConditionFeatures.size(); ++f) {
        if (const auto v = user_feature(it->second, kConditionFeatures[f], mode)) {
          p.tables[f][split][bucket].add(*v);
        } else {
          missing = true;
        }
      }
      if (missing) ++p.skipped;
    }
  });
  ConditionedMeans out;
  for (std::size_t f = 0; f < kConditionFeatures.size(); ++f) {
    auto& t = out.tables[kConditionFeatures[f]];
    for (const auto& p : partial)
      for (std::size_t split = 0; split < 2; ++split)
        for (std::size_t b = 0; b < t[split].size(); ++b) t[split][b].merge(p.tables[f][split][b]);
  }
  for (const auto& p : partial) out.skipped += p.skipped;
  return out;
}

}  // namespace tweetlab::diffusion
