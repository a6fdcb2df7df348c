#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetlab/ingest.hpp"
#include "tweetlab/sentiment.hpp"

namespace tweetlab::diffusion {

/// values ascending and distinct; p[i] = share of the sample that is >= values[i].
struct CcdfSeries {
  std::vector<double> values;
  std::vector<double> p;

  bool empty() const { return values.empty(); }
};

/// Throws EmptyInput for an empty sample.
CcdfSeries ccdf(std::span<const double> values);

// ---------------------------------------------------------------------------
// Bot / human interactions

enum class Group { bot, human };
enum class InteractionKind { reply, retweet };
enum class Scope { within, across, total };

std::string_view to_string(Group g);
std::string_view to_string(InteractionKind k);
std::string_view to_string(Scope s);

using GroupLabels = std::map<std::string, Group>;

struct UserInteractions {
  // [kind][0 = within, 1 = across]
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t get(InteractionKind k, Scope s) const;
};

struct GroupInteractionMatrix {
  // [kind][source group][target group]
  std::array<std::array<std::array<std::uint64_t, 2>, 2>, 2> counts{};
  std::uint64_t excluded = 0;  // a side is unlabeled
  /// Every labeled user, including those without interactions.
  std::map<std::string, UserInteractions> per_user;

  std::uint64_t get(InteractionKind k, Group source, Group target) const;
};

/// Replies and retweets from one labeled user to another. Interactions with
/// an unlabeled side are excluded and counted.
GroupInteractionMatrix interaction_matrix(std::span<const ingest::TweetRecord> records,
                                          const GroupLabels& labels);

struct InteractionCcdf {
  Group group = Group::human;
  InteractionKind kind = InteractionKind::reply;
  Scope scope = Scope::total;
  CcdfSeries series;           // users with a positive count only
  std::size_t users = 0;       // labeled users in the group
  std::size_t zero_users = 0;  // of which generated no interaction in this scope
};

/// All twelve (group, kind, scope) combinations in enum order.
std::vector<InteractionCcdf> interaction_ccdfs(const GroupInteractionMatrix& matrix,
                                               const GroupLabels& labels);

// ---------------------------------------------------------------------------
// Factions

enum class Faction { clinton, trump, none };

std::string_view to_string(Faction f);

struct FactionTags {
  std::set<std::string> clinton;
  std::set<std::string> trump;

  /// Throws ConfigError when a tag is in both lists.
  void validate() const;
  static FactionTags defaults();
};

/// The k most used hashtags, ties broken by the smaller tag.
std::vector<std::pair<std::string, std::uint64_t>> top_hashtags(
    const std::map<std::string, std::uint64_t>& counts, std::size_t k = 10);

struct FactionAssignment {
  Faction faction = Faction::none;
  std::size_t clinton_tags = 0;  // faction tags among the top ten
  std::size_t trump_tags = 0;
};

/// Strict majority of the faction tags found among the top ten wins.
FactionAssignment assign_faction(const ingest::UserAggregate& agg, const FactionTags& tags);

// ---------------------------------------------------------------------------
// Sentiment volume per group

enum class Candidate { clinton, trump };

std::string_view to_string(Candidate c);

/// A tweet mentions a candidate when any of its lowercase word tokens (or
/// hashtags) equals one of the candidate's terms.
struct CandidateTerms {
  std::set<std::string> clinton;
  std::set<std::string> trump;

  static CandidateTerms defaults();
};

/// Bit 0 clinton, bit 1 trump.
unsigned mentions(const ingest::TweetRecord& record, const CandidateTerms& terms);

struct VolumeKey {
  Faction faction = Faction::none;
  Group group = Group::human;
  Candidate candidate = Candidate::clinton;

  auto operator<=>(const VolumeKey&) const = default;
};

struct DiffKey {
  Faction faction = Faction::none;
  Group group = Group::human;

  auto operator<=>(const DiffKey&) const = default;
};

struct SentimentVolumes {
  std::map<VolumeKey, sentiment::SentimentHistogram> volume;
  /// |volume about clinton - volume about trump| per sentiment value.
  std::map<DiffKey, sentiment::SentimentHistogram> difference;
};

/// Tweets by labeled, faction-assigned authors. Every (clinton, trump) x
/// (bot, human) x candidate cell is present, possibly all zero. `scores` is
/// aligned with `records`.
SentimentVolumes sentiment_volume_by_group(std::span<const ingest::TweetRecord> records,
                                           std::span<const sentiment::SentimentScore> scores,
                                           const GroupLabels& labels,
                                           const std::map<std::string, Faction>& factions,
                                           const CandidateTerms& terms);

/// Sentiment histogram of tweets carrying each tracked hashtag.
std::map<std::string, sentiment::SentimentHistogram> hashtag_sentiment(
    std::span<const ingest::TweetRecord> records, std::span<const sentiment::SentimentScore> scores,
    const std::set<std::string>& tracked);

// ---------------------------------------------------------------------------
// Sentiment-conditioned feature means

enum class ConditionFeature { tweets_posted, retweets_received, friends, followers };

inline constexpr std::array<ConditionFeature, 4> kConditionFeatures = {
    ConditionFeature::tweets_posted, ConditionFeature::retweets_received, ConditionFeature::friends,
    ConditionFeature::followers};

std::string_view to_string(ConditionFeature f);

__extension__ typedef unsigned __int128 uint128;

/// Exact integer moments, so partial results merge without rounding.
class MomentAccumulator {
public:
  void add(std::uint64_t v);
  void merge(const MomentAccumulator& other);

  std::uint64_t count() const { return n_; }
  double mean() const;
  /// Sample standard deviation; 0 when n < 2.
  double stddev() const;
  /// stddev / sqrt(n); 0 when n < 2.
  double standard_error() const;

  friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;

private:
  std::uint64_t n_ = 0;
  std::uint64_t sum_ = 0;
  uint128 sumsq_ = 0;
};

inline constexpr int kConditionedMin = -3;
inline constexpr int kConditionedMax = 3;

/// [split][s + 3]; split 0: retweeted at most once, 1: more than once.
using ConditionedTable = std::array<std::array<MomentAccumulator, 7>, 2>;

struct ConditionedMeans {
  std::map<ConditionFeature, ConditionedTable> tables;
  std::uint64_t skipped = 0;  // tweets whose author lacks the feature
};

/// Each tweet with |s| <= 3 contributes its author's feature value to the
/// bucket of its sentiment and retweet split. Tweets without a retweet count
/// are treated as retweeted zero times.
ConditionedMeans sentiment_conditioned_means(std::span<const ingest::TweetRecord> records,
                                             std::span<const sentiment::SentimentScore> scores,
                                             const ingest::AggregateMap& users,
                                             ingest::RetweetMode mode, unsigned workers = 1);

/// Feature value of one user, absent when friends/followers were never observed.
std::optional<std::uint64_t> user_feature(const ingest::UserAggregate& agg, ConditionFeature f,
                                          ingest::RetweetMode mode);

}  // namespace tweetlab::diffusion
