#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tweetlab/common.hpp"
#include "tweetlab/kvconfig.hpp"

namespace tweetlab::ingest {

enum class TweetKind { original, retweet, reply };

std::string_view to_string(TweetKind kind);
std::optional<TweetKind> parse_kind(std::string_view s);

struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  Timestamp created_at = 0;
  std::string text;
  std::vector<std::string> hashtags;  // lowercase, no leading '#'
  TweetKind kind = TweetKind::original;
  std::optional<std::string> target_author_id;  // set iff kind != original
  std::optional<std::uint64_t> retweet_count;   // absent when the archive lacks it
  bool has_geo = false;
};

/// Account state as observed at one instant. Most archives embed one per
/// tweet in the author object.
struct ProfileSnapshot {
  std::string author_id;
  Timestamp observed_at = 0;
  std::uint64_t followers = 0;
  std::uint64_t friends = 0;
  std::uint64_t statuses_total = 0;
  Timestamp account_created_at = 0;
  bool is_default_profile = false;
  std::string screen_name;
  /// Cumulative retweets received, when the archive carries such a counter.
  std::optional<std::uint64_t> retweets_received;
};

/// Maps archive fields (JSON pointers) onto record fields. Two presets exist:
/// `flat`, the layout this tool writes, and `twitter`, the classic v1.1 API
/// status object. A key-value file may start from a preset and override any
/// path; an empty path disables the field.
struct SchemaConfig {
  std::string tweet_id;
  std::string author_id;
  std::string created_at;
  std::string text;
  std::string hashtags;  // array of strings or of {"text": ...}; absent -> scanned from text
  /// Explicit kind field ("original"/"retweet"/"reply"). When empty the kind
  /// is derived from `retweet_target` / `reply_target`.
  std::string kind;
  std::string target;          // used with an explicit kind
  std::string retweet_target;  // used when deriving
  std::string reply_target;    // used when deriving
  std::string retweet_count;
  std::string geo;  // truthy, non-null value -> has_geo

  std::string user_followers;
  std::string user_friends;
  std::string user_statuses;
  std::string user_created_at;
  std::string user_default_profile;
  std::string user_screen_name;
  std::string user_retweets_received;

  std::optional<Timestamp> window_start;  // inclusive
  std::optional<Timestamp> window_end;    // inclusive

  static SchemaConfig flat();
  static SchemaConfig twitter();
  static SchemaConfig preset(std::string_view name);
  static SchemaConfig from_config(const KeyValueConfig& cfg);
  static SchemaConfig load(const std::filesystem::path& path);
};

enum class ParseError { malformed_record, out_of_window };

struct ParseFailure {
  ParseError error;
  std::string message;
};

struct ParsedLine {
  TweetRecord record;
  std::optional<ProfileSnapshot> snapshot;
};

using ParseResult = std::variant<ParsedLine, ParseFailure>;

ParseResult parse_tweet_line(std::string_view line, const SchemaConfig& schema);

/// Lowercased hashtags found in free text, in order of appearance.
std::vector<std::string> hashtags_from_text(std::string_view text);

struct IngestStats {
  std::uint64_t lines = 0;  // non-blank
  std::uint64_t accepted = 0;
  std::uint64_t malformed = 0;
  std::uint64_t out_of_window = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t snapshots = 0;
};

struct Dataset {
  std::vector<TweetRecord> records;
  std::vector<ProfileSnapshot> snapshots;
  IngestStats stats;
};

/// Parses newline-delimited records. Output order follows input order
/// regardless of `workers`; repeated tweet ids keep their first occurrence.
Dataset ingest_buffer(std::string_view data, const SchemaConfig& schema, unsigned workers = 1);

/// Reads a plain or gzip-compressed archive fully into memory.
std::string read_archive(const std::filesystem::path& path);

Dataset ingest_files(const std::vector<std::filesystem::path>& paths, const SchemaConfig& schema,
                     unsigned workers = 1);

/// One JSON object per line in the `flat` layout, snapshot embedded as "user".
std::string to_flat_json(const TweetRecord& record, const ProfileSnapshot* snapshot);

/// Writes records in the `flat` layout, attaching the matching embedded
/// snapshot (same author, observed at the tweet time) where one exists.
void write_flat_archive(const std::filesystem::path& path, const Dataset& dataset);

/// Standalone snapshot line: the flat "user" object plus "author" and
/// "observed_at".
std::string snapshot_to_json(const ProfileSnapshot& snapshot);
std::variant<ProfileSnapshot, ParseFailure> parse_snapshot_line(std::string_view line);

/// Reads a snapshot file (plain or gzip). Malformed lines are counted in
/// `stats.malformed`.
std::vector<ProfileSnapshot> read_snapshot_file(const std::filesystem::path& path,
                                                IngestStats& stats);

// ---------------------------------------------------------------------------
// Per-user aggregation

/// Running [min, max] of an observed counter.
struct CounterRange {
  std::int64_t min = 0;
  std::int64_t max = 0;
  bool empty = true;

  void add(std::int64_t v);
  void merge(const CounterRange& other);
  friend bool operator==(const CounterRange&, const CounterRange&) = default;
};

/// How retweets received are counted.
///  - in_dataset: retweet records in the archive that target the user, with a
///    cumulative counter that starts at zero.
///  - platform: per-tweet retweet_count summed over the user's own tweets, and
///    snapshot counters for the extrema, falling back to in_dataset when the
///    archive carries neither.
enum class RetweetMode { in_dataset, platform };

std::optional<RetweetMode> parse_retweet_mode(std::string_view s);
std::string_view to_string(RetweetMode m);

struct UserAggregate {
  std::string author_id;

  std::uint64_t tweets_posted = 0;
  std::uint64_t retweets_made = 0;
  std::uint64_t replies_made = 0;
  std::uint64_t replies_received = 0;
  std::uint64_t retweets_received_in_dataset = 0;
  std::uint64_t platform_retweets = 0;        // sum of retweet_count over own non-retweets
  std::uint64_t platform_retweet_tweets = 0;  // own non-retweets that carried retweet_count
  std::uint64_t geo_tweets = 0;
  std::map<std::string, std::uint64_t> hashtag_counts;

  std::optional<Timestamp> first_seen;  // authored records
  std::optional<Timestamp> last_seen;
  std::optional<Timestamp> last_snapshot;
  std::optional<Timestamp> account_created_at;

  CounterRange followers;
  CounterRange friends;
  CounterRange statuses;
  CounterRange retweet_counter;  // snapshot cumulative retweets, if any

  // Latest snapshot wins; ties break on (screen_name, is_default_profile).
  std::optional<Timestamp> latest_observed;
  bool is_default_profile = false;
  std::string screen_name;

  bool active() const { return tweets_posted > 0; }
  double geo_tweet_fraction() const;
  std::uint64_t retweets_received(RetweetMode mode) const;
  /// Extrema of the cumulative retweets-received series.
  CounterRange retweet_extrema(RetweetMode mode) const;
  /// Last observed activity: latest authored tweet, else latest snapshot.
  std::optional<Timestamp> last_activity() const;

  void add_authored(const TweetRecord& r);
  void add_received(const TweetRecord& r);
  void add_snapshot(const ProfileSnapshot& s);
  /// Associative and commutative.
  void merge(const UserAggregate& other);

  friend bool operator==(const UserAggregate&, const UserAggregate&) = default;
};

using AggregateMap = std::map<std::string, UserAggregate>;

/// Sequential fold; users that only appear as targets or in snapshots get
/// inactive aggregates (tweets_posted == 0).
AggregateMap aggregate_users(std::span<const TweetRecord> records,
                             std::span<const ProfileSnapshot> snapshots);

/// Same result as `aggregate_users`, built from per-worker partial maps.
AggregateMap aggregate_users_parallel(std::span<const TweetRecord> records,
                                      std::span<const ProfileSnapshot> snapshots,
                                      unsigned workers);

void merge_into(AggregateMap& into, const AggregateMap& from);

/// Days from account registration (or first sighting) to last activity,
/// floored at `min_days`.
double activity_period_days(const UserAggregate& agg, double min_days = 1.0);

/// One row per active user, sorted by author_id.
void write_users_csv(const std::filesystem::path& path, const AggregateMap& users);
std::string users_csv(const AggregateMap& users);
AggregateMap read_users_csv(const std::filesystem::path& path);

}  // namespace tweetlab::ingest
