#include <algorithm>
#include <charconv>
#include <tuple>

#include "tweetlab/csv.hpp"
#include "tweetlab/ingest.hpp"

namespace tweetlab::ingest {

namespace {

void min_into(std::optional<Timestamp>& slot, std::optional<Timestamp> v) {
  if (v && (!slot || *v < *slot)) slot = v;
}

void max_into(std::optional<Timestamp>& slot, std::optional<Timestamp> v) {
  if (v && (!slot || *v > *slot)) slot = v;
}

}  // namespace

void CounterRange::add(std::int64_t v) {
  if (empty) {
    min = max = v;
    empty = false;
    return;
  }
  min = std::min(min, v);
  max = std::max(max, v);
}

void CounterRange::merge(const CounterRange& other) {
  if (other.empty) return;
  add(other.min);
  add(other.max);
}

std::optional<RetweetMode> parse_retweet_mode(std::string_view s) {
  if (s == "in_dataset") return RetweetMode::in_dataset;
  if (s == "platform") return RetweetMode::platform;
  return std::nullopt;
}

std::string_view to_string(RetweetMode m) {
  return m == RetweetMode::platform ? "platform" : "in_dataset";
}

double UserAggregate::geo_tweet_fraction() const {
  if (tweets_posted == 0) return 0.0;
  return static_cast<double>(geo_tweets) / static_cast<double>(tweets_posted);
}

std::uint64_t UserAggregate::retweets_received(RetweetMode mode) const {
  if (mode == RetweetMode::platform && platform_retweet_tweets > 0) return platform_retweets;
  return retweets_received_in_dataset;
}

CounterRange UserAggregate::retweet_extrema(RetweetMode mode) const {
  if (mode == RetweetMode::platform && !retweet_counter.empty) return retweet_counter;
  CounterRange r;
  r.add(0);
  r.add(static_cast<std::int64_t>(retweets_received(mode)));
  return r;
}

std::optional<Timestamp> UserAggregate::last_activity() const {
  return last_seen ? last_seen : last_snapshot;
}

void UserAggregate::add_authored(const TweetRecord& r) {
  ++tweets_posted;
  if (r.kind == TweetKind::retweet) ++retweets_made;
  if (r.kind == TweetKind::reply) ++replies_made;
  if (r.kind != TweetKind::retweet && r.retweet_count) {
    platform_retweets += *r.retweet_count;
    ++platform_retweet_tweets;
  }
  if (r.has_geo) ++geo_tweets;
  for (const auto& tag : r.hashtags) ++hashtag_counts[tag];
  min_into(first_seen, r.created_at);
  max_into(last_seen, r.created_at);
}

void UserAggregate::add_received(const TweetRecord& r) {
  if (r.kind == TweetKind::retweet) ++retweets_received_in_dataset;
  if (r.kind == TweetKind::reply) ++replies_received;
}

void UserAggregate::add_snapshot(const ProfileSnapshot& s) {
  followers.add(static_cast<std::int64_t>(s.followers));
  friends.add(static_cast<std::int64_t>(s.friends));
  statuses.add(static_cast<std::int64_t>(s.statuses_total));
  if (s.retweets_received) retweet_counter.add(static_cast<std::int64_t>(*s.retweets_received));
  min_into(account_created_at, s.account_created_at);
  max_into(last_snapshot, s.observed_at);
  const auto incoming = std::tie(s.observed_at, s.screen_name, s.is_default_profile);
  if (!latest_observed ||
      incoming > std::tie(*latest_observed, screen_name, is_default_profile)) {
    latest_observed = s.observed_at;
    screen_name = s.screen_name;
    is_default_profile = s.is_default_profile;
  }
}

void UserAggregate::merge(const UserAggregate& o) {
  tweets_posted += o.tweets_posted;
  retweets_made += o.retweets_made;
  replies_made += o.replies_made;
  replies_received += o.replies_received;
  retweets_received_in_dataset += o.retweets_received_in_dataset;
  platform_retweets += o.platform_retweets;
  platform_retweet_tweets += o.platform_retweet_tweets;
  geo_tweets += o.geo_tweets;
  for (const auto& [tag, n] : o.hashtag_counts) hashtag_counts[tag] += n;
  min_into(first_seen, o.first_seen);
  max_into(last_seen, o.last_seen);
  max_into(last_snapshot, o.last_snapshot);
  min_into(account_created_at, o.account_created_at);
  followers.merge(o.followers);
  friends.merge(o.friends);
  statuses.merge(o.statuses);
  retweet_counter.merge(o.retweet_counter);
  if (o.latest_observed &&
      (!latest_observed ||
       std::tie(*o.latest_observed, o.screen_name, o.is_default_profile) >
           std::tie(*latest_observed, screen_name, is_default_profile))) {
    latest_observed = o.latest_observed;
    screen_name = o.screen_name;
    is_default_profile = o.is_default_profile;
  }
}

namespace {

UserAggregate& slot(AggregateMap& map, const std::string& id) {
  auto [it, inserted] = map.try_emplace(id);
  if (inserted) it->second.author_id = id;
  return it->second;
}

}  // namespace

AggregateMap aggregate_users(std::span<const TweetRecord> records,
                             std::span<const ProfileSnapshot> snapshots) {
  AggregateMap map;
  for (const auto& r : records) {
    slot(map, r.author_id).add_authored(r);
    if (r.target_author_id) slot(map, *r.target_author_id).add_received(r);
  }
  for (const auto& s : snapshots) slot(map, s.author_id).add_snapshot(s);
  return map;
}

void merge_into(AggregateMap& into, const AggregateMap& from) {
  for (const auto& [id, agg] : from) slot(into, id).merge(agg);
}

AggregateMap aggregate_users_parallel(std::span<const TweetRecord> records,
                                      std::span<const ProfileSnapshot> snapshots,
                                      unsigned workers) {
  workers = resolve_workers(workers);
  if (workers <= 1) return aggregate_users(records, snapshots);
  std::vector<AggregateMap> partial(workers);
  parallel_for(records.size(), workers, [&](std::size_t b, std::size_t e, unsigned w) {
    partial[w] = aggregate_users(records.subspan(b, e - b), {});
  });
  AggregateMap snaps;
  for (const auto& s : snapshots) slot(snaps, s.author_id).add_snapshot(s);
  // Tree reduction in a fixed pairing order.
  partial.push_back(std::move(snaps));
  while (partial.size() > 1) {
    std::vector<AggregateMap> next((partial.size() + 1) / 2);
    parallel_for(next.size(), workers, [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t i = b; i < e; ++i) {
        next[i] = std::move(partial[2 * i]);
        if (2 * i + 1 < partial.size()) merge_into(next[i], partial[2 * i + 1]);
      }
    });
    partial = std::move(next);
  }
  return std::move(partial.front());
}

double activity_period_days(const UserAggregate& agg, double min_days) {
  const auto last = agg.last_activity();
  if (!last) throw InsufficientData("user " + agg.author_id + " has no observed activity");
  std::optional<Timestamp> created = agg.account_created_at;
  if (!created) created = agg.first_seen ? agg.first_seen : agg.last_snapshot;
  if (*last < *created)
    throw InvalidTimeline("user " + agg.author_id + ": last activity precedes registration");
  const double days = static_cast<double>(*last - *created) / kSecondsPerDay;
  return std::max(days, min_days);
}

// CSV persistence --------------------------------------------------------------

namespace {

const std::vector<std::string> kUserColumns = {
    "author_id", "tweets_posted", "retweets_made", "replies_made", "replies_received",
    "retweets_received_in_dataset", "platform_retweets", "platform_retweet_tweets", "geo_tweets",
    "first_seen", "last_seen", "last_snapshot", "account_created_at", "followers_min",
    "followers_max", "friends_min", "friends_max", "statuses_min", "statuses_max",
    "retweet_counter_min", "retweet_counter_max", "latest_observed", "is_default_profile",
    "screen_name", "hashtags"};

std::string opt_time(const std::optional<Timestamp>& t) { return t ? std::to_string(*t) : ""; }

std::string range_min(const CounterRange& r) { return r.empty ? "" : std::to_string(r.min); }
std::string range_max(const CounterRange& r) { return r.empty ? "" : std::to_string(r.max); }

template <class T>
T parse_number(const std::string& s, const char* what) {
  T out{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || p != end) throw DataError(std::string("users.csv: bad ") + what + " '" + s + "'");
  return out;
}

std::optional<Timestamp> parse_opt_time(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number<Timestamp>(s, "timestamp");
}

CounterRange parse_range(const std::string& lo, const std::string& hi) {
  CounterRange r;
  if (lo.empty() != hi.empty()) throw DataError("users.csv: half-empty counter range");
  if (lo.empty()) return r;
  r.add(parse_number<std::int64_t>(lo, "counter"));
  r.add(parse_number<std::int64_t>(hi, "counter"));
  return r;
}

}  // namespace

std::string users_csv(const AggregateMap& users) {
  csv::Writer w(kUserColumns);
  for (const auto& [id, a] : users) {
    if (!a.active()) continue;
    std::string tags;
    for (const auto& [tag, n] : a.hashtag_counts) {
      if (!tags.empty()) tags.push_back(';');
      tags += tag + "=" + std::to_string(n);
    }
    w.row({a.author_id, std::to_string(a.tweets_posted), std::to_string(a.retweets_made),
           std::to_string(a.replies_made), std::to_string(a.replies_received),
           std::to_string(a.retweets_received_in_dataset), std::to_string(a.platform_retweets),
           std::to_string(a.platform_retweet_tweets), std::to_string(a.geo_tweets),
           opt_time(a.first_seen), opt_time(a.last_seen), opt_time(a.last_snapshot),
           opt_time(a.account_created_at), range_min(a.followers), range_max(a.followers),
           range_min(a.friends), range_max(a.friends), range_min(a.statuses),
           range_max(a.statuses), range_min(a.retweet_counter), range_max(a.retweet_counter),
           opt_time(a.latest_observed), a.is_default_profile ? "1" : "0", a.screen_name, tags});
  }
  return w.str();
}

void write_users_csv(const std::filesystem::path& path, const AggregateMap& users) {
  write_text_file(path, users_csv(users));
}

AggregateMap read_users_csv(const std::filesystem::path& path) {
  const auto table = csv::load(path);
  std::vector<std::size_t> idx;
  for (const auto& c : kUserColumns) idx.push_back(table.column(c));
  AggregateMap out;
  for (const auto& row : table.rows) {
    auto f = [&](std::size_t i) -> const std::string& { return row[idx[i]]; };
    UserAggregate a;
    a.author_id = f(0);
    a.tweets_posted = parse_number<std::uint64_t>(f(1), "count");
    a.retweets_made = parse_number<std::uint64_t>(f(2), "count");
    a.replies_made = parse_number<std::uint64_t>(f(3), "count");
    a.replies_received = parse_number<std::uint64_t>(f(4), "count");
    a.retweets_received_in_dataset = parse_number<std::uint64_t>(f(5), "count");
    a.platform_retweets = parse_number<std::uint64_t>(f(6), "count");
    a.platform_retweet_tweets = parse_number<std::uint64_t>(f(7), "count");
    a.geo_tweets = parse_number<std::uint64_t>(f(8), "count");
    a.first_seen = parse_opt_time(f(9));
    a.last_seen = parse_opt_time(f(10));
    a.last_snapshot = parse_opt_time(f(11));
    a.account_created_at = parse_opt_time(f(12));
    a.followers = parse_range(f(13), f(14));
    a.friends = parse_range(f(15), f(16));
    a.statuses = parse_range(f(17), f(18));
    a.retweet_counter = parse_range(f(19), f(20));
    a.latest_observed = parse_opt_time(f(21));
    a.is_default_profile = f(22) == "1";
    a.screen_name = f(23);
    if (!f(24).empty()) {
      for (const auto& item : split(f(24), ';')) {
        const auto eq = item.rfind('=');
        if (eq == std::string::npos) throw DataError("users.csv: bad hashtag entry '" + item + "'");
        a.hashtag_counts[item.substr(0, eq)] =
            parse_number<std::uint64_t>(item.substr(eq + 1), "hashtag count");
      }
    }
    const auto id = a.author_id;
    out.emplace(id, std::move(a));
  }
  return out;
}

}  // namespace tweetlab::ingest
