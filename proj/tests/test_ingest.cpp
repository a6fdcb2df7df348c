#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "tweetlab/ingest.hpp"
#include "tweetlab/synth.hpp"

using namespace tweetlab;
using namespace tweetlab::ingest;

namespace {

const char* kFlat =
    R"({"id":"1","author":"a","created_at":100,"text":"hi #One","kind":"original","retweet_count":3,"geo":true,"user":{"followers":10,"friends":5,"statuses":7,"created_at":0,"default_profile":true,"screen_name":"ann"}})"
    "\n"
    R"({"id":"2","author":"b","created_at":200,"text":"RT @a: hi","kind":"retweet","target":"a","user":{"followers":1,"friends":1,"statuses":1,"created_at":50,"default_profile":false,"screen_name":"bob"}})"
    "\n"
    R"({"id":"3","author":"a","created_at":86500,"text":"@b yes","kind":"reply","target":"b","retweet_count":1,"user":{"followers":12,"friends":5,"statuses":9,"created_at":0,"default_profile":true,"screen_name":"ann"}})"
    "\n";

}  // namespace

TEST_CASE("flat records parse with embedded profiles") {
  const auto ds = ingest_buffer(kFlat, SchemaConfig::flat());
  REQUIRE(ds.records.size() == 3);
  CHECK(ds.stats.accepted == 3);
  CHECK(ds.snapshots.size() == 3);
  const auto& r = ds.records[0];
  CHECK(r.hashtags == std::vector<std::string>{"one"});
  CHECK(r.has_geo);
  CHECK(r.retweet_count == 3u);
  CHECK(ds.records[1].kind == TweetKind::retweet);
  CHECK(ds.records[1].target_author_id == "a");
  CHECK_FALSE(ds.records[1].retweet_count);
}

TEST_CASE("twitter layout derives kinds from nested objects") {
  const std::string line =
      R"({"id_str":"9","created_at":"Wed Oct 19 01:00:00 +0000 2016","text":"RT @x: wow #Debate",)"
      R"("entities":{"hashtags":[{"text":"Debate"}]},"retweeted_status":{"user":{"id_str":"x"}},)"
      R"("retweet_count":4,"coordinates":null,"user":{"id_str":"u","followers_count":3,"friends_count":2,)"
      R"("statuses_count":1,"created_at":"Mon Jan 01 00:00:00 +0000 2015","default_profile":false,"screen_name":"uu"}})";
  const auto ds = ingest_buffer(line, SchemaConfig::twitter());
  REQUIRE(ds.records.size() == 1);
  const auto& r = ds.records[0];
  CHECK(r.kind == TweetKind::retweet);
  CHECK(r.target_author_id == "x");
  CHECK(r.hashtags == std::vector<std::string>{"debate"});
  CHECK_FALSE(r.has_geo);
  CHECK(ds.snapshots.at(0).followers == 3);
}

TEST_CASE("malformed, duplicate and out-of-window lines are counted, not fatal") {
  std::string data = kFlat;
  data += "not json\n";
  data += R"({"id":"1","author":"a","created_at":100,"text":"dup","kind":"original"})" "\n";
  data += R"({"id":"4","author":"a","created_at":100,"text":"x","kind":"retweet"})" "\n";  // no target
  data += "\n";
  auto schema = SchemaConfig::flat();
  schema.window_end = 86400;
  const auto ds = ingest_buffer(data, schema);
  CHECK(ds.stats.lines == 6);
  CHECK(ds.stats.malformed == 2);
  CHECK(ds.stats.duplicates == 1);
  CHECK(ds.stats.out_of_window == 1);
  CHECK(ds.records.size() == 2);
}

TEST_CASE("ingest output does not depend on worker count") {
  const auto archive = fixtures::bulk_archive(3000, 40, 3);
  const auto a = ingest_buffer(archive, SchemaConfig::flat(), 1);
  const auto b = ingest_buffer(archive, SchemaConfig::flat(), 4);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(to_flat_json(a.records[i], nullptr) == to_flat_json(b.records[i], nullptr));
  CHECK(aggregate_users(a.records, a.snapshots) == aggregate_users_parallel(b.records, b.snapshots, 4));
}

TEST_CASE("flat round trip through the writer") {
  const auto ds = ingest_buffer(kFlat, SchemaConfig::flat());
  std::string again;
  for (std::size_t i = 0; i < ds.records.size(); ++i) again += to_flat_json(ds.records[i], &ds.snapshots[i]) + "\n";
  const auto ds2 = ingest_buffer(again, SchemaConfig::flat());
  CHECK(aggregate_users(ds.records, ds.snapshots) == aggregate_users(ds2.records, ds2.snapshots));
}

TEST_CASE("gzip archives read transparently") {
  const auto dir = std::filesystem::temp_directory_path() / "tweetlab_gz_test";
  std::filesystem::create_directories(dir);
  synth::write_maybe_gz(dir / "a.jsonl.gz", kFlat);
  CHECK(read_archive(dir / "a.jsonl.gz") == kFlat);
  std::filesystem::remove_all(dir);
}

TEST_CASE("per-user aggregation") {
  const auto ds = ingest_buffer(kFlat, SchemaConfig::flat());
  const auto users = aggregate_users(ds.records, ds.snapshots);
  const auto& a = users.at("a");
  CHECK(a.tweets_posted == 2);
  CHECK(a.replies_made == 1);
  CHECK(a.retweets_received_in_dataset == 1);
  CHECK(a.platform_retweets == 4);
  CHECK(a.followers.min == 10);
  CHECK(a.followers.max == 12);
  CHECK(a.geo_tweet_fraction() == doctest::Approx(0.5));
  CHECK(a.hashtag_counts.at("one") == 1);
  CHECK(a.is_default_profile);
  CHECK(users.at("b").replies_received == 1);
  CHECK(activity_period_days(a) == doctest::Approx(86500.0 / 86400.0));
  // floored at the minimum period
  CHECK(activity_period_days(users.at("b"), 1.0) == 1.0);

  const auto in_ds = a.retweet_extrema(RetweetMode::in_dataset);
  CHECK(in_ds.min == 0);
  CHECK(in_ds.max == 1);
}

TEST_CASE("registration after last activity is an invalid timeline") {
  UserAggregate u;
  u.author_id = "z";
  u.tweets_posted = 1;
  u.first_seen = u.last_seen = 10;
  u.account_created_at = 100;
  CHECK_THROWS_AS(activity_period_days(u), InvalidTimeline);
}

TEST_CASE("users csv round trip") {
  const auto archive = fixtures::bulk_archive(500, 30, 4);
  const auto ds = ingest_buffer(archive, SchemaConfig::flat());
  const auto users = aggregate_users(ds.records, ds.snapshots);
  const auto dir = std::filesystem::temp_directory_path() / "tweetlab_users_test";
  std::filesystem::create_directories(dir);
  write_users_csv(dir / "users.csv", users);
  const auto back = read_users_csv(dir / "users.csv");
  for (const auto& [id, u] : users)
    if (u.active()) CHECK(back.at(id) == u);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schema config files start from a preset") {
  const auto cfg = KeyValueConfig::parse("preset = twitter\ntext = /full_text\n");
  const auto s = SchemaConfig::from_config(cfg);
  CHECK(s.text == "/full_text");
  CHECK(s.tweet_id == "/id_str");
  CHECK_THROWS_AS(SchemaConfig::from_config(KeyValueConfig::parse("tweet_idd = /x\n")), ConfigError);
}
