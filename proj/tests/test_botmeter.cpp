#include <doctest.h>

#include <cmath>

#include "tweetlab/botmeter.hpp"
#include "tweetlab/rng.hpp"

using namespace tweetlab;
using namespace tweetlab::bot;

namespace {

ingest::UserAggregate user(const std::string& id, std::uint64_t tweets) {
  ingest::UserAggregate u;
  u.author_id = id;
  u.tweets_posted = tweets;
  u.retweets_made = tweets / 2;
  u.geo_tweets = tweets / 4;
  u.first_seen = 0;
  u.last_seen = 10 * 86400;
  u.account_created_at = 0;
  u.followers.add(9);
  u.friends.add(4);
  u.statuses.add(100);
  u.latest_observed = 10 * 86400;
  u.screen_name = "abab";
  return u;
}

}  // namespace

TEST_CASE("feature extraction") {
  const auto f = extract_features(user("a", 8), 1.0);
  CHECK(f.geo_absence == doctest::Approx(0.75));
  CHECK(f.tweets_per_day == doctest::Approx(0.8));
  CHECK(f.retweet_ratio == doctest::Approx(0.5));
  CHECK(f.follower_friend_ratio == doctest::Approx(2.0));
  CHECK(f.account_age_days == doctest::Approx(10.0));
  CHECK(f.username_randomness == doctest::Approx(1.0));
  CHECK(f.values().size() == kFeatureCount);

  auto no_profile = user("b", 3);
  no_profile.screen_name.clear();
  no_profile.latest_observed.reset();
  CHECK_THROWS_AS(extract_features(no_profile), InsufficientData);
  CHECK_THROWS_AS(extract_features(user("c", 0)), InsufficientData);
}

TEST_CASE("username randomness is character entropy") {
  CHECK(username_randomness("aaaa") == 0.0);
  CHECK(username_randomness("ab") == doctest::Approx(1.0));
  CHECK(username_randomness("abcd") == doctest::Approx(2.0));
  CHECK_THROWS_AS(username_randomness(""), EmptyName);
}

TEST_CASE("sigmoid is clamped and symmetric") {
  CHECK(sigmoid(0) == 0.5);
  CHECK(sigmoid(1000) == sigmoid(kLogitClamp));
  CHECK(sigmoid(-1000) > 0.0);
  CHECK(sigmoid(2) + sigmoid(-2) == doctest::Approx(1.0));
}

TEST_CASE("classification band") {
  CHECK(classify(0.56) == BotLabel::bot);
  CHECK(classify(0.55) == BotLabel::undecided);  // band edges are undecided
  CHECK(classify(0.54) == BotLabel::undecided);
  CHECK(classify(0.45) == BotLabel::undecided);
  CHECK(classify(0.44) == BotLabel::human);
  CHECK(classify(0.9, 0.8, 0.0) == BotLabel::bot);
}

TEST_CASE("model json round trip and validation") {
  LogisticModel m;
  m.features = {"a", "b"};
  m.weights = {0.5, -1.25};
  m.bias = 0.1;
  m.mean = {1, 2};
  m.stddev = {1, 0.5};
  const auto back = LogisticModel::from_json(m.to_json());
  CHECK(back.weights == m.weights);
  CHECK(back.stddev == m.stddev);
  CHECK(back.bias == m.bias);
  const std::vector<double> x = {1, 2};
  CHECK(score(x, m) == sigmoid(0.1));
  const std::vector<double> wrong = {1};
  CHECK_THROWS_AS(score(wrong, m), ModelMismatch);
  m.stddev[0] = 0;
  CHECK_THROWS(m.validate());
}

TEST_CASE("training rejects degenerate input") {
  std::vector<LabeledExample> one = {{{1.0}, 1}};
  CHECK_THROWS_AS(train(one, {}), DegenerateData);
  std::vector<LabeledExample> same = {{{1.0}, 1}, {{2.0}, 1}};
  CHECK_THROWS_AS(train(same, {}), DegenerateData);
  std::vector<LabeledExample> nan = {{{NAN}, 1}, {{2.0}, 0}};
  CHECK_THROWS_AS(train(nan, {}), NonFinite);
  std::vector<LabeledExample> ragged = {{{1.0}, 1}, {{2.0, 3.0}, 0}};
  CHECK_THROWS_AS(train(ragged, {}), ModelMismatch);
  TrainOptions big;  // zero step
  big.learning_rate = 0;
  std::vector<LabeledExample> ok = {{{1.0}, 1}, {{2.0}, 0}};
  CHECK_THROWS_AS(train(ok, big), ConfigError);
}

TEST_CASE("training is deterministic and the loss goes down") {
  Rng rng(3);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 200; ++i) {
    const int y = rng.chance(0.3) ? 1 : 0;
    data.push_back({{rng.normal() + 1.5 * y, rng.normal() * 10, rng.uniform()}, y});
  }
  TrainOptions opts;
  opts.epochs = 300;
  opts.batch_size = 32;
  const auto a = train(data, opts);
  const auto b = train(data, opts);
  CHECK(a.model.weights == b.model.weights);
  CHECK(a.loss_history.back() < a.loss_history.front());
  CHECK(stability_bound(7, 0) == doctest::Approx(1.0));
}

TEST_CASE("population helpers") {
  ingest::AggregateMap users;
  users["a"] = user("a", 5);
  users["b"] = user("b", 9);
  users["c"] = user("c", 5);
  users["d"] = user("d", 0);
  auto missing = user("e", 7);
  missing.latest_observed.reset();
  missing.screen_name.clear();
  users["e"] = missing;
  CHECK(rank_and_sample_top_k(users, 3) == std::vector<std::string>{"b", "e", "a"});
  CHECK(rank_and_sample_top_k(users, 10).size() == 4);

  LogisticModel m;
  m.features.assign(kFeatureCount, "f");
  m.weights.assign(kFeatureCount, 0.0);
  m.mean.assign(kFeatureCount, 0.0);
  m.stddev.assign(kFeatureCount, 1.0);
  m.bias = 3;
  const std::vector<std::string> ids = {"b", "e", "d"};
  const auto r = score_users(users, ids, m, {});
  REQUIRE(r.size() == 3);
  CHECK(r[0].label == BotLabel::bot);
  CHECK(r[1].reason == "missing_profile");
  CHECK(r[1].label == BotLabel::undecided);
  CHECK(r[2].reason == "no_activity");
}
