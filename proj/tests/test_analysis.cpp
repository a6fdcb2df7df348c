#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tweetlab/dacmap.hpp"
#include "tweetlab/diffusion.hpp"
#include "tweetlab/extrapolate.hpp"
#include "tweetlab/ingest.hpp"
#include "tweetlab/synth.hpp"
#include "tweetlab/timeline.hpp"

using namespace tweetlab;

namespace {

ingest::TweetRecord tweet(std::string id, std::string author, ingest::TweetKind kind = ingest::TweetKind::original,
                          std::optional<std::string> target = std::nullopt, std::string text = "") {
  ingest::TweetRecord r;
  r.tweet_id = std::move(id);
  r.author_id = std::move(author);
  r.kind = kind;
  r.target_author_id = std::move(target);
  r.text = std::move(text);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// DAC map

TEST_CASE("deltas use counter spans over the activity period") {
  ingest::UserAggregate u;
  u.author_id = "a";
  u.tweets_posted = 2;
  u.account_created_at = 0;
  u.first_seen = 0;
  u.last_seen = 4 * 86400;
  for (auto [f, fr, st] : {std::tuple{10, 3, 100}, std::tuple{30, 7, 140}}) {
    u.followers.add(f);
    u.friends.add(fr);
    u.statuses.add(st);
  }
  const auto d = dac::compute_deltas(u);
  CHECK(d.period_days == 4.0);
  CHECK(d.followers == 5.0);
  CHECK(d.friends == 1.0);
  CHECK(d.tweets == 10.0);
  const auto p = dac::dac_point(d);
  CHECK(p.x == 3.0);
  CHECK(p.quadrant == dac::Quadrant::social_spam_bot);

  // a one-hour account is floored at t_min
  u.last_seen = 3600;
  CHECK(dac::compute_deltas(u, ingest::RetweetMode::in_dataset, 1.0).period_days == 1.0);
  CHECK(dac::compute_deltas(u, ingest::RetweetMode::in_dataset, 2.0).followers == 10.0);

  ingest::UserAggregate bare;
  bare.author_id = "b";
  CHECK_THROWS_AS(dac::compute_deltas(bare), InsufficientData);
}

TEST_CASE("log axis edges and binning") {
  const dac::LogAxis ax;
  CHECK(ax.bins() == 40);
  const auto e = ax.edges();
  REQUIRE(e.size() == 41);
  CHECK(e.front() == 0.01);
  CHECK(e[20] == 1.0);
  CHECK(e.back() == 100.0);
  bool clipped = false;
  CHECK(dac::bin_index(1.0, ax, e, clipped) == 20);
  CHECK_FALSE(clipped);
  CHECK(dac::bin_index(0.01, ax, e, clipped) == 0);
  CHECK_FALSE(clipped);
  CHECK(dac::bin_index(100.0, ax, e, clipped) == 39);
  CHECK(clipped);
  CHECK(dac::bin_index(0.0, ax, e, clipped) == 0);
  CHECK(clipped);
  CHECK(dac::bin_index(std::nextafter(1.0, 0.0), ax, e, clipped) == 19);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    CHECK(dac::bin_index(e[i], ax, e, clipped) == i);
    CHECK(dac::bin_index(std::nextafter(e[i + 1], 0.0), ax, e, clipped) == i);
  }
  CHECK_THROWS_AS((dac::LogAxis{2, 2, 10}.validate()), ConfigError);
}

TEST_CASE("density map") {
  const std::vector<dac::DacPoint> pts = {{1.0, 1.0}, {1.0, 1.0}, {0.5, 2.0}, {1000, 0.001}};
  const auto m = dac::build_density(pts);
  CHECK(m.total == 4);
  CHECK(m.clipped == 1);
  CHECK(m.counts[20 * m.ny() + 20] == 2);
  CHECK(m.integral() == doctest::Approx(1.0).epsilon(1e-12));
  const auto empty = dac::build_density({});
  CHECK(empty.empty());
  CHECK(empty.integral() == 0.0);

  dac::DensityAccumulator a({}, {}), b({}, {});
  a.add(1, 1);
  b.add(2, 3);
  a.merge(b);
  const auto merged = a.finish();
  CHECK(merged.total == 2);
  CHECK_THROWS_AS(a.merge(dac::DensityAccumulator({-1, 1, 5}, {})), ConfigError);
}

// ---------------------------------------------------------------------------
// Diffusion

TEST_CASE("ccdf basics") {
  const std::vector<double> v = {3, 1, 2, 2};
  const auto c = diffusion::ccdf(v);
  CHECK(c.values == std::vector<double>{1, 2, 3});
  CHECK(c.p == std::vector<double>{1.0, 0.75, 0.25});
  CHECK_THROWS_AS(diffusion::ccdf({}), EmptyInput);
}

TEST_CASE("interaction matrix and ccdfs") {
  using K = ingest::TweetKind;
  const std::vector<ingest::TweetRecord> recs = {
      tweet("1", "b1", K::retweet, "b2"), tweet("2", "b1", K::retweet, "h1"), tweet("3", "h1", K::reply, "b1"),
      tweet("4", "h1", K::reply, "h2"),   tweet("5", "h2", K::reply, "x"),    tweet("6", "b2"),
  };
  diffusion::GroupLabels labels = {{"b1", diffusion::Group::bot},
                                   {"b2", diffusion::Group::bot},
                                   {"h1", diffusion::Group::human},
                                   {"h2", diffusion::Group::human}};
  const auto m = diffusion::interaction_matrix(recs, labels);
  using diffusion::Group;
  using diffusion::InteractionKind;
  CHECK(m.get(InteractionKind::retweet, Group::bot, Group::bot) == 1);
  CHECK(m.get(InteractionKind::retweet, Group::bot, Group::human) == 1);
  CHECK(m.get(InteractionKind::reply, Group::human, Group::bot) == 1);
  CHECK(m.get(InteractionKind::reply, Group::human, Group::human) == 1);
  CHECK(m.excluded == 1);
  CHECK(m.per_user.at("b1").get(InteractionKind::retweet, diffusion::Scope::total) == 2);

  const auto cs = diffusion::interaction_ccdfs(m, labels);
  CHECK(cs.size() == 12);
  for (const auto& c : cs) {
    CHECK(c.users == 2);
    for (const auto v : c.series.values) CHECK(v > 0);
  }
}

TEST_CASE("faction from the ten most used hashtags") {
  ingest::UserAggregate u;
  u.hashtag_counts = {{"trump2016", 5}, {"trumppence16", 4}, {"imwithher", 1}, {"debate", 9}};
  auto tags = diffusion::FactionTags::defaults();
  auto a = diffusion::assign_faction(u, tags);
  CHECK(a.faction == diffusion::Faction::trump);
  CHECK(a.trump_tags == 2);
  CHECK(a.clinton_tags == 1);
  u.hashtag_counts["hillaryclinton"] = 2;
  CHECK(diffusion::assign_faction(u, tags).faction == diffusion::Faction::none);  // 2 vs 2

  std::map<std::string, std::uint64_t> many;
  for (int i = 0; i < 12; ++i) many["t" + std::to_string(i)] = 100;
  many["trump2016"] = 1;
  u.hashtag_counts = many;
  CHECK(diffusion::assign_faction(u, tags).faction == diffusion::Faction::none);  // not in the top ten
  CHECK(diffusion::top_hashtags(many).size() == 10);

  diffusion::FactionTags overlap{{"x"}, {"x"}};
  CHECK_THROWS_AS(overlap.validate(), ConfigError);
}

TEST_CASE("candidate mentions") {
  const auto terms = diffusion::CandidateTerms::defaults();
  auto r = tweet("1", "a", ingest::TweetKind::original, std::nullopt, "Hillary and TRUMP tonight");
  CHECK(diffusion::mentions(r, terms) == 3u);
  r.text = "trumpet practice";
  CHECK(diffusion::mentions(r, terms) == 0u);
  r.hashtags = {"imwithher"};
  CHECK(diffusion::mentions(r, terms) == 1u);
}

TEST_CASE("sentiment volume difference is symmetric") {
  auto r1 = tweet("1", "a", ingest::TweetKind::original, std::nullopt, "hillary");
  auto r2 = tweet("2", "a", ingest::TweetKind::original, std::nullopt, "trump trump");
  auto r3 = tweet("3", "b", ingest::TweetKind::original, std::nullopt, "trump");
  const std::vector<ingest::TweetRecord> recs = {r1, r2, r3};
  const std::vector<sentiment::SentimentScore> sc = {{3, 1, 2}, {3, 1, 2}, {1, 2, -1}};
  diffusion::GroupLabels labels = {{"a", diffusion::Group::bot}, {"b", diffusion::Group::human}};
  std::map<std::string, diffusion::Faction> factions = {{"a", diffusion::Faction::trump}};
  const auto v = diffusion::sentiment_volume_by_group(recs, sc, labels, factions, diffusion::CandidateTerms::defaults());
  const auto& bot_trump = v.volume.at({diffusion::Faction::trump, diffusion::Group::bot, diffusion::Candidate::trump});
  CHECK(bot_trump[6] == 1);
  const auto& diff = v.difference.at({diffusion::Faction::trump, diffusion::Group::bot});
  CHECK(diff[6] == 0);
  // users outside both factions are left out
  CHECK(v.difference.count({diffusion::Faction::none, diffusion::Group::human}) == 0);
  CHECK(v.volume.at({diffusion::Faction::trump, diffusion::Group::human, diffusion::Candidate::trump})[3] == 0);
}

TEST_CASE("moment accumulator is exact and mergeable") {
  diffusion::MomentAccumulator a, b, all;
  for (std::uint64_t v : {2u, 4u, 4u, 4u, 5u, 5u, 7u, 9u}) {
    (v % 2 ? a : b).add(v);
    all.add(v);
  }
  a.merge(b);
  CHECK(a == all);
  CHECK(all.mean() == 5.0);
  CHECK(all.stddev() == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(all.standard_error() == doctest::Approx(std::sqrt(32.0 / 7.0) / std::sqrt(8.0)));
  diffusion::MomentAccumulator big;
  for (int i = 0; i < 1000; ++i) big.add(4000000000ull);
  CHECK(big.stddev() == 0.0);
  CHECK(big.mean() == 4e9);
}

// ---------------------------------------------------------------------------
// Extrapolation, timeline

TEST_CASE("extrapolation needs a prefix of sampled strata") {
  std::map<std::string, std::uint64_t> activity;
  for (int i = 0; i < 100; ++i) activity["u" + std::to_string(100 + i)] = static_cast<std::uint64_t>(200 - i);
  std::map<std::string, bot::BotLabel> sample = {{"u199", bot::BotLabel::bot}};  // least active only
  CHECK_THROWS_AS(extrapolate::extrapolate_population(sample, activity, 10), InsufficientStrata);
  CHECK_THROWS_AS(extrapolate::extrapolate_population({}, activity, 10), InsufficientStrata);
  CHECK_THROWS_AS(extrapolate::extrapolate_population(sample, {}, 10), InsufficientStrata);
  CHECK_THROWS_AS(extrapolate::extrapolate_population(sample, activity, 0), ConfigError);

  sample = {{"u100", bot::BotLabel::bot}, {"u101", bot::BotLabel::human}, {"u102", bot::BotLabel::undecided}};
  const auto est = extrapolate::extrapolate_population(sample, activity, 10);
  CHECK(est.strata[0].bot_rate == doctest::Approx(1.0 / 3.0));
  CHECK(est.strata[9].floored);
  CHECK(est.bot_fraction == doctest::Approx(1.0 / 3.0));
  std::uint64_t users = 0;
  for (const auto& s : est.strata) users += s.users;
  CHECK(users == 100);
}

TEST_CASE("timeline lists tweet days with a running total") {
  const Timestamp d = 86400;
  const std::vector<Timestamp> ts = {5 * d + 10, 3 * d, 3 * d + 5, 5 * d};
  const auto rows = timeline::emit_timeline(ts);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == timeline::DayCount{"1970-01-04", 2, 2});
  CHECK(rows[1] == timeline::DayCount{"1970-01-06", 2, 4});
  CHECK(timeline::emit_timeline({}).empty());
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

TEST_CASE("synth is deterministic and plants exact coordinates") {
  auto spec = synth::SynthSpec::defaults();
  spec.seed = 42;
  const auto a = synth::generate_fixture(spec);
  const auto b = synth::generate_fixture(spec);
  CHECK(a.archive == b.archive);
  CHECK(a.ground_truth_csv() == b.ground_truth_csv());
  CHECK(a.users.size() == spec.users());

  const auto ds = ingest::ingest_buffer(a.archive, ingest::SchemaConfig::flat());
  CHECK(ds.stats.malformed == 0);
  const auto users = ingest::aggregate_users(ds.records, ds.snapshots);
  for (const auto& pu : a.users) {
    const auto p = dac::dac_point(dac::compute_deltas(users.at(pu.author_id), ingest::RetweetMode::platform));
    CHECK(p.x == doctest::Approx(pu.x).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(pu.y).epsilon(1e-12));
  }
}

TEST_CASE("synth spec validation") {
  auto spec = synth::SynthSpec::defaults();
  spec.homophily = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = synth::SynthSpec::defaults();
  spec[synth::Archetype::influential].log10_x_min = -0.5;  // leaves the quadrant
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(synth::SynthSpec::from_config(KeyValueConfig::parse("sed = 3\n")), ConfigError);
  const auto s = synth::SynthSpec::from_config(KeyValueConfig::parse("influential.count = 3\nseed = 9\n"));
  CHECK(s[synth::Archetype::influential].count == 3);
  CHECK(s.seed == 9);
}
