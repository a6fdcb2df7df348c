#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "tweetlab/porter.hpp"
#include "tweetlab/sentiment.hpp"
#include "tweetlab/spamfilter.hpp"

using namespace tweetlab;
using namespace tweetlab::sentiment;

namespace {

SentimentLexicon small_lexicon() {
  std::istringstream in(
      "# test lexicon\n"
      "good\t2\nlove\t3\nbad\t-2\nhate\t-3\nawesome*\t4\n"
      "very\t1\tbooster\nreally\t1\tbooster\nslightly\t-1\tbooster\n"
      "not\t0\tnegator\nnever\t0\tnegator\n"
      ":)\t2\temoticon\n:(\t-2\temoticon\n");
  return SentimentLexicon::parse(in);
}

}  // namespace

TEST_CASE("sentiment scoring rules") {
  const auto lex = small_lexicon();
  auto s = [&](const char* t) { return score_tweet(t, lex).s; };
  CHECK(s("") == 0);
  CHECK(s("nothing to see") == 0);
  CHECK(s("good") == 2);
  CHECK(s("really good") == 3);
  CHECK(s("really very good") == 4);
  CHECK(s("not good") == -2);
  CHECK(s("not very good") == -3);
  CHECK(s("never the good") == -2);          // within two tokens
  CHECK(s("not the same good") == 2);        // out of reach
  CHECK(s("not :)") == 2);                   // emoticons ignore negators
  CHECK(s("very :)") == 2);                  // and boosters
  CHECK(s("good bad") == 0);
  CHECK(s("love :(") == 1);
  CHECK(s("very very very love") == 4);      // clamped at 4
  CHECK(s("GOOOOD") == 2);                   // repeated letters collapse
  CHECK(s("baaaaad") == -2);
  CHECK(s("awesomeness") == 4);              // prefix entry
  CHECK(s("#love @hate") == 0);
  CHECK(s("slightly good") == 1);
  const auto sc = score_tweet("love :(", lex);
  CHECK(sc.pos == 4);
  CHECK(sc.neg == 3);
}

TEST_CASE("lexicon file errors") {
  std::istringstream zero("meh\t0\n");
  CHECK_THROWS_AS(SentimentLexicon::parse(zero), ConfigError);
  std::istringstream kind("x\t1\tadverb\n");
  CHECK_THROWS_AS(SentimentLexicon::parse(kind), ConfigError);
  std::istringstream cols("x\n");
  CHECK_THROWS_AS(SentimentLexicon::parse(cols), ConfigError);
}

TEST_CASE("bundled lexicon loads") {
  const auto lex = SentimentLexicon::load(fixtures::repo_data_dir() / "lexicon.tsv");
  CHECK(lex.size() > 100);
  CHECK(lex.is_negator("not"));
  CHECK(score_tweet("really good", lex).s == 3);
}

TEST_CASE("polarity and histogram") {
  CHECK(classify(-1) == Polarity::negative);
  CHECK(classify(0) == Polarity::neutral);
  CHECK(classify(4) == Polarity::positive);
  CHECK_THROWS_AS(classify(5), RangeError);
  const std::vector<SentimentScore> v = {{1, 1, 0}, {3, 1, 2}, {1, 5, -4}};
  const auto h = sentiment_histogram(v);
  CHECK(h[4] == 1);
  CHECK(h[6] == 1);
  CHECK(h[0] == 1);
}

TEST_CASE("porter stemmer reference vocabulary") {
  const std::vector<std::pair<const char*, const char*>> pairs = {
      {"caresses", "caress"}, {"ponies", "poni"},       {"ties", "ti"},
      {"caress", "caress"},   {"cats", "cat"},          {"feed", "feed"},
      {"agreed", "agre"},     {"plastered", "plaster"}, {"bled", "bled"},
      {"motoring", "motor"},  {"sing", "sing"},         {"conflated", "conflat"},
      {"troubled", "troubl"}, {"sized", "size"},        {"hopping", "hop"},
      {"tanned", "tan"},      {"falling", "fall"},      {"hissing", "hiss"},
      {"fizzed", "fizz"},     {"failing", "fail"},      {"filing", "file"},
      {"happy", "happi"},     {"sky", "sky"},           {"relational", "relat"},
      {"conditional", "condit"}, {"rational", "ration"}, {"valenci", "valenc"},
      {"hesitanci", "hesit"}, {"digitizer", "digit"},   {"conformabli", "conform"},
      {"radicalli", "radic"}, {"differentli", "differ"}, {"vileli", "vile"},
      {"analogousli", "analog"}, {"vietnamization", "vietnam"}, {"predication", "predic"},
      {"operator", "oper"},   {"feudalism", "feudal"},  {"decisiveness", "decis"},
      {"hopefulness", "hope"}, {"callousness", "callous"}, {"formaliti", "formal"},
      {"sensitiviti", "sensit"}, {"sensibiliti", "sensibl"}, {"triplicate", "triplic"},
      {"formative", "form"},  {"formalize", "formal"},  {"electriciti", "electr"},
      {"electrical", "electr"}, {"hopeful", "hope"},    {"goodness", "good"},
      {"revival", "reviv"},   {"allowance", "allow"},   {"inference", "infer"},
      {"airliner", "airlin"}, {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"},
      {"defensible", "defens"}, {"irritant", "irrit"},  {"replacement", "replac"},
      {"adjustment", "adjust"}, {"dependent", "depend"}, {"adoption", "adopt"},
      {"homologou", "homolog"}, {"communism", "commun"}, {"activate", "activ"},
      {"angulariti", "angular"}, {"homologous", "homolog"}, {"effective", "effect"},
      {"bowdlerize", "bowdler"}, {"probate", "probat"}, {"rate", "rate"},
      {"cease", "ceas"},      {"controll", "control"},  {"roll", "roll"},
      {"generalizations", "gener"}, {"oscillators", "oscil"}, {"a", "a"},
      {"giveaway", "giveawai"}, {"movies", "movi"},     {"deals", "deal"},
  };
  for (const auto& [in, out] : pairs) {
    CAPTURE(in);
    CHECK(text::porter_stem(in) == out);
  }
}

TEST_CASE("spam token pipeline") {
  spam::TokenPipelineConfig cfg;
  cfg.add_stopword("the");
  CHECK(spam::normalize_text("The FREE dvds!! http://x.co @someone #Win", cfg) ==
        std::vector<std::string>{"free", "dvd", "win"});
  cfg.stemmer = spam::Stemmer::none;
  CHECK(spam::normalize_text("don't-stop", cfg) == std::vector<std::string>{"don", "t", "stop"});
  cfg.punctuation = spam::Punctuation::strip;
  CHECK(spam::normalize_text("don't-stop", cfg) == std::vector<std::string>{"dontstop"});
  CHECK(spam::parse_stemmer("porter") == spam::Stemmer::porter);
  CHECK_FALSE(spam::parse_stemmer("snowball"));
}

TEST_CASE("keyword ranking orders by frequency then stem") {
  const std::vector<std::vector<std::string>> docs = {{"b", "a", "a"}, {"a", "c"}, {"c"}};
  const auto token = spam::rank_keywords(docs, spam::FrequencyMode::token);
  REQUIRE(token.size() == 3);
  CHECK(token[0] == spam::KeywordCount{"a", 3});
  CHECK(token[1] == spam::KeywordCount{"c", 2});
  CHECK(token[2] == spam::KeywordCount{"b", 1});
  const auto doc = spam::rank_keywords(docs, spam::FrequencyMode::document);
  CHECK(doc[0] == spam::KeywordCount{"a", 2});
  CHECK(doc[1] == spam::KeywordCount{"c", 2});
  CHECK(spam::rank_keywords(docs, spam::FrequencyMode::token, 3) == token);
}

TEST_CASE("annotation agreement") {
  const std::vector<spam::Annotation> rows = {
      {"free", "a1", true}, {"free", "a2", true}, {"dvd", "a1", true},
      {"win", "a1", true},  {"win", "a2", true},  {"win", "a3", false}, {"free", "a3", true},
  };
  // dvd lacks a2 and a3; win is vetoed by a3
  CHECK(spam::spam_stems(rows) == std::set<std::string>{"free"});
  CHECK(spam::spam_stems({}).empty());
}

TEST_CASE("iterative filter audits the final round") {
  std::vector<spam::FilterDoc> docs = {{"1", {"x", "spam"}}, {"2", {"x"}}, {"3", {"y"}}};
  spam::FilterOptions opts;
  opts.top_n = 2;
  const auto part = spam::run_iterative_filter(docs, {"spam"}, opts);
  CHECK(part.spam_tweet_ids == std::vector<std::string>{"1"});
  CHECK(part.residual_tweet_ids == std::vector<std::string>{"2", "3"});
  REQUIRE(part.iterations.size() == 2);
  CHECK(part.iterations[1].matched.empty());
  CHECK(part.iterations[1].residual_before == 2);
  CHECK(part.removal_rounds() == 1);
  CHECK(spam::partition_json(part) == spam::partition_json(spam::run_iterative_filter(docs, {"spam"}, opts)));
}
