#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "tweetlab/common.hpp"
#include "tweetlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tweetlab;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string base_config() {
  const auto data = fixtures::repo_data_dir().string();
  return "lexicon = " + data + "/lexicon.tsv\nstopwords = " + data + "/stopwords.txt\nlabels = " +
         (fixtures::data_dir() / "fixture_labels.csv").string() + "\nout = out\n";
}

int run_cli(const std::string& args) {
  const auto cmd = std::string(TWEETLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run config parsing") {
  auto cfg = KeyValueConfig::parse("input = a.jsonl, b.jsonl\ntop_n = 10\nretweet_mode = platform\n"
                                   "trump_tags = #MAGA\nstemmer = none\n",
                                   "/data");
  const auto rc = pipeline::RunConfig::from_config(cfg);
  CHECK(rc.inputs.size() == 2);
  CHECK(rc.inputs[0] == fs::path("/data/a.jsonl"));
  CHECK(rc.top_n == 10);
  CHECK(rc.retweet_mode == ingest::RetweetMode::platform);
  CHECK(rc.faction_tags.trump == std::set<std::string>{"maga"});
  CHECK(rc.stemmer == spam::Stemmer::none);

  CHECK_THROWS_AS(pipeline::RunConfig::from_config(KeyValueConfig::parse("topn = 3\n")), ConfigError);
  CHECK_THROWS_AS(pipeline::RunConfig::from_config(KeyValueConfig::parse("top_n = 0\n")), ConfigError);
  CHECK_THROWS_AS(pipeline::RunConfig::from_config(KeyValueConfig::parse("retweet_mode = both\n")), ConfigError);
  CHECK_THROWS_AS(pipeline::RunConfig::from_config(KeyValueConfig::parse("bot_threshold = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(pipeline::RunConfig::from_config(KeyValueConfig::parse("trump_tags = imwithher\n")),
                  ConfigError);
}

TEST_CASE("a missing lexicon fails before any processing") {
  TempDir tmp("tweetlab_missing_lex");
  std::ofstream(tmp.path / "a.jsonl") << "";
  std::ofstream(tmp.path / "run.conf") << "input = a.jsonl\nlexicon = nope.tsv\nmodel = m.json\n";
  auto rc = pipeline::RunConfig::load(tmp.path / "run.conf");
  rc.out = tmp.path / "out";
  fs::create_directories(rc.out);
  CHECK_THROWS_AS(pipeline::run_pipeline(rc), ConfigError);
  CHECK_FALSE(fs::exists(rc.out / "tweets.jsonl"));
}

TEST_CASE("stages need their inputs") {
  TempDir tmp("tweetlab_stage_order");
  std::ofstream(tmp.path / "run.conf") << base_config();
  auto rc = pipeline::RunConfig::load(tmp.path / "run.conf");
  rc.out = tmp.path / "out";
  fs::create_directories(rc.out);
  CHECK_THROWS_AS(pipeline::run_sentiment(rc), DataError);
}

TEST_CASE("empty input yields empty reports") {
  TempDir tmp("tweetlab_empty_run");
  std::ofstream(tmp.path / "empty.jsonl") << "";
  std::ofstream(tmp.path / "run.conf") << base_config() << "input = empty.jsonl\n";
  auto rc = pipeline::RunConfig::load(tmp.path / "run.conf");
  rc.out = tmp.path / "out";
  fs::create_directories(rc.out);
  pipeline::run_pipeline(rc);
  const auto summary = nlohmann::json::parse(read_text_file(rc.out / "summary.json"));
  CHECK(summary["ingest"]["accepted"] == 0);
  CHECK(summary["spam"]["spam_tweets"] == 0);
  CHECK(summary["bots"]["sampled"] == 0);
  CHECK(summary["extrapolation"]["status"] == "insufficient_strata");
  CHECK(summary["timeline_days"] == 0);
}

TEST_CASE("stage errors carry the stage name") {
  TempDir tmp("tweetlab_bad_model");
  std::ofstream(tmp.path / "model.json") << "{\"weights\": [1]}";
  std::ofstream(tmp.path / "run.conf") << "input = " << (fixtures::data_dir() / "fixture_10k.jsonl.gz").string()
                                       << "\nlexicon = " << (fixtures::repo_data_dir() / "lexicon.tsv").string()
                                       << "\nmodel = model.json\n";
  auto rc = pipeline::RunConfig::load(tmp.path / "run.conf");
  rc.out = tmp.path / "out";
  fs::create_directories(rc.out);
  try {
    pipeline::run_pipeline(rc);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("stage botscore: ", 0) == 0);
  }
}

TEST_CASE("cli exit codes") {
  TempDir tmp("tweetlab_cli_codes");
  const auto out = (tmp.path / "out").string();
  CHECK(run_cli("run -c /nonexistent.conf") == 2);
  CHECK(run_cli("bogus") == 2);
  std::ofstream(tmp.path / "bad.conf") << "input = x.jsonl\nwhat = 1\n";
  CHECK(run_cli("ingest -c " + (tmp.path / "bad.conf").string()) == 2);
  CHECK(run_cli("sentiment -c " + (fixtures::data_dir() / "fixture_run.conf").string() + " -o " + out) == 3);
  CHECK(run_cli("ingest -c " + (fixtures::data_dir() / "fixture_run.conf").string() + " -o " + out) == 0);
  CHECK(fs::exists(tmp.path / "out" / "users.csv"));
  CHECK(run_cli("synth -o " + (tmp.path / "syn").string()) == 0);
  CHECK(fs::exists(tmp.path / "syn" / "ground_truth.csv"));
}
