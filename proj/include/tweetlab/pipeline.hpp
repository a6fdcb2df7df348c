#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetlab/botmeter.hpp"
#include "tweetlab/dacmap.hpp"
#include "tweetlab/diffusion.hpp"
#include "tweetlab/ingest.hpp"
#include "tweetlab/kvconfig.hpp"
#include "tweetlab/spamfilter.hpp"

namespace tweetlab::pipeline {

enum class Stage { ingest, sentiment, spamfilter, botscore, dacmap, diffusion, timeline };

std::string_view to_string(Stage s);

/// Users placed on the DAC map.
enum class DacPopulation { all, active_spammers };

/// Tweets feeding the sentiment-conditioned diagnostics and the per-user
/// feature distributions.
enum class DiagnosticsScope { all, spam };

/// Everything a run needs. Relative paths in a config file resolve against
/// the file's directory.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  ingest::SchemaConfig schema = ingest::SchemaConfig::flat();
  std::vector<std::filesystem::path> snapshots;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> stopwords;
  std::vector<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> labels;

  diffusion::FactionTags faction_tags = diffusion::FactionTags::defaults();
  diffusion::CandidateTerms candidate_terms = diffusion::CandidateTerms::defaults();
  std::set<std::string> tracked_hashtags = {"neverhillary", "nevertrump"};

  dac::LogAxis x_axis;
  dac::LogAxis y_axis;
  DacPopulation dac_population = DacPopulation::all;
  DiagnosticsScope diagnostics_scope = DiagnosticsScope::all;

  double bot_threshold = 0.5;
  double bot_band = 0.05;
  std::size_t top_n = 250;
  std::size_t top_k = 50000;
  std::size_t strata = 10;
  double t_min_days = 1.0;
  ingest::RetweetMode retweet_mode = ingest::RetweetMode::in_dataset;
  spam::FrequencyMode keyword_frequency = spam::FrequencyMode::token;
  spam::Stemmer stemmer = spam::Stemmer::porter;
  spam::Punctuation punctuation = spam::Punctuation::split;
  bot::TrainOptions train;

  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  unsigned workers = 1;

  /// Rejects unknown keys and malformed values with ConfigError.
  static RunConfig from_config(const KeyValueConfig& cfg);
  static RunConfig load(const std::filesystem::path& path);

  /// Checks that every path the given stages read exists. Throws ConfigError.
  void validate(std::span<const Stage> stages) const;
};

/// Each stage reads the artifacts of earlier stages from `cfg.out` and
/// writes its own there.
void run_ingest(const RunConfig& cfg);
void run_sentiment(const RunConfig& cfg);
void run_spamfilter(const RunConfig& cfg);
void run_botscore(const RunConfig& cfg);
void run_dacmap(const RunConfig& cfg);
void run_diffusion(const RunConfig& cfg);
void run_timeline(const RunConfig& cfg);

void run_stage(Stage stage, const RunConfig& cfg);

/// All stages in order, then summary.json. Stage errors are rethrown with the
/// stage name prefixed to the message.
void run_pipeline(const RunConfig& cfg);

/// Recomputes summary.json from the artifacts in `cfg.out`.
std::string summary_json(const RunConfig& cfg);

}  // namespace tweetlab::pipeline
