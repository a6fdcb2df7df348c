#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetlab/ingest.hpp"

namespace tweetlab::bot {

inline constexpr std::size_t kFeatureCount = 7;

/// Column order used by models and CSV output.
const std::array<std::string, kFeatureCount>& feature_names();

struct BotFeatureVector {
  double default_profile = 0;        // 0 or 1
  double geo_absence = 1;            // 1 - share of geotagged tweets
  double tweets_per_day = 0;
  double retweet_ratio = 0;          // retweets made / tweets posted
  double follower_friend_ratio = 1;  // (1 + max followers) / (1 + max friends)
  double account_age_days = 1;       // registration to last activity, floored
  double username_randomness = 0;    // bits per character

  std::vector<double> values() const;
  friend bool operator==(const BotFeatureVector&, const BotFeatureVector&) = default;
};

/// Shannon entropy of the character distribution, in bits. Throws EmptyName.
double username_randomness(std::string_view name);

/// Throws InsufficientData when the user has no tweets or no profile
/// snapshot, InvalidTimeline when activity precedes registration.
BotFeatureVector extract_features(const ingest::UserAggregate& agg, double t_min_days = 1.0);

// ---------------------------------------------------------------------------

struct LogisticModel {
  std::vector<std::string> features;
  std::vector<double> weights;
  double bias = 0;
  std::vector<double> mean;
  std::vector<double> stddev;  // all > 0

  std::size_t dimension() const { return weights.size(); }
  /// Throws ModelMismatch when vector sizes disagree or stddev <= 0.
  void validate() const;

  std::string to_json() const;
  static LogisticModel from_json(std::string_view text);
  static LogisticModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Logits are clamped to [-30, 30] so the result stays strictly inside (0, 1).
inline constexpr double kLogitClamp = 30.0;

double sigmoid(double z);

/// sigmoid(w . (x - mean) / stddev + b). Throws ModelMismatch.
double score(std::span<const double> x, const LogisticModel& model);
double score(const BotFeatureVector& f, const LogisticModel& model);

enum class BotLabel { bot, human, undecided };

std::string_view to_string(BotLabel l);

/// bot above threshold + band, human below threshold - band, else undecided.
BotLabel classify(double score, double threshold = 0.5, double band = 0.05);

// ---------------------------------------------------------------------------
// Training

struct LabeledExample {
  std::vector<double> x;
  int label = 0;  // 0 human, 1 bot
};

struct TrainOptions {
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::size_t epochs = 2000;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 1;      // minibatch order
};

struct TrainResult {
  LogisticModel model;
  std::vector<double> loss_history;  // full-data objective after each epoch
};

/// Per-feature mean and population stddev; a zero stddev becomes 1.
void fit_normalization(std::span<const LabeledExample> data, std::vector<double>& mean,
                       std::vector<double>& stddev);

/// Mean log-loss over `data` (raw features, normalized with the model's
/// stats) plus (l2 / 2) |w|^2. Writes the analytic gradient with respect to
/// the weights and bias.
double loss_and_gradient(const LogisticModel& model, std::span<const LabeledExample> data,
                         double l2, std::vector<double>& grad_w, double& grad_b);

/// Gradient descent is monotone in the full-batch objective when the step is
/// below this bound (standardized features, d weights plus a bias).
double stability_bound(std::size_t dimension, double l2);

/// Throws DegenerateData for fewer than two examples or a single class, and
/// NonFinite when the objective diverges.
TrainResult train(std::span<const LabeledExample> data, const TrainOptions& options,
                  std::vector<std::string> feature_names = {});

// ---------------------------------------------------------------------------
// Population helpers

/// Active users by tweets_posted descending, ties by author_id ascending.
std::vector<std::string> rank_and_sample_top_k(const ingest::AggregateMap& users, std::size_t k);

struct UserBotResult {
  std::string author_id;
  std::optional<double> score;
  BotLabel label = BotLabel::undecided;
  std::string reason;  // set when no score could be computed
};

struct ScoreOptions {
  double threshold = 0.5;
  double band = 0.05;
  double t_min_days = 1.0;
  unsigned workers = 1;
};

/// Users without a profile snapshot are undecided with reason
/// "missing_profile"; an inconsistent timeline gives "invalid_timeline".
std::vector<UserBotResult> score_users(const ingest::AggregateMap& users,
                                       std::span<const std::string> ids, const LogisticModel& model,
                                       const ScoreOptions& options);

/// CSV with columns author_id, label where label is bot/human or 1/0.
std::map<std::string, int> load_labels(const std::filesystem::path& path);

}  // namespace tweetlab::bot
