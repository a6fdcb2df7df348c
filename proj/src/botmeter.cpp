#include "tweetlab/botmeter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "tweetlab/csv.hpp"
#include "tweetlab/rng.hpp"

namespace tweetlab::bot {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "default_profile",       "geo_absence",      "tweets_per_day",     "retweet_ratio",
      "follower_friend_ratio", "account_age_days", "username_randomness"};
  return names;
}

std::vector<double> BotFeatureVector::values() const {
  return {default_profile,       geo_absence,      tweets_per_day,     retweet_ratio,
          follower_friend_ratio, account_age_days, username_randomness};
}

double username_randomness(std::string_view name) {
  if (name.empty()) throw EmptyName("username is empty");
  std::array<std::size_t, 256> counts{};
  for (const char c : name) ++counts[static_cast<unsigned char>(c)];
  const double n = static_cast<double>(name.size());
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // avoid -0
}

BotFeatureVector extract_features(const ingest::UserAggregate& agg, double t_min_days) {
  if (!agg.active()) throw InsufficientData(agg.author_id + ": no authored tweets");
  if (!agg.latest_observed || agg.followers.empty || agg.friends.empty)
    throw InsufficientData(agg.author_id + ": no profile snapshot");
  if (agg.screen_name.empty()) throw InsufficientData(agg.author_id + ": no screen name");

  const double t = ingest::activity_period_days(agg, t_min_days);
  const double posted = static_cast<double>(agg.tweets_posted);
  BotFeatureVector f;
  f.default_profile = agg.is_default_profile ? 1.0 : 0.0;
  f.geo_absence = 1.0 - agg.geo_tweet_fraction();
  f.tweets_per_day = posted / t;
  f.retweet_ratio = static_cast<double>(agg.retweets_made) / posted;
  f.follower_friend_ratio =
      (1.0 + static_cast<double>(agg.followers.max)) / (1.0 + static_cast<double>(agg.friends.max));
  f.account_age_days = t;
  f.username_randomness = username_randomness(agg.screen_name);
  return f;
}

// ---------------------------------------------------------------------------

void LogisticModel::validate() const {
  const auto d = weights.size();
  if (mean.size() != d || stddev.size() != d || (!features.empty() && features.size() != d))
    throw ModelMismatch("model vectors have inconsistent lengths");
  for (const auto s : stddev)
    if (!(s > 0.0) || !std::isfinite(s)) throw ModelMismatch("model stddev must be positive");
  for (const auto w : weights)
    if (!std::isfinite(w)) throw ModelMismatch("model weight is not finite");
  if (!std::isfinite(bias)) throw ModelMismatch("model bias is not finite");
}

std::string LogisticModel::to_json() const {
  nlohmann::ordered_json j;
  j["features"] = features;
  j["weights"] = weights;
  j["bias"] = bias;
  j["mean"] = mean;
  j["stddev"] = stddev;
  return j.dump(2) + "\n";
}

LogisticModel LogisticModel::from_json(std::string_view text) {
  LogisticModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.features = j.value("features", std::vector<std::string>{});
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.stddev = j.at("stddev").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  m.validate();
  return m;
}

LogisticModel LogisticModel::load(const std::filesystem::path& path) {
  return from_json(read_text_file(path));
}

void LogisticModel::save(const std::filesystem::path& path) const { write_text_file(path, to_json()); }

double sigmoid(double z) {
  z = std::clamp(z, -kLogitClamp, kLogitClamp);
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double logit(std::span<const double> x, const LogisticModel& m) {
  double z = m.bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += m.weights[i] * (x[i] - m.mean[i]) / m.stddev[i];
  return z;
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double raw_sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double score(std::span<const double> x, const LogisticModel& model) {
  if (x.size() != model.dimension() || model.mean.size() != x.size() || model.stddev.size() != x.size())
    throw ModelMismatch("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                        std::to_string(model.dimension()));
  return sigmoid(logit(x, model));
}

double score(const BotFeatureVector& f, const LogisticModel& model) {
  const auto v = f.values();
  return score(std::span<const double>(v), model);
}

std::string_view to_string(BotLabel l) {
  switch (l) {
    case BotLabel::bot: return "bot";
    case BotLabel::human: return "human";
    case BotLabel::undecided: return "undecided";
  }
  return "undecided";
}

BotLabel classify(double s, double threshold, double band) {
  if (s > threshold + band) return BotLabel::bot;
  if (s < threshold - band) return BotLabel::human;
  return BotLabel::undecided;
}

// ---------------------------------------------------------------------------

void fit_normalization(std::span<const LabeledExample> data, std::vector<double>& mean,
                       std::vector<double>& stddev) {
  const std::size_t d = data.empty() ? 0 : data.front().x.size();
  mean.assign(d, 0.0);
  stddev.assign(d, 0.0);
  const double n = static_cast<double>(data.size());
  for (const auto& e : data)
    for (std::size_t i = 0; i < d; ++i) mean[i] += e.x[i];
  for (auto& m : mean) m /= n;
  for (const auto& e : data)
    for (std::size_t i = 0; i < d; ++i) stddev[i] += (e.x[i] - mean[i]) * (e.x[i] - mean[i]);
  for (auto& s : stddev) {
    s = std::sqrt(s / n);
    if (!(s > 1e-12)) s = 1.0;
  }
}

double loss_and_gradient(const LogisticModel& model, std::span<const LabeledExample> data,
                         double l2, std::vector<double>& grad_w, double& grad_b) {
  const std::size_t d = model.dimension();
  grad_w.assign(d, 0.0);
  grad_b = 0.0;
  double loss = 0.0;
  std::vector<double> xn(d);
  for (const auto& e : data) {
    double z = model.bias;
    for (std::size_t i = 0; i < d; ++i) {
      xn[i] = (e.x[i] - model.mean[i]) / model.stddev[i];
      z += model.weights[i] * xn[i];
    }
    loss += softplus(z) - (e.label ? z : 0.0);
    const double r = raw_sigmoid(z) - e.label;
    for (std::size_t i = 0; i < d; ++i) grad_w[i] += r * xn[i];
    grad_b += r;
  }
  const double n = static_cast<double>(data.size());
  loss /= n;
  grad_b /= n;
  double reg = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    grad_w[i] = grad_w[i] / n + l2 * model.weights[i];
    reg += model.weights[i] * model.weights[i];
  }
  return loss + 0.5 * l2 * reg;
}

double stability_bound(std::size_t dimension, double l2) {
  // Hessian of the mean log-loss is at most (1/4) E[x x^T] over the
  // augmented standardized vector, whose trace is d + 1.
  return 2.0 / (static_cast<double>(dimension + 1) / 4.0 + l2);
}

TrainResult train(std::span<const LabeledExample> data, const TrainOptions& options,
                  std::vector<std::string> names) {
  if (data.size() < 2) throw DegenerateData("training needs at least two examples");
  const std::size_t d = data.front().x.size();
  std::size_t positives = 0;
  for (const auto& e : data) {
    if (e.x.size() != d) throw ModelMismatch("training examples differ in dimension");
    if (e.label != 0 && e.label != 1) throw DegenerateData("labels must be 0 or 1");
    for (const auto v : e.x)
      if (!std::isfinite(v)) throw NonFinite("training feature is not finite");
    positives += static_cast<std::size_t>(e.label);
  }
  if (positives == 0 || positives == data.size())
    throw DegenerateData("training data contains a single class");
  if (!(options.learning_rate > 0) || !(options.l2 >= 0))
    throw ConfigError("learning rate must be positive and l2 non-negative");

  TrainResult out;
  auto& m = out.model;
  if (names.empty())
    for (std::size_t i = 0; i < d; ++i) names.push_back("x" + std::to_string(i));
  if (names.size() != d) throw ModelMismatch("feature names do not match dimension");
  m.features = std::move(names);
  m.weights.assign(d, 0.0);
  fit_normalization(data, m.mean, m.stddev);

  const std::size_t batch =
      options.batch_size == 0 ? data.size() : std::min(options.batch_size, data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  std::vector<double> gw;
  double gb = 0;
  std::vector<LabeledExample> mb;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    if (batch == data.size()) {
      loss_and_gradient(m, data, options.l2, gw, gb);
      for (std::size_t i = 0; i < d; ++i) m.weights[i] -= options.learning_rate * gw[i];
      m.bias -= options.learning_rate * gb;
    } else {
      rng.shuffle(order.begin(), order.end());
      for (std::size_t start = 0; start < order.size(); start += batch) {
        mb.clear();
        for (std::size_t k = start; k < std::min(order.size(), start + batch); ++k)
          mb.push_back(data[order[k]]);
        loss_and_gradient(m, mb, options.l2, gw, gb);
        for (std::size_t i = 0; i < d; ++i) m.weights[i] -= options.learning_rate * gw[i];
        m.bias -= options.learning_rate * gb;
      }
    }
    const double loss = loss_and_gradient(m, data, options.l2, gw, gb);
    if (!std::isfinite(loss))
      throw NonFinite("training diverged at epoch " + std::to_string(epoch + 1) +
                      " (learning rate " + format_double(options.learning_rate) + ")");
    out.loss_history.push_back(loss);
  }
  m.validate();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> rank_and_sample_top_k(const ingest::AggregateMap& users, std::size_t k) {
  std::vector<const ingest::UserAggregate*> active;
  for (const auto& [id, agg] : users)
    if (agg.active()) active.push_back(&agg);
  auto before = [](const ingest::UserAggregate* a, const ingest::UserAggregate* b) {
    if (a->tweets_posted != b->tweets_posted) return a->tweets_posted > b->tweets_posted;
    return a->author_id < b->author_id;
  };
  const std::size_t take = std::min(k, active.size());
  std::partial_sort(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(take), active.end(),
                    before);
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(active[i]->author_id);
  return out;
}

std::vector<UserBotResult> score_users(const ingest::AggregateMap& users,
                                       std::span<const std::string> ids, const LogisticModel& model,
                                       const ScoreOptions& options) {
  model.validate();
  if (model.dimension() != kFeatureCount)
    throw ModelMismatch("model has " + std::to_string(model.dimension()) + " features, expected " +
                        std::to_string(kFeatureCount));
  std::vector<UserBotResult> out(ids.size());
  parallel_for(ids.size(), options.workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& r = out[i];
      r.author_id = ids[i];
      const auto it = users.find(ids[i]);
      if (it == users.end() || !it->second.active()) {
        r.reason = "no_activity";
        continue;
      }
      const auto& agg = it->second;
      if (!agg.latest_observed || agg.screen_name.empty()) {
        r.reason = "missing_profile";
        continue;
      }
      try {
        const double s = score(extract_features(agg, options.t_min_days), model);
        r.score = s;
        r.label = classify(s, options.threshold, options.band);
      } catch (const InvalidTimeline&) {
        r.reason = "invalid_timeline";
      } catch (const InsufficientData&) {
        r.reason = "missing_profile";
      }
    }
  });
  return out;
}

std::map<std::string, int> load_labels(const std::filesystem::path& path) {
  const auto table = csv::load(path);
  const auto c_id = table.column("author_id");
  const auto c_label = table.column("label");
  std::map<std::string, int> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto v = to_lower_ascii(trim(row.at(c_label)));
    int label;
    if (v == "bot" || v == "1") {
      label = 1;
    } else if (v == "human" || v == "0") {
      label = 0;
    } else {
      throw DataError(path.string() + " row " + std::to_string(r + 2) + ": bad label '" + v + "'");
    }
    out[std::string(trim(row.at(c_id)))] = label;
  }
  return out;
}

}  // namespace tweetlab::bot
