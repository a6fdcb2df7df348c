#include "tweetlab/pipeline.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tweetlab/csv.hpp"
#include "tweetlab/extrapolate.hpp"
#include "tweetlab/sentiment.hpp"
#include "tweetlab/timeline.hpp"

namespace tweetlab::pipeline {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::sentiment: return "sentiment";
    case Stage::spamfilter: return "spamfilter";
    case Stage::botscore: return "botscore";
    case Stage::dacmap: return "dacmap";
    case Stage::diffusion: return "diffusion";
    case Stage::timeline: return "timeline";
  }
  return "ingest";
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::set<std::string> tag_set(const std::vector<std::string>& items) {
  std::set<std::string> out;
  for (auto s : items) {
    s = to_lower_ascii(trim(s));
    while (!s.empty() && s.front() == '#') s.erase(s.begin());
    if (!s.empty()) out.insert(s);
  }
  return out;
}

template <class T, class Parse>
T parse_enum(const KeyValueConfig& cfg, const std::string& key, T fallback, Parse parse) {
  const auto v = cfg.get(key);
  if (!v) return fallback;
  if (const auto p = parse(*v)) return *p;
  throw ConfigError("config key '" + key + "': unknown value '" + *v + "'");
}

std::size_t positive_size(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<long long>(fallback));
  if (v < 1) throw ConfigError("config key '" + key + "' must be at least 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig rc;
  rc.inputs = cfg.get_path_list("input");
  if (const auto schema = cfg.get("schema")) {
    if (*schema == "flat" || *schema == "twitter") {
      rc.schema = ingest::SchemaConfig::preset(*schema);
    } else {
      const auto path = cfg.get_path("schema");
      if (!fs::exists(*path)) throw ConfigError("schema file not found: " + path->string());
      rc.schema = ingest::SchemaConfig::load(*path);
    }
  }
  auto window = [&](const char* key, std::optional<Timestamp>& slot) {
    if (const auto v = cfg.get(key)) {
      const auto t = parse_timestamp(*v);
      if (!t) throw ConfigError(std::string("config key '") + key + "': bad timestamp '" + *v + "'");
      slot = *t;
    }
  };
  window("window_start", rc.schema.window_start);
  window("window_end", rc.schema.window_end);
  rc.snapshots = cfg.get_path_list("snapshots");
  rc.lexicon = cfg.get_path("lexicon");
  rc.stopwords = cfg.get_path("stopwords");
  rc.annotations = cfg.get_path_list("annotations");
  rc.model = cfg.get_path("model");
  rc.labels = cfg.get_path("labels");

  if (cfg.has("trump_tags")) rc.faction_tags.trump = tag_set(cfg.get_list("trump_tags"));
  if (cfg.has("clinton_tags")) rc.faction_tags.clinton = tag_set(cfg.get_list("clinton_tags"));
  rc.faction_tags.validate();
  if (cfg.has("trump_terms")) rc.candidate_terms.trump = tag_set(cfg.get_list("trump_terms"));
  if (cfg.has("clinton_terms")) rc.candidate_terms.clinton = tag_set(cfg.get_list("clinton_terms"));
  if (cfg.has("tracked_hashtags")) rc.tracked_hashtags = tag_set(cfg.get_list("tracked_hashtags"));

  dac::LogAxis axis;
  axis.log10_min = static_cast<int>(cfg.get_int("dac_log10_min", axis.log10_min));
  axis.log10_max = static_cast<int>(cfg.get_int("dac_log10_max", axis.log10_max));
  axis.bins_per_decade = static_cast<int>(cfg.get_int("dac_bins_per_decade", axis.bins_per_decade));
  axis.validate();
  rc.x_axis = rc.y_axis = axis;
  rc.dac_population = parse_enum(cfg, "dac_population", rc.dac_population,
                                 [](std::string_view s) -> std::optional<DacPopulation> {
                                   if (s == "all") return DacPopulation::all;
                                   if (s == "active_spammers") return DacPopulation::active_spammers;
                                   return std::nullopt;
                                 });
  rc.diagnostics_scope = parse_enum(cfg, "diagnostics_scope", rc.diagnostics_scope,
                                    [](std::string_view s) -> std::optional<DiagnosticsScope> {
                                      if (s == "all") return DiagnosticsScope::all;
                                      if (s == "spam") return DiagnosticsScope::spam;
                                      return std::nullopt;
                                    });

  rc.bot_threshold = cfg.get_double("bot_threshold", rc.bot_threshold);
  rc.bot_band = cfg.get_double("bot_band", rc.bot_band);
  if (!(rc.bot_threshold > 0 && rc.bot_threshold < 1) || !(rc.bot_band >= 0 && rc.bot_band < 0.5))
    throw ConfigError("bot_threshold must be in (0, 1) and bot_band in [0, 0.5)");
  rc.top_n = positive_size(cfg, "top_n", rc.top_n);
  rc.top_k = positive_size(cfg, "top_k", rc.top_k);
  rc.strata = positive_size(cfg, "strata", rc.strata);
  rc.t_min_days = cfg.get_double("t_min_days", rc.t_min_days);
  if (!(rc.t_min_days > 0)) throw ConfigError("t_min_days must be positive");
  rc.retweet_mode = parse_enum(cfg, "retweet_mode", rc.retweet_mode, ingest::parse_retweet_mode);
  rc.keyword_frequency =
      parse_enum(cfg, "keyword_frequency", rc.keyword_frequency, spam::parse_frequency_mode);
  rc.stemmer = parse_enum(cfg, "stemmer", rc.stemmer, spam::parse_stemmer);
  rc.punctuation = parse_enum(cfg, "punctuation", rc.punctuation, spam::parse_punctuation);

  rc.train.learning_rate = cfg.get_double("train_learning_rate", rc.train.learning_rate);
  rc.train.l2 = cfg.get_double("train_l2", rc.train.l2);
  rc.train.epochs = positive_size(cfg, "train_epochs", rc.train.epochs);
  const auto batch = cfg.get_int("train_batch_size", 0);
  if (batch < 0) throw ConfigError("train_batch_size must be non-negative");
  rc.train.batch_size = static_cast<std::size_t>(batch);

  if (const auto out = cfg.get_path("out")) rc.out = *out;
  rc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(rc.seed)));
  rc.train.seed = rc.seed;
  const auto workers = cfg.get_int("workers", rc.workers);
  if (workers < 0) throw ConfigError("workers must be non-negative");
  rc.workers = static_cast<unsigned>(workers);

  if (const auto unused = cfg.unused_keys(); !unused.empty())
    throw ConfigError("unknown config key '" + unused.front() + "'");
  return rc;
}

RunConfig RunConfig::load(const fs::path& path) { return from_config(KeyValueConfig::load(path)); }

void RunConfig::validate(std::span<const Stage> stages) const {
  auto need = [&](Stage s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
  auto exists = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  if (need(Stage::ingest)) {
    if (inputs.empty()) throw ConfigError("no input archive configured (key 'input')");
    for (const auto& p : inputs) exists(p, "input archive");
    for (const auto& p : snapshots) exists(p, "snapshot file");
  }
  if (need(Stage::sentiment)) {
    if (!lexicon) throw ConfigError("no sentiment lexicon configured (key 'lexicon')");
    exists(*lexicon, "lexicon");
  }
  if (need(Stage::spamfilter)) {
    if (stopwords) exists(*stopwords, "stopword list");
    for (const auto& p : annotations) exists(p, "annotation file");
  }
  if (need(Stage::botscore)) {
    if (!model && !labels) throw ConfigError("bot scoring needs a model or a labels file");
    if (model) exists(*model, "model");
    if (labels) exists(*labels, "labels file");
  }
}

// ---------------------------------------------------------------------------
// Artifact helpers

namespace {

fs::path artifact(const RunConfig& cfg, const char* name) { return cfg.out / name; }

fs::path require(const RunConfig& cfg, const char* name, const char* stage) {
  const auto p = artifact(cfg, name);
  if (!fs::exists(p))
    throw DataError(p.string() + " is missing; run the " + std::string(stage) + " stage first");
  return p;
}

std::vector<ingest::TweetRecord> load_tweets(const RunConfig& cfg) {
  const auto p = require(cfg, "tweets.jsonl", "ingest");
  auto ds = ingest::ingest_buffer(read_text_file(p), ingest::SchemaConfig::flat(), cfg.workers);
  if (ds.stats.malformed > 0) throw DataError(p.string() + " contains malformed lines");
  return std::move(ds.records);
}

ingest::AggregateMap load_users(const RunConfig& cfg) {
  return ingest::read_users_csv(require(cfg, "users.csv", "ingest"));
}

std::vector<sentiment::SentimentScore> load_scores(const RunConfig& cfg,
                                                   const std::vector<ingest::TweetRecord>& records) {
  const auto table = csv::load(require(cfg, "sentiment.csv", "sentiment"));
  const auto c_id = table.column("tweet_id");
  const auto c_pos = table.column("pos");
  const auto c_neg = table.column("neg");
  std::unordered_map<std::string, sentiment::SentimentScore> by_id;
  for (const auto& row : table.rows) {
    sentiment::SentimentScore s;
    s.pos = std::stoi(row.at(c_pos));
    s.neg = std::stoi(row.at(c_neg));
    s.s = s.pos - s.neg;
    by_id[row.at(c_id)] = s;
  }
  std::vector<sentiment::SentimentScore> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = by_id.find(r.tweet_id);
    if (it == by_id.end()) throw DataError("sentiment.csv has no score for tweet " + r.tweet_id);
    out.push_back(it->second);
  }
  return out;
}

std::map<std::string, bot::BotLabel> load_bot_labels(const RunConfig& cfg) {
  const auto table = csv::load(require(cfg, "bot_scores.csv", "botscore"));
  const auto c_id = table.column("author_id");
  const auto c_label = table.column("label");
  std::map<std::string, bot::BotLabel> out;
  for (const auto& row : table.rows) {
    const auto& l = row.at(c_label);
    out[row.at(c_id)] = l == "bot" ? bot::BotLabel::bot
                        : l == "human" ? bot::BotLabel::human
                                       : bot::BotLabel::undecided;
  }
  return out;
}

std::unordered_set<std::string> load_spam_ids(const RunConfig& cfg) {
  const auto table = csv::load(require(cfg, "spam_tweets.csv", "spamfilter"));
  const auto c_id = table.column("tweet_id");
  std::unordered_set<std::string> out;
  for (const auto& row : table.rows) out.insert(row.at(c_id));
  return out;
}

std::vector<std::string> load_active_spammers(const RunConfig& cfg) {
  const auto table = csv::load(require(cfg, "active_spammers.csv", "spamfilter"));
  const auto c_id = table.column("author_id");
  std::vector<std::string> out;
  for (const auto& row : table.rows) out.push_back(row.at(c_id));
  return out;
}

void save_json(const fs::path& path, const ordered_json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string_view split_name(std::size_t split) { return split == 0 ? "at_most_once" : "more_than_once"; }

}  // namespace

// ---------------------------------------------------------------------------
// Stages

void run_ingest(const RunConfig& cfg) {
  auto ds = ingest::ingest_files(cfg.inputs, cfg.schema, cfg.workers);
  for (const auto& p : cfg.snapshots) {
    auto extra = ingest::read_snapshot_file(p, ds.stats);
    ds.snapshots.insert(ds.snapshots.end(), std::make_move_iterator(extra.begin()),
                        std::make_move_iterator(extra.end()));
  }
  const auto users = ingest::aggregate_users_parallel(ds.records, ds.snapshots, cfg.workers);

  std::string tweets;
  for (const auto& r : ds.records) tweets += ingest::to_flat_json(r, nullptr) + "\n";
  write_text_file(artifact(cfg, "tweets.jsonl"), tweets);
  std::string snaps;
  for (const auto& s : ds.snapshots) snaps += ingest::snapshot_to_json(s) + "\n";
  write_text_file(artifact(cfg, "snapshots.jsonl"), snaps);
  ingest::write_users_csv(artifact(cfg, "users.csv"), users);

  std::size_t active = 0;
  for (const auto& [id, u] : users) active += u.active() ? 1 : 0;
  ordered_json j;
  j["lines"] = ds.stats.lines;
  j["accepted"] = ds.stats.accepted;
  j["malformed"] = ds.stats.malformed;
  j["out_of_window"] = ds.stats.out_of_window;
  j["duplicates"] = ds.stats.duplicates;
  j["snapshots"] = ds.snapshots.size();
  j["active_users"] = active;
  j["inactive_users"] = users.size() - active;
  save_json(artifact(cfg, "ingest_stats.json"), j);
}

void run_sentiment(const RunConfig& cfg) {
  const auto lexicon = sentiment::SentimentLexicon::load(*cfg.lexicon);
  const auto records = load_tweets(cfg);
  std::vector<sentiment::SentimentScore> scores(records.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) scores[i] = sentiment::score_tweet(records[i].text, lexicon);
  });
  csv::Writer w({"tweet_id", "pos", "neg", "s"});
  for (std::size_t i = 0; i < records.size(); ++i)
    w.row({records[i].tweet_id, std::to_string(scores[i].pos), std::to_string(scores[i].neg),
           std::to_string(scores[i].s)});
  w.save(artifact(cfg, "sentiment.csv"));

  const auto hist = sentiment::sentiment_histogram(scores);
  csv::Writer h({"s", "count"});
  for (int s = -4; s <= 4; ++s) h.row({std::to_string(s), std::to_string(hist[static_cast<std::size_t>(s + 4)])});
  h.save(artifact(cfg, "sentiment_histogram.csv"));
}

void run_spamfilter(const RunConfig& cfg) {
  spam::TokenPipelineConfig tokens;
  tokens.stemmer = cfg.stemmer;
  tokens.punctuation = cfg.punctuation;
  if (cfg.stopwords) tokens.load_stopwords(*cfg.stopwords);
  std::vector<spam::Annotation> rows;
  for (const auto& p : cfg.annotations) {
    auto more = spam::load_annotations(p);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  const auto annotated = spam::spam_stems(rows);

  const auto records = load_tweets(cfg);
  auto docs = spam::make_docs(records, tokens, cfg.workers);
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(docs.size());
  for (const auto& d : docs) token_lists.push_back(d.tokens);
  const auto ranking = spam::rank_keywords(token_lists, cfg.keyword_frequency, cfg.workers);
  csv::Writer kw({"rank", "stem", "frequency", "annotated_spam"});
  for (std::size_t i = 0; i < ranking.size(); ++i)
    kw.row({std::to_string(i + 1), ranking[i].stem, std::to_string(ranking[i].frequency),
            annotated.count(ranking[i].stem) ? "1" : "0"});
  kw.save(artifact(cfg, "keyword_ranking.csv"));

  spam::FilterOptions opts;
  opts.top_n = cfg.top_n;
  opts.frequency = cfg.keyword_frequency;
  opts.workers = cfg.workers;
  const auto partition = spam::run_iterative_filter(std::move(docs), annotated, opts);
  write_text_file(artifact(cfg, "spam_partition.json"), spam::partition_json(partition));

  const std::unordered_set<std::string> spam_ids(partition.spam_tweet_ids.begin(),
                                                 partition.spam_tweet_ids.end());
  csv::Writer st({"tweet_id", "author_id", "created_at"});
  for (const auto& r : records)
    if (spam_ids.count(r.tweet_id)) st.row({r.tweet_id, r.author_id, std::to_string(r.created_at)});
  st.save(artifact(cfg, "spam_tweets.csv"));

  csv::Writer as({"author_id", "spam_tweets"});
  for (const auto& [id, n] : spam::active_spammers(partition, records)) as.row({id, std::to_string(n)});
  as.save(artifact(cfg, "active_spammers.csv"));
}

void run_botscore(const RunConfig& cfg) {
  const auto users = load_users(cfg);
  std::size_t active = 0;
  for (const auto& [id, u] : users) active += u.active() ? 1 : 0;

  std::optional<bot::LogisticModel> model;
  ordered_json info;
  if (cfg.labels) {
    const auto labels = bot::load_labels(*cfg.labels);
    std::vector<bot::LabeledExample> data;
    std::size_t unusable = 0;
    for (const auto& [id, label] : labels) {
      const auto it = users.find(id);
      if (it == users.end() || !it->second.active()) continue;
      try {
        data.push_back({bot::extract_features(it->second, cfg.t_min_days).values(), label});
      } catch (const InsufficientData&) {
        ++unusable;
      } catch (const InvalidTimeline&) {
        ++unusable;
      }
    }
    info["source"] = "trained";
    info["examples"] = data.size();
    info["unusable_labeled_users"] = unusable;
    if (active > 0) {
      const std::vector<std::string> names(bot::feature_names().begin(), bot::feature_names().end());
      auto result = bot::train(data, cfg.train, names);
      info["epochs"] = result.loss_history.size();
      info["final_loss"] = result.loss_history.empty() ? 0.0 : result.loss_history.back();
      info["learning_rate"] = cfg.train.learning_rate;
      info["stability_bound"] = bot::stability_bound(bot::kFeatureCount, cfg.train.l2);
      model = std::move(result.model);
    }
  } else {
    model = bot::LogisticModel::load(*cfg.model);
    info["source"] = "loaded";
  }
  if (model) model->save(artifact(cfg, "model.json"));

  const auto sample = bot::rank_and_sample_top_k(users, cfg.top_k);
  std::vector<bot::UserBotResult> results;
  if (model && !sample.empty()) {
    bot::ScoreOptions so;
    so.threshold = cfg.bot_threshold;
    so.band = cfg.bot_band;
    so.t_min_days = cfg.t_min_days;
    so.workers = cfg.workers;
    results = bot::score_users(users, sample, *model, so);
  }

  std::vector<std::string> header = {"rank", "author_id", "tweets_posted", "score", "label", "reason"};
  for (const auto& n : bot::feature_names()) header.push_back(n);
  csv::Writer w(header);
  std::array<std::size_t, 3> counts{};
  std::size_t missing_profile = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& agg = users.at(r.author_id);
    std::vector<std::string> row = {std::to_string(i + 1), r.author_id, std::to_string(agg.tweets_posted),
                                    r.score ? format_double(*r.score) : "",
                                    std::string(bot::to_string(r.label)), r.reason};
    if (r.score) {
      for (const auto v : bot::extract_features(agg, cfg.t_min_days).values()) row.push_back(format_double(v));
    } else {
      row.resize(header.size());
    }
    w.row(row);
    ++counts[static_cast<std::size_t>(r.label)];
    if (r.reason == "missing_profile") ++missing_profile;
  }
  w.save(artifact(cfg, "bot_scores.csv"));

  info["sampled"] = results.size();
  info["bot"] = counts[0];
  info["human"] = counts[1];
  info["undecided"] = counts[2];
  info["missing_profile"] = missing_profile;
  save_json(artifact(cfg, "bot_summary.json"), info);
}

void run_dacmap(const RunConfig& cfg) {
  const auto users = load_users(cfg);
  std::vector<std::string> ids;
  if (cfg.dac_population == DacPopulation::active_spammers) {
    ids = load_active_spammers(cfg);
  } else {
    for (const auto& [id, u] : users)
      if (u.active()) ids.push_back(id);
  }
  const auto set = dac::compute_points(users, ids, cfg.retweet_mode, cfg.t_min_days, cfg.workers);

  csv::Writer pts({"author_id", "x", "y", "quadrant"});
  std::vector<dac::DacPoint> points;
  points.reserve(set.points.size());
  for (const auto& p : set.points) {
    pts.row({p.author_id, format_double(p.point.x), format_double(p.point.y),
             std::string(dac::to_string(p.point.quadrant))});
    points.push_back(p.point);
  }
  pts.save(artifact(cfg, "dac_points.csv"));

  const auto map = dac::build_density(points, cfg.x_axis, cfg.y_axis);
  csv::Writer grid({"x_bin_low", "y_bin_low", "x_bin_high", "y_bin_high", "count", "density"});
  for (std::size_t ix = 0; ix < map.nx(); ++ix)
    for (std::size_t iy = 0; iy < map.ny(); ++iy)
      grid.row({format_double(map.x_edges[ix]), format_double(map.y_edges[iy]),
                format_double(map.x_edges[ix + 1]), format_double(map.y_edges[iy + 1]),
                std::to_string(map.counts[ix * map.ny() + iy]),
                format_double(map.density[ix * map.ny() + iy])});
  grid.save(artifact(cfg, "dac_density.csv"));

  const auto q = dac::quadrant_counts(set.points);
  ordered_json j;
  j["population"] = cfg.dac_population == DacPopulation::all ? "all" : "active_spammers";
  j["retweet_mode"] = std::string(ingest::to_string(cfg.retweet_mode));
  j["candidates"] = ids.size();
  j["points"] = set.points.size();
  j["skipped"] = set.skipped;
  j["clipped"] = map.clipped;
  ordered_json quads;
  for (std::size_t i = 0; i < dac::kQuadrantCount; ++i)
    quads[std::string(dac::to_string(static_cast<dac::Quadrant>(i)))] = q[i];
  j["quadrants"] = quads;
  save_json(artifact(cfg, "dac_summary.json"), j);
}

void run_diffusion(const RunConfig& cfg) {
  const auto records = load_tweets(cfg);
  const auto users = load_users(cfg);
  const auto scores = load_scores(cfg, records);
  const auto bot_labels = load_bot_labels(cfg);

  diffusion::GroupLabels groups;
  for (const auto& [id, l] : bot_labels) {
    if (l == bot::BotLabel::bot) groups[id] = diffusion::Group::bot;
    if (l == bot::BotLabel::human) groups[id] = diffusion::Group::human;
  }
  ordered_json summary;

  // Interactions.
  const auto matrix = diffusion::interaction_matrix(records, groups);
  csv::Writer im({"kind", "source_group", "target_group", "count"});
  for (const auto k : {diffusion::InteractionKind::reply, diffusion::InteractionKind::retweet})
    for (const auto s : {diffusion::Group::bot, diffusion::Group::human})
      for (const auto t : {diffusion::Group::bot, diffusion::Group::human})
        im.row({std::string(to_string(k)), std::string(to_string(s)), std::string(to_string(t)),
                std::to_string(matrix.get(k, s, t))});
  im.save(artifact(cfg, "interaction_matrix.csv"));
  summary["excluded_interactions"] = matrix.excluded;

  csv::Writer ic({"group", "kind", "scope", "value", "p"});
  csv::Writer icm({"group", "kind", "scope", "users", "zero_users", "series_points"});
  for (const auto& c : diffusion::interaction_ccdfs(matrix, groups)) {
    const std::string g(to_string(c.group)), k(to_string(c.kind)), s(to_string(c.scope));
    for (std::size_t i = 0; i < c.series.values.size(); ++i)
      ic.row({g, k, s, format_double(c.series.values[i]), format_double(c.series.p[i])});
    icm.row({g, k, s, std::to_string(c.users), std::to_string(c.zero_users),
             std::to_string(c.series.values.size())});
  }
  ic.save(artifact(cfg, "interaction_ccdf.csv"));
  icm.save(artifact(cfg, "interaction_ccdf_populations.csv"));

  // Factions.
  std::map<std::string, diffusion::Faction> factions;
  csv::Writer fw({"author_id", "faction", "clinton_tags", "trump_tags", "bot_label"});
  std::map<std::string, std::map<std::string, std::uint64_t>> faction_counts;
  for (const auto& [id, u] : users) {
    if (!u.active()) continue;
    const auto a = diffusion::assign_faction(u, cfg.faction_tags);
    factions[id] = a.faction;
    const auto bl = bot_labels.find(id);
    const std::string label = bl == bot_labels.end() ? "unsampled" : std::string(bot::to_string(bl->second));
    fw.row({id, std::string(to_string(a.faction)), std::to_string(a.clinton_tags),
            std::to_string(a.trump_tags), label});
    ++faction_counts[std::string(to_string(a.faction))][label];
  }
  fw.save(artifact(cfg, "factions.csv"));
  ordered_json fj;
  for (const auto f : {diffusion::Faction::clinton, diffusion::Faction::trump, diffusion::Faction::none}) {
    ordered_json e;
    std::uint64_t total = 0;
    for (const auto* l : {"bot", "human", "undecided", "unsampled"}) {
      const auto n = faction_counts[std::string(to_string(f))][l];
      e[l] = n;
      total += n;
    }
    e["total"] = total;
    fj[std::string(to_string(f))] = e;
  }
  summary["factions"] = fj;

  // Sentiment volumes.
  const auto vol = diffusion::sentiment_volume_by_group(records, scores, groups, factions, cfg.candidate_terms);
  csv::Writer vw({"faction", "group", "candidate", "s", "count"});
  for (const auto& [key, h] : vol.volume)
    for (int s = -4; s <= 4; ++s)
      vw.row({std::string(to_string(key.faction)), std::string(to_string(key.group)),
              std::string(to_string(key.candidate)), std::to_string(s),
              std::to_string(h[static_cast<std::size_t>(s + 4)])});
  vw.save(artifact(cfg, "sentiment_volume.csv"));
  csv::Writer dw({"faction", "group", "s", "abs_difference"});
  for (const auto& [key, h] : vol.difference)
    for (int s = -4; s <= 4; ++s)
      dw.row({std::string(to_string(key.faction)), std::string(to_string(key.group)), std::to_string(s),
              std::to_string(h[static_cast<std::size_t>(s + 4)])});
  dw.save(artifact(cfg, "sentiment_volume_diff.csv"));

  const auto tagged = diffusion::hashtag_sentiment(records, scores, cfg.tracked_hashtags);
  csv::Writer hw({"hashtag", "s", "count"});
  ordered_json tj;
  for (const auto& [tag, h] : tagged) {
    std::uint64_t neg = 0, pos = 0;
    for (int s = -4; s <= 4; ++s) {
      const auto n = h[static_cast<std::size_t>(s + 4)];
      hw.row({tag, std::to_string(s), std::to_string(n)});
      (s < 0 ? neg : pos) += s == 0 ? 0 : n;
    }
    tj[tag] = {{"negative", neg}, {"positive", pos}};
  }
  hw.save(artifact(cfg, "hashtag_sentiment.csv"));
  summary["tracked_hashtags"] = tj;

  // Sentiment-conditioned feature means.
  std::vector<ingest::TweetRecord> diag_records;
  std::vector<sentiment::SentimentScore> diag_scores;
  std::set<std::string> diag_authors;
  if (cfg.diagnostics_scope == DiagnosticsScope::spam) {
    const auto spam_ids = load_spam_ids(cfg);
    for (std::size_t i = 0; i < records.size(); ++i)
      if (spam_ids.count(records[i].tweet_id)) {
        diag_records.push_back(records[i]);
        diag_scores.push_back(scores[i]);
        diag_authors.insert(records[i].author_id);
      }
  } else {
    diag_records = records;
    diag_scores = scores;
    for (const auto& [id, u] : users)
      if (u.active()) diag_authors.insert(id);
  }
  const auto means = diffusion::sentiment_conditioned_means(diag_records, diag_scores, users,
                                                            cfg.retweet_mode, cfg.workers);
  csv::Writer mw({"feature", "split", "s", "n", "mean", "se"});
  for (const auto& [feature, table] : means.tables)
    for (std::size_t split = 0; split < 2; ++split)
      for (int s = diffusion::kConditionedMin; s <= diffusion::kConditionedMax; ++s) {
        const auto& acc = table[split][static_cast<std::size_t>(s - diffusion::kConditionedMin)];
        mw.row({std::string(to_string(feature)), std::string(split_name(split)), std::to_string(s),
                std::to_string(acc.count()), acc.count() ? format_double(acc.mean()) : "",
                acc.count() ? format_double(acc.standard_error()) : ""});
      }
  mw.save(artifact(cfg, "conditioned_means.csv"));
  summary["conditioned_skipped_tweets"] = means.skipped;

  csv::Writer uw({"feature", "value", "p"});
  for (const auto f : diffusion::kConditionFeatures) {
    std::vector<double> sample;
    for (const auto& id : diag_authors)
      if (const auto v = diffusion::user_feature(users.at(id), f, cfg.retweet_mode))
        sample.push_back(static_cast<double>(*v));
    if (sample.empty()) continue;
    const auto c = diffusion::ccdf(sample);
    for (std::size_t i = 0; i < c.values.size(); ++i)
      uw.row({std::string(to_string(f)), format_double(c.values[i]), format_double(c.p[i])});
  }
  uw.save(artifact(cfg, "user_distributions_ccdf.csv"));

  // Population extrapolation.
  std::map<std::string, std::uint64_t> activity;
  for (const auto& [id, u] : users)
    if (u.active()) activity[id] = u.tweets_posted;
  ordered_json ej;
  csv::Writer sw({"stratum", "users", "tweets", "sampled", "sampled_bots", "bot_rate", "volume_rate",
                  "floored", "estimated_bots", "estimated_bot_tweets"});
  try {
    const auto est = extrapolate::extrapolate_population(bot_labels, activity, cfg.strata);
    ej["status"] = "ok";
    ej["population"] = est.population;
    ej["total_tweets"] = est.total_tweets;
    ej["bot_count"] = est.bot_count;
    ej["bot_fraction"] = est.bot_fraction;
    ej["bot_tweet_volume"] = est.bot_tweet_volume;
    ej["volume_fraction"] = est.volume_fraction;
    const auto floored = std::count_if(est.strata.begin(), est.strata.end(), [](const auto& s) { return s.floored; });
    ej["floored_strata"] = floored;
    // floored strata borrow a rate from more active users
    ej["estimate"] = floored ? "at_least" : "exact_strata";
    for (const auto& s : est.strata)
      sw.row({std::to_string(s.index), std::to_string(s.users), std::to_string(s.tweets),
              std::to_string(s.sampled), std::to_string(s.sampled_bots), format_double(s.bot_rate),
              format_double(s.volume_rate), s.floored ? "1" : "0", format_double(s.estimated_bots),
              format_double(s.estimated_bot_tweets)});
  } catch (const InsufficientStrata& e) {
    ej["status"] = "insufficient_strata";
    ej["message"] = e.what();
  }
  save_json(artifact(cfg, "extrapolation.json"), ej);
  sw.save(artifact(cfg, "extrapolation_strata.csv"));

  save_json(artifact(cfg, "diffusion_summary.json"), summary);
}

void run_timeline(const RunConfig& cfg) {
  const auto records = load_tweets(cfg);
  std::vector<Timestamp> all;
  all.reserve(records.size());
  for (const auto& r : records) all.push_back(r.created_at);
  write_text_file(artifact(cfg, "timeline.csv"), timeline::timeline_csv(timeline::emit_timeline(all)));

  if (fs::exists(artifact(cfg, "spam_tweets.csv"))) {
    const auto spam_ids = load_spam_ids(cfg);
    std::vector<Timestamp> spam;
    for (const auto& r : records)
      if (spam_ids.count(r.tweet_id)) spam.push_back(r.created_at);
    write_text_file(artifact(cfg, "spam_timeline.csv"),
                    timeline::timeline_csv(timeline::emit_timeline(spam)));
  }
}

void run_stage(Stage stage, const RunConfig& cfg) {
  switch (stage) {
    case Stage::ingest: return run_ingest(cfg);
    case Stage::sentiment: return run_sentiment(cfg);
    case Stage::spamfilter: return run_spamfilter(cfg);
    case Stage::botscore: return run_botscore(cfg);
    case Stage::dacmap: return run_dacmap(cfg);
    case Stage::diffusion: return run_diffusion(cfg);
    case Stage::timeline: return run_timeline(cfg);
  }
}

std::string summary_json(const RunConfig& cfg) {
  auto read = [&](const char* name) {
    return nlohmann::ordered_json::parse(read_text_file(require(cfg, name, "run")));
  };
  ordered_json j;
  j["ingest"] = read("ingest_stats.json");

  const auto hist = csv::load(require(cfg, "sentiment_histogram.csv", "sentiment"));
  ordered_json hj;
  std::uint64_t total = 0;
  for (const auto& row : hist.rows) {
    const auto n = std::stoull(row.at(1));
    hj[row.at(0)] = n;
    total += n;
  }
  j["sentiment"] = {{"tweets", total}, {"histogram", hj}};

  const auto part = read("spam_partition.json");
  ordered_json sj;
  sj["keywords"] = part["spam_keywords"];
  sj["spam_tweets"] = part["spam_tweets"];
  sj["residual_tweets"] = part["residual_tweets"];
  sj["removal_rounds"] = part["removal_rounds"];
  sj["iterations"] = part["iterations"].size();
  sj["active_spammers"] = load_active_spammers(cfg).size();
  j["spam"] = sj;

  j["bots"] = read("bot_summary.json");
  j["dac"] = read("dac_summary.json");
  const auto diff = read("diffusion_summary.json");
  j["factions"] = diff["factions"];
  j["tracked_hashtags"] = diff["tracked_hashtags"];
  j["excluded_interactions"] = diff["excluded_interactions"];
  j["extrapolation"] = read("extrapolation.json");
  j["timeline_days"] = csv::load(require(cfg, "timeline.csv", "timeline")).rows.size();
  return j.dump(2) + "\n";
}

void run_pipeline(const RunConfig& cfg) {
  constexpr std::array<Stage, 7> order = {Stage::ingest,  Stage::sentiment, Stage::spamfilter,
                                          Stage::botscore, Stage::dacmap,   Stage::diffusion,
                                          Stage::timeline};
  cfg.validate(order);
  for (const auto stage : order) {
    try {
      run_stage(stage, cfg);
    } catch (const Error& e) {
      throw Error(e.code(), e.category(), "stage " + std::string(to_string(stage)) + ": " + e.what());
    }
  }
  write_text_file(artifact(cfg, "summary.json"), summary_json(cfg));
}

}  // namespace tweetlab::pipeline
