#include "tweetlab/spamfilter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "tweetlab/csv.hpp"
#include "tweetlab/porter.hpp"

namespace tweetlab::spam {

void TokenPipelineConfig::add_stopword(std::string_view word) {
  const auto w = to_lower_ascii(trim(word));
  if (!w.empty()) stopwords_.insert(w);
}

void TokenPipelineConfig::load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword list " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    add_stopword(t);
  }
}

std::optional<Stemmer> parse_stemmer(std::string_view s) {
  if (s == "porter") return Stemmer::porter;
  if (s == "none") return Stemmer::none;
  return std::nullopt;
}

std::optional<Punctuation> parse_punctuation(std::string_view s) {
  if (s == "split") return Punctuation::split;
  if (s == "strip") return Punctuation::strip;
  return std::nullopt;
}

std::optional<FrequencyMode> parse_frequency_mode(std::string_view s) {
  if (s == "token") return FrequencyMode::token;
  if (s == "document") return FrequencyMode::document;
  return std::nullopt;
}

std::string_view to_string(FrequencyMode m) {
  return m == FrequencyMode::token ? "token" : "document";
}

namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_url(std::string_view chunk) {
  const auto lower = to_lower_ascii(chunk.substr(0, 8));
  return lower.rfind("http://", 0) == 0 || lower.rfind("https://", 0) == 0 ||
         lower.rfind("www.", 0) == 0;
}

}  // namespace

std::vector<std::string> normalize_text(std::string_view text, const TokenPipelineConfig& cfg) {
  std::vector<std::string> words;
  auto emit = [&](std::string w) {
    if (w.empty()) return;
    if (cfg.lowercase) w = to_lower_ascii(w);
    words.push_back(std::move(w));
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    const auto chunk = text.substr(i, j - i);
    i = j;
    if (chunk.empty()) break;
    if (cfg.drop_urls && is_url(chunk)) continue;
    if (cfg.drop_mentions && chunk.front() == '@') continue;

    if (cfg.punctuation == Punctuation::strip) {
      std::string w;
      for (const char c : chunk)
        if (word_byte(static_cast<unsigned char>(c))) w.push_back(c);
      emit(std::move(w));
    } else {
      std::size_t k = 0;
      while (k < chunk.size()) {
        while (k < chunk.size() && !word_byte(static_cast<unsigned char>(chunk[k]))) ++k;
        std::size_t m = k;
        while (m < chunk.size() && word_byte(static_cast<unsigned char>(chunk[m]))) ++m;
        emit(std::string(chunk.substr(k, m - k)));
        k = m;
      }
    }
  }

  std::vector<std::string> out;
  out.reserve(words.size());
  for (auto& w : words) {
    if (cfg.is_stopword(cfg.lowercase ? w : to_lower_ascii(w))) continue;
    out.push_back(cfg.stemmer == Stemmer::porter ? text::porter_stem(w) : std::move(w));
  }
  return out;
}

namespace {

using Counts = std::unordered_map<std::string, std::uint64_t>;

void count_doc(const std::vector<std::string>& doc, FrequencyMode mode, Counts& counts) {
  if (mode == FrequencyMode::token) {
    for (const auto& t : doc) ++counts[t];
    return;
  }
  std::vector<std::string_view> seen(doc.begin(), doc.end());
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (const auto t : seen) ++counts[std::string(t)];
}

KeywordRanking to_ranking(const Counts& counts) {
  KeywordRanking out;
  out.reserve(counts.size());
  for (const auto& [stem, n] : counts) out.push_back({stem, n});
  std::sort(out.begin(), out.end(), [](const KeywordCount& a, const KeywordCount& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.stem < b.stem;
  });
  return out;
}

// Counts documents selected by `keep`, in parallel chunks merged serially.
template <class Get, class Keep>
KeywordRanking rank_selected(std::size_t n, Get&& get, FrequencyMode mode, unsigned workers,
                             Keep&& keep) {
  workers = resolve_workers(workers);
  std::vector<Counts> partial(workers);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    for (std::size_t i = begin; i < end; ++i)
      if (keep(i)) count_doc(get(i), mode, partial[w]);
  });
  Counts total;
  for (auto& p : partial)
    for (auto& [k, v] : p) total[k] += v;
  return to_ranking(total);
}

}  // namespace

KeywordRanking rank_keywords(std::span<const std::vector<std::string>> docs, FrequencyMode mode,
                             unsigned workers) {
  return rank_selected(
      docs.size(), [&](std::size_t i) -> const std::vector<std::string>& { return docs[i]; }, mode,
      workers, [](std::size_t) { return true; });
}

KeywordRanking rank_texts(std::span<const std::string> texts, const TokenPipelineConfig& cfg,
                          FrequencyMode mode, unsigned workers) {
  std::vector<std::vector<std::string>> docs(texts.size());
  parallel_for(texts.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) docs[i] = normalize_text(texts[i], cfg);
  });
  return rank_keywords(docs, mode, workers);
}

// ---------------------------------------------------------------------------

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  const auto table = csv::load(path);
  const auto c_stem = table.column("stem");
  const auto c_who = table.column("annotator_id");
  const auto c_flag = table.column("is_spam");
  std::vector<Annotation> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto flag = to_lower_ascii(trim(row.at(c_flag)));
    Annotation a;
    a.stem = to_lower_ascii(trim(row.at(c_stem)));
    a.annotator = std::string(trim(row.at(c_who)));
    if (flag == "1" || flag == "true" || flag == "yes") {
      a.is_spam = true;
    } else if (flag == "0" || flag == "false" || flag == "no") {
      a.is_spam = false;
    } else {
      throw DataError(path.string() + " row " + std::to_string(r + 2) + ": bad is_spam '" + flag + "'");
    }
    if (a.stem.empty() || a.annotator.empty())
      throw DataError(path.string() + " row " + std::to_string(r + 2) + ": empty stem or annotator");
    rows.push_back(std::move(a));
  }
  return rows;
}

std::set<std::string> spam_stems(std::span<const Annotation> rows) {
  std::set<std::string> annotators;
  std::map<std::string, std::set<std::string>> flagged_by;
  std::set<std::string> vetoed;
  for (const auto& a : rows) {
    annotators.insert(a.annotator);
    if (a.is_spam) {
      flagged_by[a.stem].insert(a.annotator);
    } else {
      vetoed.insert(a.stem);
    }
  }
  std::set<std::string> out;
  for (const auto& [stem, who] : flagged_by)
    if (!vetoed.count(stem) && who.size() == annotators.size()) out.insert(stem);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t SpamPartition::removal_rounds() const {
  return static_cast<std::size_t>(std::count_if(iterations.begin(), iterations.end(),
                                                [](const IterationAudit& a) { return !a.matched.empty(); }));
}

IterativeFilter::IterativeFilter(std::vector<FilterDoc> docs, std::set<std::string> annotated_spam,
                                 FilterOptions options)
    : docs_(std::move(docs)),
      is_spam_(docs_.size(), false),
      annotated_(std::move(annotated_spam)),
      options_(options) {}

bool IterativeFilter::step() {
  if (done_) return false;

  const auto ranking = rank_selected(
      docs_.size(), [&](std::size_t i) -> const std::vector<std::string>& { return docs_[i].tokens; },
      options_.frequency, options_.workers, [&](std::size_t i) { return !is_spam_[i]; });

  IterationAudit audit;
  audit.iteration = audits_.size() + 1;
  audit.residual_before = static_cast<std::size_t>(std::count(is_spam_.begin(), is_spam_.end(), false));
  audit.top_size = std::min(options_.top_n, ranking.size());
  std::string top;
  for (std::size_t i = 0; i < audit.top_size; ++i) {
    const auto& kc = ranking[i];
    top += kc.stem + '\t' + std::to_string(kc.frequency) + '\n';
    if (annotated_.count(kc.stem)) audit.matched.push_back(kc.stem);
  }
  audit.top_hash = hex64(fnv1a(top));
  std::sort(audit.matched.begin(), audit.matched.end());

  if (audit.matched.empty()) {
    done_ = true;
    audits_.push_back(std::move(audit));
    return false;
  }

  const std::set<std::string> matched(audit.matched.begin(), audit.matched.end());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (is_spam_[i]) continue;
    const auto& t = docs_[i].tokens;
    if (std::any_of(t.begin(), t.end(), [&](const std::string& s) { return matched.count(s) > 0; })) {
      is_spam_[i] = true;
      ++audit.tweets_moved;
    }
  }
  keywords_.insert(matched.begin(), matched.end());
  audits_.push_back(std::move(audit));
  return true;
}

SpamPartition IterativeFilter::partition() const {
  SpamPartition p;
  p.spam_keywords = keywords_;
  p.iterations = audits_;
  for (std::size_t i = 0; i < docs_.size(); ++i)
    (is_spam_[i] ? p.spam_tweet_ids : p.residual_tweet_ids).push_back(docs_[i].tweet_id);
  return p;
}

SpamPartition run_iterative_filter(std::vector<FilterDoc> docs,
                                   const std::set<std::string>& annotated_spam,
                                   const FilterOptions& options) {
  IterativeFilter f(std::move(docs), annotated_spam, options);
  f.run();
  return f.partition();
}

std::vector<FilterDoc> make_docs(std::span<const ingest::TweetRecord> records,
                                 const TokenPipelineConfig& cfg, unsigned workers) {
  std::vector<FilterDoc> docs(records.size());
  parallel_for(records.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      docs[i].tweet_id = records[i].tweet_id;
      docs[i].tokens = normalize_text(records[i].text, cfg);
    }
  });
  return docs;
}

SpamPartition run_iterative_filter(std::span<const ingest::TweetRecord> records,
                                   const std::set<std::string>& annotated_spam,
                                   const TokenPipelineConfig& cfg, const FilterOptions& options) {
  return run_iterative_filter(make_docs(records, cfg, options.workers), annotated_spam, options);
}

std::map<std::string, std::uint64_t> active_spammers(const SpamPartition& partition,
                                                     std::span<const ingest::TweetRecord> records) {
  const std::unordered_set<std::string> spam(partition.spam_tweet_ids.begin(),
                                             partition.spam_tweet_ids.end());
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : records)
    if (spam.count(r.tweet_id)) ++counts[r.author_id];
  std::erase_if(counts, [](const auto& kv) { return kv.second < 2; });
  return counts;
}

std::string partition_json(const SpamPartition& partition) {
  nlohmann::ordered_json j;
  j["spam_keywords"] = partition.spam_keywords;
  j["spam_tweets"] = partition.spam_tweet_ids.size();
  j["residual_tweets"] = partition.residual_tweet_ids.size();
  j["removal_rounds"] = partition.removal_rounds();
  auto& its = j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& a : partition.iterations) {
    nlohmann::ordered_json e;
    e["iteration"] = a.iteration;
    e["top_hash"] = a.top_hash;
    e["top_size"] = a.top_size;
    e["residual_before"] = a.residual_before;
    e["matched"] = a.matched;
    e["tweets_moved"] = a.tweets_moved;
    its.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace tweetlab::spam
