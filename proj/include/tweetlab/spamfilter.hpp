#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tweetlab/ingest.hpp"

namespace tweetlab::spam {

enum class Stemmer { porter, none };

/// split: punctuation separates tokens ("spam-free" -> spam, free).
/// strip: punctuation is deleted inside a whitespace token ("don't" -> dont).
enum class Punctuation { split, strip };

struct TokenPipelineConfig {
  Stemmer stemmer = Stemmer::porter;
  Punctuation punctuation = Punctuation::split;
  bool lowercase = true;
  bool drop_urls = true;      // http://, https://, www.
  bool drop_mentions = true;  // @name

  /// Stored lowercased and trimmed, so lookups compare normalized forms.
  void add_stopword(std::string_view word);
  bool is_stopword(std::string_view word) const { return stopwords_.count(std::string(word)) > 0; }
  std::size_t stopword_count() const { return stopwords_.size(); }

  /// One word per line, `#` comments.
  void load_stopwords(const std::filesystem::path& path);

private:
  std::unordered_set<std::string> stopwords_;
};

std::optional<Stemmer> parse_stemmer(std::string_view s);
std::optional<Punctuation> parse_punctuation(std::string_view s);

/// lowercase -> split -> drop stopwords -> stem. Order of tokens is kept.
std::vector<std::string> normalize_text(std::string_view text, const TokenPipelineConfig& cfg);

enum class FrequencyMode { token, document };

std::optional<FrequencyMode> parse_frequency_mode(std::string_view s);
std::string_view to_string(FrequencyMode m);

struct KeywordCount {
  std::string stem;
  std::uint64_t frequency = 0;

  friend bool operator==(const KeywordCount&, const KeywordCount&) = default;
};

/// Descending frequency, ties by stem.
using KeywordRanking = std::vector<KeywordCount>;

/// Ranks already-normalized documents.
KeywordRanking rank_keywords(std::span<const std::vector<std::string>> docs,
                             FrequencyMode mode = FrequencyMode::token, unsigned workers = 1);

KeywordRanking rank_texts(std::span<const std::string> texts, const TokenPipelineConfig& cfg,
                          FrequencyMode mode = FrequencyMode::token, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Annotations

struct Annotation {
  std::string stem;
  std::string annotator;
  bool is_spam = false;
};

/// CSV with columns stem, annotator_id, is_spam (1/0, true/false, yes/no).
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

/// A stem is spam when every annotator that appears anywhere in `rows`
/// flagged it. With two annotators this is the agreement rule; a stem seen
/// by only one of them is not spam.
std::set<std::string> spam_stems(std::span<const Annotation> rows);

// ---------------------------------------------------------------------------
// Iterative filter

struct IterationAudit {
  std::size_t iteration = 0;  // 1-based
  std::string top_hash;       // FNV-1a over the "stem\tfrequency\n" lines of the top list
  std::size_t top_size = 0;
  std::size_t residual_before = 0;
  std::vector<std::string> matched;  // sorted
  std::size_t tweets_moved = 0;
};

/// Tweet ids are kept in input order in both lists.
struct SpamPartition {
  std::set<std::string> spam_keywords;
  std::vector<std::string> spam_tweet_ids;
  std::vector<std::string> residual_tweet_ids;
  std::vector<IterationAudit> iterations;

  /// Rounds that moved at least one keyword into the spam set.
  std::size_t removal_rounds() const;
};

struct FilterDoc {
  std::string tweet_id;
  std::vector<std::string> tokens;
};

struct FilterOptions {
  std::size_t top_n = 250;
  FrequencyMode frequency = FrequencyMode::token;
  unsigned workers = 1;
};

/// Runs the rank / intersect / remove loop one round at a time so callers
/// can inspect the partition between rounds.
class IterativeFilter {
public:
  IterativeFilter(std::vector<FilterDoc> docs, std::set<std::string> annotated_spam,
                  FilterOptions options);

  /// Performs one round. Returns false once a round finds no annotated stem
  /// in the top list; that final round is still recorded in the audit.
  bool step();
  bool done() const { return done_; }
  void run() {
    while (step()) {
    }
  }

  /// Snapshot of the current state.
  SpamPartition partition() const;
  const std::vector<FilterDoc>& docs() const { return docs_; }

private:
  std::vector<FilterDoc> docs_;
  std::vector<bool> is_spam_;
  std::set<std::string> annotated_;
  FilterOptions options_;
  std::set<std::string> keywords_;
  std::vector<IterationAudit> audits_;
  bool done_ = false;
};

SpamPartition run_iterative_filter(std::vector<FilterDoc> docs,
                                   const std::set<std::string>& annotated_spam,
                                   const FilterOptions& options = {});

/// Normalizes each record's text and runs the filter.
SpamPartition run_iterative_filter(std::span<const ingest::TweetRecord> records,
                                   const std::set<std::string>& annotated_spam,
                                   const TokenPipelineConfig& cfg, const FilterOptions& options = {});

std::vector<FilterDoc> make_docs(std::span<const ingest::TweetRecord> records,
                                 const TokenPipelineConfig& cfg, unsigned workers = 1);

/// Users with two or more spam tweets, with their spam tweet counts.
std::map<std::string, std::uint64_t> active_spammers(const SpamPartition& partition,
                                                     std::span<const ingest::TweetRecord> records);

/// Audit trail and keyword set as JSON text.
std::string partition_json(const SpamPartition& partition);

}  // namespace tweetlab::spam
