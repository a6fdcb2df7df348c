#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tweetlab::sentiment {

/// Term polarities are signed strengths in [-4, 4] (zero is not allowed):
/// a hit of value v contributes |v| to the positive or negative side, so
/// the final polarity is 1 + strength. A trailing `*` on a term matches any
/// word with that prefix; exact entries win, then the longest prefix.
class SentimentLexicon {
public:
  void add_term(std::string term, int value);
  void add_booster(std::string term, int delta);
  void add_negator(std::string term);
  void add_emoticon(std::string emoticon, int value);

  /// Plain text, one entry per line: `term<TAB>value[<TAB>kind]` where kind is
  /// term (default), booster, negator or emoticon. Lines starting with `#`
  /// are comments.
  static SentimentLexicon parse(std::istream& in);
  static SentimentLexicon load(const std::filesystem::path& path);

  std::optional<int> term_value(std::string_view word) const;
  std::optional<int> booster_delta(std::string_view word) const;
  bool is_negator(std::string_view word) const;
  std::optional<int> emoticon_value(std::string_view token) const;

  std::size_t size() const { return terms_.size() + prefixes_.size(); }

private:
  std::unordered_map<std::string, int> terms_;
  std::vector<std::pair<std::string, int>> prefixes_;  // longest first
  std::unordered_map<std::string, int> boosters_;
  std::unordered_set<std::string> negators_;
  std::unordered_map<std::string, int> emoticons_;
};

struct SentimentScore {
  int pos = 1;  // P+ in [1, 5]
  int neg = 1;  // P- in [1, 5]
  int s = 0;    // pos - neg, in [-4, 4]

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

/// Tokens in scoring order: emoticons are kept whole, words are lowercased
/// with surrounding punctuation and a leading '#' or '@' removed.
std::vector<std::string> tokenize(std::string_view text, const SentimentLexicon& lexicon);

/// Rule order: a negator flips the sign of the next sentiment word within two
/// tokens; boosters directly before a sentiment word add to its magnitude
/// (consecutive boosters stack); the strongest hit per side wins; strengths
/// are clamped to [0, 4]. Emoticons are not negated or boosted. A word with a
/// run of three or more equal letters that is not in the lexicon is retried
/// with the run collapsed to two letters, then to one.
SentimentScore score_tweet(std::string_view text, const SentimentLexicon& lexicon);

enum class Polarity { negative, neutral, positive };

std::string_view to_string(Polarity p);

/// Throws RangeError outside [-4, 4].
Polarity classify(int s);

/// Counts indexed by s + 4.
using SentimentHistogram = std::array<std::uint64_t, 9>;

SentimentHistogram sentiment_histogram(std::span<const SentimentScore> scores);

}  // namespace tweetlab::sentiment
