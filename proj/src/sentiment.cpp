#include "tweetlab/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "tweetlab/common.hpp"

namespace tweetlab::sentiment {

void SentimentLexicon::add_term(std::string term, int value) {
  if (value == 0 || value < -4 || value > 4)
    throw ConfigError("lexicon term '" + term + "': value must be in [-4,4] and non-zero");
  term = to_lower_ascii(term);
  if (!term.empty() && term.back() == '*') {
    term.pop_back();
    if (term.empty()) throw ConfigError("lexicon: bare '*' entry");
    prefixes_.emplace_back(std::move(term), value);
    std::stable_sort(prefixes_.begin(), prefixes_.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    return;
  }
  terms_[std::move(term)] = value;
}

void SentimentLexicon::add_booster(std::string term, int delta) {
  boosters_[to_lower_ascii(term)] = delta;
}

void SentimentLexicon::add_negator(std::string term) { negators_.insert(to_lower_ascii(term)); }

void SentimentLexicon::add_emoticon(std::string emoticon, int value) {
  if (value < -4 || value > 4) throw ConfigError("emoticon '" + emoticon + "': value out of range");
  emoticons_[std::move(emoticon)] = value;
}

SentimentLexicon SentimentLexicon::parse(std::istream& in) {
  SentimentLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    const auto where = "lexicon line " + std::to_string(line_no);
    if (cols.size() < 2 || cols.size() > 3) throw ConfigError(where + ": expected term<TAB>value[<TAB>kind]");
    const std::string term(trim(cols[0]));
    const std::string kind = cols.size() == 3 ? std::string(trim(cols[2])) : "term";
    char* end = nullptr;
    const std::string value_text(trim(cols[1]));
    const long value = std::strtol(value_text.c_str(), &end, 10);
    if (term.empty() || value_text.empty() || *end != '\0') throw ConfigError(where + ": bad entry");
    if (kind == "term") {
      lex.add_term(term, static_cast<int>(value));
    } else if (kind == "booster") {
      lex.add_booster(term, static_cast<int>(value));
    } else if (kind == "negator") {
      lex.add_negator(term);
    } else if (kind == "emoticon") {
      lex.add_emoticon(term, static_cast<int>(value));
    } else {
      throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  return parse(in);
}

std::optional<int> SentimentLexicon::term_value(std::string_view word) const {
  if (const auto it = terms_.find(std::string(word)); it != terms_.end()) return it->second;
  for (const auto& [prefix, value] : prefixes_)
    if (word.size() >= prefix.size() && word.substr(0, prefix.size()) == prefix) return value;
  return std::nullopt;
}

std::optional<int> SentimentLexicon::booster_delta(std::string_view word) const {
  if (const auto it = boosters_.find(std::string(word)); it != boosters_.end()) return it->second;
  return std::nullopt;
}

bool SentimentLexicon::is_negator(std::string_view word) const {
  return negators_.count(std::string(word)) > 0;
}

std::optional<int> SentimentLexicon::emoticon_value(std::string_view token) const {
  if (const auto it = emoticons_.find(std::string(token)); it != emoticons_.end()) return it->second;
  return std::nullopt;
}

namespace {

bool word_char(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

// Collapses runs of three or more equal letters down to `keep` letters.
std::string collapse_runs(std::string_view w, std::size_t keep) {
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const std::size_t run = j - i;
    out.append(run >= 3 && std::isalpha(static_cast<unsigned char>(w[i])) ? std::min(run, keep) : run,
               w[i]);
    i = j;
  }
  return out;
}

bool has_long_run(std::string_view w) {
  for (std::size_t i = 0; i + 2 < w.size(); ++i)
    if (w[i] == w[i + 1] && w[i] == w[i + 2] && std::isalpha(static_cast<unsigned char>(w[i])))
      return true;
  return false;
}

std::optional<int> lookup_with_spelling(const std::string& word, const SentimentLexicon& lex) {
  if (auto v = lex.term_value(word)) return v;
  if (!has_long_run(word)) return std::nullopt;
  if (auto v = lex.term_value(collapse_runs(word, 2))) return v;
  return lex.term_value(collapse_runs(word, 1));
}

enum class TokenRole { plain, sentiment, emoticon, booster, negator };

struct Token {
  TokenRole role = TokenRole::plain;
  int value = 0;
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const SentimentLexicon& lexicon) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    const auto chunk = text.substr(i, j - i);
    i = j;
    if (lexicon.emoticon_value(chunk)) {
      tokens.emplace_back(chunk);
      continue;
    }
    // Words inside the chunk, split on punctuation other than apostrophes.
    std::size_t k = 0;
    while (k < chunk.size()) {
      while (k < chunk.size() && !word_char(static_cast<unsigned char>(chunk[k]))) ++k;
      std::size_t m = k;
      while (m < chunk.size() && word_char(static_cast<unsigned char>(chunk[m]))) ++m;
      auto word = chunk.substr(k, m - k);
      while (!word.empty() && word.front() == '\'') word.remove_prefix(1);
      while (!word.empty() && word.back() == '\'') word.remove_suffix(1);
      if (!word.empty()) tokens.push_back(to_lower_ascii(word));
      k = m;
    }
  }
  return tokens;
}

SentimentScore score_tweet(std::string_view text, const SentimentLexicon& lexicon) {
  const auto words = tokenize(text, lexicon);
  std::vector<Token> toks(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto& t = toks[i];
    if (auto e = lexicon.emoticon_value(words[i])) {
      t = {TokenRole::emoticon, *e};
    } else if (lexicon.is_negator(words[i])) {
      t = {TokenRole::negator, 0};
    } else if (auto b = lexicon.booster_delta(words[i])) {
      t = {TokenRole::booster, *b};
    } else if (auto v = lookup_with_spelling(words[i], lexicon)) {
      t = {TokenRole::sentiment, *v};
    }
  }

  // Negation: flip the first sentiment word within the next two tokens.
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].role != TokenRole::negator) continue;
    for (std::size_t j = i + 1; j < toks.size() && j <= i + 2; ++j) {
      if (toks[j].role == TokenRole::sentiment) {
        toks[j].value = -toks[j].value;
        break;
      }
    }
  }

  // Boosters: pending delta carries across consecutive boosters only.
  int pending = 0;
  for (auto& t : toks) {
    if (t.role == TokenRole::booster) {
      pending += t.value;
      continue;
    }
    if (t.role == TokenRole::sentiment && pending != 0) {
      const int magnitude = std::max(0, std::abs(t.value) + pending);
      t.value = t.value < 0 ? -magnitude : magnitude;
    }
    pending = 0;
  }

  int best_pos = 0;
  int best_neg = 0;
  for (const auto& t : toks) {
    if (t.role != TokenRole::sentiment && t.role != TokenRole::emoticon) continue;
    if (t.value > 0) best_pos = std::max(best_pos, t.value);
    if (t.value < 0) best_neg = std::max(best_neg, -t.value);
  }
  SentimentScore out;
  out.pos = 1 + std::clamp(best_pos, 0, 4);
  out.neg = 1 + std::clamp(best_neg, 0, 4);
  out.s = out.pos - out.neg;
  return out;
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
  }
  return "neutral";
}

Polarity classify(int s) {
  if (s < -4 || s > 4) throw RangeError("sentiment score " + std::to_string(s) + " outside [-4,4]");
  if (s < 0) return Polarity::negative;
  if (s > 0) return Polarity::positive;
  return Polarity::neutral;
}

SentimentHistogram sentiment_histogram(std::span<const SentimentScore> scores) {
  SentimentHistogram h{};
  for (const auto& sc : scores) ++h.at(static_cast<std::size_t>(sc.s + 4));
  return h;
}

}  // namespace tweetlab::sentiment
