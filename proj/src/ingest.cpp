#include "tweetlab/ingest.hpp"

#include <zlib.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "json.hpp"

namespace tweetlab::ingest {

using nlohmann::json;

std::string_view to_string(TweetKind kind) {
  switch (kind) {
    case TweetKind::original: return "original";
    case TweetKind::retweet: return "retweet";
    case TweetKind::reply: return "reply";
  }
  return "original";
}

std::optional<TweetKind> parse_kind(std::string_view s) {
  if (s == "original" || s == "tweet") return TweetKind::original;
  if (s == "retweet") return TweetKind::retweet;
  if (s == "reply") return TweetKind::reply;
  return std::nullopt;
}

// Schema presets --------------------------------------------------------------

SchemaConfig SchemaConfig::flat() {
  SchemaConfig s;
  s.tweet_id = "/id";
  s.author_id = "/author";
  s.created_at = "/created_at";
  s.text = "/text";
  s.hashtags = "/hashtags";
  s.kind = "/kind";
  s.target = "/target";
  s.retweet_count = "/retweet_count";
  s.geo = "/geo";
  s.user_followers = "/user/followers";
  s.user_friends = "/user/friends";
  s.user_statuses = "/user/statuses";
  s.user_created_at = "/user/created_at";
  s.user_default_profile = "/user/default_profile";
  s.user_screen_name = "/user/screen_name";
  s.user_retweets_received = "/user/retweets_received";
  return s;
}

SchemaConfig SchemaConfig::twitter() {
  SchemaConfig s;
  s.tweet_id = "/id_str";
  s.author_id = "/user/id_str";
  s.created_at = "/created_at";
  s.text = "/text";
  s.hashtags = "/entities/hashtags";
  s.retweet_target = "/retweeted_status/user/id_str";
  s.reply_target = "/in_reply_to_user_id_str";
  s.retweet_count = "/retweet_count";
  s.geo = "/coordinates";
  s.user_followers = "/user/followers_count";
  s.user_friends = "/user/friends_count";
  s.user_statuses = "/user/statuses_count";
  s.user_created_at = "/user/created_at";
  s.user_default_profile = "/user/default_profile";
  s.user_screen_name = "/user/screen_name";
  return s;
}

SchemaConfig SchemaConfig::preset(std::string_view name) {
  if (name == "flat") return flat();
  if (name == "twitter") return twitter();
  throw ConfigError("unknown schema preset '" + std::string(name) + "'");
}

SchemaConfig SchemaConfig::from_config(const KeyValueConfig& cfg) {
  SchemaConfig s = preset(cfg.get_or("preset", "flat"));
  auto field = [&](const char* key, std::string& slot) {
    if (auto v = cfg.get(key)) slot = *v;
  };
  field("tweet_id", s.tweet_id);
  field("author_id", s.author_id);
  field("created_at", s.created_at);
  field("text", s.text);
  field("hashtags", s.hashtags);
  field("kind", s.kind);
  field("target", s.target);
  field("retweet_target", s.retweet_target);
  field("reply_target", s.reply_target);
  field("retweet_count", s.retweet_count);
  field("geo", s.geo);
  field("user_followers", s.user_followers);
  field("user_friends", s.user_friends);
  field("user_statuses", s.user_statuses);
  field("user_created_at", s.user_created_at);
  field("user_default_profile", s.user_default_profile);
  field("user_screen_name", s.user_screen_name);
  field("user_retweets_received", s.user_retweets_received);
  auto window = [&](const char* key, std::optional<Timestamp>& slot) {
    if (auto v = cfg.get(key); v && !v->empty()) {
      slot = parse_timestamp(*v);
      if (!slot) throw ConfigError(std::string("schema key '") + key + "': bad timestamp '" + *v + "'");
    }
  };
  window("window_start", s.window_start);
  window("window_end", s.window_end);
  if (s.tweet_id.empty() || s.author_id.empty() || s.created_at.empty() || s.text.empty())
    throw ConfigError("schema must map tweet_id, author_id, created_at and text");
  for (const auto& k : cfg.unused_keys())
    throw ConfigError("unknown schema key '" + k + "'");
  return s;
}

SchemaConfig SchemaConfig::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

// Parsing ---------------------------------------------------------------------

namespace {

// Reference tokens are kept unescaped so lookups never throw.
struct Pointer {
  std::optional<std::vector<std::string>> ptr;

  explicit Pointer(const std::string& path) {
    if (path.empty()) return;
    try {
      const json::json_pointer parsed(path);
      std::vector<std::string> tokens;
      auto p = parsed;
      while (!p.empty()) {
        tokens.push_back(p.back());
        p.pop_back();
      }
      ptr.emplace(tokens.rbegin(), tokens.rend());
    } catch (const json::exception& e) {
      throw ConfigError("bad JSON pointer '" + path + "': " + e.what());
    }
  }

  // Null values count as absent.
  const json* find(const json& doc) const {
    if (!ptr) return nullptr;
    const json* node = &doc;
    for (const auto& token : *ptr) {
      if (node->is_object()) {
        const auto it = node->find(token);
        if (it == node->end()) return nullptr;
        node = &*it;
      } else if (node->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(token);
        } catch (const std::exception&) {
          return nullptr;
        }
        if (idx >= node->size()) return nullptr;
        node = &(*node)[idx];
      } else {
        return nullptr;
      }
    }
    return node->is_null() ? nullptr : node;
  }
};

struct CompiledSchema {
  Pointer tweet_id, author_id, created_at, text, hashtags, kind, target, retweet_target,
      reply_target, retweet_count, geo, followers, friends, statuses, user_created_at,
      default_profile, screen_name, user_retweets;
  const SchemaConfig& cfg;

  explicit CompiledSchema(const SchemaConfig& s)
      : tweet_id(s.tweet_id), author_id(s.author_id), created_at(s.created_at), text(s.text),
        hashtags(s.hashtags), kind(s.kind), target(s.target), retweet_target(s.retweet_target),
        reply_target(s.reply_target), retweet_count(s.retweet_count), geo(s.geo),
        followers(s.user_followers), friends(s.user_friends), statuses(s.user_statuses),
        user_created_at(s.user_created_at), default_profile(s.user_default_profile),
        screen_name(s.user_screen_name), user_retweets(s.user_retweets_received), cfg(s) {}
};

struct Malformed {
  std::string message;
};

std::optional<std::string> as_id(const json* v) {
  if (!v) return std::nullopt;
  if (v->is_string()) {
    auto s = v->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (v->is_number_unsigned()) return std::to_string(v->get<std::uint64_t>());
  if (v->is_number_integer()) return std::to_string(v->get<std::int64_t>());
  return std::nullopt;
}

std::optional<std::uint64_t> as_count(const json* v) {
  if (!v) return std::nullopt;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer()) {
    const auto i = v->get<std::int64_t>();
    if (i < 0) throw Malformed{"negative count"};
    return static_cast<std::uint64_t>(i);
  }
  if (v->is_string()) {
    const auto s = v->get<std::string>();
    std::uint64_t out = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    if (ec == std::errc() && p == end) return out;
  }
  throw Malformed{"expected a non-negative integer"};
}

std::optional<Timestamp> as_time(const json* v) {
  if (!v) return std::nullopt;
  if (v->is_number_integer()) return v->get<std::int64_t>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw Malformed{"non-finite timestamp"};
    return static_cast<Timestamp>(std::floor(d));
  }
  if (v->is_string()) {
    if (auto t = parse_timestamp(v->get<std::string>())) return t;
  }
  throw Malformed{"unparseable timestamp"};
}

bool as_flag(const json* v) {
  if (!v) return false;
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_number()) return v->get<double>() != 0.0;
  if (v->is_string()) {
    const auto s = to_lower_ascii(v->get<std::string>());
    return !(s.empty() || s == "false" || s == "0");
  }
  if (v->is_object() || v->is_array()) return !v->empty();
  return false;
}

std::string normalize_hashtag(std::string_view tag) {
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return to_lower_ascii(trim(tag));
}

void push_unique(std::vector<std::string>& tags, std::string tag) {
  if (tag.empty()) return;
  for (const auto& t : tags)
    if (t == tag) return;
  tags.push_back(std::move(tag));
}

std::string require_id(const Pointer& p, const json& doc, const char* name) {
  auto v = as_id(p.find(doc));
  if (!v) throw Malformed{std::string("missing ") + name};
  return *v;
}

ParseResult parse_compiled(std::string_view line, const CompiledSchema& schema) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    return ParseFailure{ParseError::malformed_record, std::string("bad JSON: ") + e.what()};
  }
  if (!doc.is_object()) return ParseFailure{ParseError::malformed_record, "record is not an object"};

  try {
    ParsedLine out;
    TweetRecord& r = out.record;
    r.tweet_id = require_id(schema.tweet_id, doc, "tweet_id");
    r.author_id = require_id(schema.author_id, doc, "author_id");
    const auto created = as_time(schema.created_at.find(doc));
    if (!created) throw Malformed{"missing created_at"};
    r.created_at = *created;
    const json* text = schema.text.find(doc);
    if (!text || !text->is_string()) throw Malformed{"missing text"};
    r.text = text->get<std::string>();

    if (schema.kind.ptr) {
      const json* k = schema.kind.find(doc);
      if (!k || !k->is_string()) throw Malformed{"missing kind"};
      const auto kind = parse_kind(k->get<std::string>());
      if (!kind) throw Malformed{"unknown kind '" + k->get<std::string>() + "'"};
      r.kind = *kind;
      r.target_author_id = as_id(schema.target.find(doc));
    } else if (auto rt = as_id(schema.retweet_target.find(doc))) {
      r.kind = TweetKind::retweet;
      r.target_author_id = std::move(rt);
    } else if (auto rp = as_id(schema.reply_target.find(doc))) {
      r.kind = TweetKind::reply;
      r.target_author_id = std::move(rp);
    }
    if (r.kind != TweetKind::original && !r.target_author_id)
      throw Malformed{std::string(to_string(r.kind)) + " without target_author_id"};
    if (r.kind == TweetKind::original && r.target_author_id)
      throw Malformed{"original tweet with target_author_id"};

    if (const json* tags = schema.hashtags.find(doc)) {
      if (!tags->is_array()) throw Malformed{"hashtags is not an array"};
      for (const auto& t : *tags) {
        if (t.is_string()) {
          push_unique(r.hashtags, normalize_hashtag(t.get<std::string>()));
        } else if (t.is_object() && t.contains("text") && t["text"].is_string()) {
          push_unique(r.hashtags, normalize_hashtag(t["text"].get<std::string>()));
        } else {
          throw Malformed{"bad hashtag entry"};
        }
      }
    } else {
      r.hashtags = hashtags_from_text(r.text);
    }

    r.retweet_count = as_count(schema.retweet_count.find(doc));
    r.has_geo = as_flag(schema.geo.find(doc));

    if (const json* followers = schema.followers.find(doc)) {
      ProfileSnapshot s;
      s.author_id = r.author_id;
      s.observed_at = r.created_at;
      s.followers = *as_count(followers);
      const auto friends = as_count(schema.friends.find(doc));
      const auto statuses = as_count(schema.statuses.find(doc));
      const auto created_acct = as_time(schema.user_created_at.find(doc));
      if (!friends || !statuses || !created_acct)
        throw Malformed{"incomplete user object"};
      s.friends = *friends;
      s.statuses_total = *statuses;
      s.account_created_at = *created_acct;
      if (s.account_created_at > s.observed_at)
        throw Malformed{"account created after the tweet"};
      s.is_default_profile = as_flag(schema.default_profile.find(doc));
      if (const json* name = schema.screen_name.find(doc); name && name->is_string())
        s.screen_name = name->get<std::string>();
      s.retweets_received = as_count(schema.user_retweets.find(doc));
      out.snapshot = std::move(s);
    }

    if ((schema.cfg.window_start && r.created_at < *schema.cfg.window_start) ||
        (schema.cfg.window_end && r.created_at > *schema.cfg.window_end))
      return ParseFailure{ParseError::out_of_window, "created_at outside collection window"};
    return out;
  } catch (const Malformed& m) {
    return ParseFailure{ParseError::malformed_record, m.message};
  } catch (const json::exception& e) {
    return ParseFailure{ParseError::malformed_record, e.what()};
  }
}

bool is_tag_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

ParseResult parse_tweet_line(std::string_view line, const SchemaConfig& schema) {
  const CompiledSchema compiled(schema);
  return parse_compiled(line, compiled);
}

std::vector<std::string> hashtags_from_text(std::string_view text) {
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    if (i > 0 && is_tag_char(static_cast<unsigned char>(text[i - 1]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_tag_char(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i + 1) push_unique(tags, to_lower_ascii(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  return tags;
}

// Archive reading -------------------------------------------------------------

std::string read_archive(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (!file) throw DataError("cannot open archive " + path.string());
  std::string data;
  std::vector<char> chunk(1 << 20);
  while (true) {
    const int n = gzread(file, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int errnum = 0;
      const std::string msg = gzerror(file, &errnum);
      gzclose(file);
      throw DataError("read error in " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    data.append(chunk.data(), static_cast<std::size_t>(n));
  }
  gzclose(file);
  return data;
}

Dataset ingest_buffer(std::string_view data, const SchemaConfig& schema, unsigned workers) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    auto end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    const auto line = trim(data.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }

  const CompiledSchema compiled(schema);
  std::vector<ParseResult> results(lines.size(), ParseFailure{ParseError::malformed_record, {}});
  parallel_for(lines.size(), workers, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) results[i] = parse_compiled(lines[i], compiled);
  });

  Dataset ds;
  ds.stats.lines = lines.size();
  std::unordered_set<std::string> seen;
  seen.reserve(lines.size());
  ds.records.reserve(lines.size());
  for (auto& result : results) {
    if (auto* fail = std::get_if<ParseFailure>(&result)) {
      if (fail->error == ParseError::malformed_record)
        ++ds.stats.malformed;
      else
        ++ds.stats.out_of_window;
      continue;
    }
    auto& parsed = std::get<ParsedLine>(result);
    if (!seen.insert(parsed.record.tweet_id).second) {
      ++ds.stats.duplicates;
      continue;
    }
    if (parsed.snapshot) ds.snapshots.push_back(std::move(*parsed.snapshot));
    ds.records.push_back(std::move(parsed.record));
  }
  ds.stats.accepted = ds.records.size();
  ds.stats.snapshots = ds.snapshots.size();
  return ds;
}

Dataset ingest_files(const std::vector<std::filesystem::path>& paths, const SchemaConfig& schema,
                     unsigned workers) {
  std::string all;
  for (const auto& p : paths) {
    auto chunk = read_archive(p);
    all += chunk;
    if (!chunk.empty() && chunk.back() != '\n') all.push_back('\n');
  }
  return ingest_buffer(all, schema, workers);
}

// Flat writer -----------------------------------------------------------------

std::string to_flat_json(const TweetRecord& r, const ProfileSnapshot* s) {
  nlohmann::ordered_json j;
  j["id"] = r.tweet_id;
  j["author"] = r.author_id;
  j["created_at"] = r.created_at;
  j["text"] = r.text;
  j["hashtags"] = r.hashtags;
  j["kind"] = std::string(to_string(r.kind));
  if (r.target_author_id) j["target"] = *r.target_author_id;
  if (r.retweet_count) j["retweet_count"] = *r.retweet_count;
  j["geo"] = r.has_geo;
  if (s) {
    nlohmann::ordered_json u;
    u["followers"] = s->followers;
    u["friends"] = s->friends;
    u["statuses"] = s->statuses_total;
    u["created_at"] = s->account_created_at;
    u["default_profile"] = s->is_default_profile;
    u["screen_name"] = s->screen_name;
    if (s->retweets_received) u["retweets_received"] = *s->retweets_received;
    j["user"] = std::move(u);
  }
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

void write_flat_archive(const std::filesystem::path& path, const Dataset& dataset) {
  // Embedded snapshots are keyed by (author, observed_at); the first wins.
  std::map<std::pair<std::string, Timestamp>, const ProfileSnapshot*> by_key;
  for (const auto& s : dataset.snapshots) by_key.emplace(std::make_pair(s.author_id, s.observed_at), &s);
  std::string out;
  for (const auto& r : dataset.records) {
    const auto it = by_key.find({r.author_id, r.created_at});
    out += to_flat_json(r, it == by_key.end() ? nullptr : it->second);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

std::string snapshot_to_json(const ProfileSnapshot& s) {
  nlohmann::ordered_json u;
  u["author"] = s.author_id;
  u["observed_at"] = s.observed_at;
  u["followers"] = s.followers;
  u["friends"] = s.friends;
  u["statuses"] = s.statuses_total;
  u["created_at"] = s.account_created_at;
  u["default_profile"] = s.is_default_profile;
  u["screen_name"] = s.screen_name;
  if (s.retweets_received) u["retweets_received"] = *s.retweets_received;
  return u.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::variant<ProfileSnapshot, ParseFailure> parse_snapshot_line(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    return ParseFailure{ParseError::malformed_record, std::string("bad JSON: ") + e.what()};
  }
  if (!doc.is_object()) return ParseFailure{ParseError::malformed_record, "snapshot is not an object"};
  auto at = [&](const char* key) -> const json* {
    const auto it = doc.find(key);
    return it == doc.end() || it->is_null() ? nullptr : &*it;
  };
  try {
    ProfileSnapshot s;
    auto author = as_id(at("author"));
    const auto observed = as_time(at("observed_at"));
    const auto followers = as_count(at("followers"));
    const auto friends = as_count(at("friends"));
    const auto statuses = as_count(at("statuses"));
    const auto created = as_time(at("created_at"));
    if (!author || !observed || !followers || !friends || !statuses || !created)
      throw Malformed{"incomplete snapshot"};
    if (*created > *observed) throw Malformed{"account created after observation"};
    s.author_id = std::move(*author);
    s.observed_at = *observed;
    s.followers = *followers;
    s.friends = *friends;
    s.statuses_total = *statuses;
    s.account_created_at = *created;
    s.is_default_profile = as_flag(at("default_profile"));
    if (const json* name = at("screen_name"); name && name->is_string())
      s.screen_name = name->get<std::string>();
    s.retweets_received = as_count(at("retweets_received"));
    return s;
  } catch (const Malformed& m) {
    return ParseFailure{ParseError::malformed_record, m.message};
  } catch (const json::exception& e) {
    return ParseFailure{ParseError::malformed_record, e.what()};
  }
}

std::vector<ProfileSnapshot> read_snapshot_file(const std::filesystem::path& path,
                                                IngestStats& stats) {
  const auto data = read_archive(path);
  std::vector<ProfileSnapshot> out;
  for (const auto& raw : split(data, '\n')) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    auto parsed = parse_snapshot_line(line);
    if (auto* s = std::get_if<ProfileSnapshot>(&parsed))
      out.push_back(std::move(*s));
    else
      ++stats.malformed;
  }
  stats.snapshots += out.size();
  return out;
}

}  // namespace tweetlab::ingest
