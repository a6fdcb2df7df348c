#include "tweetlab/synth.hpp"

#include <algorithm>
#include <cmath>

#include <zlib.h>

#include "tweetlab/csv.hpp"
#include "tweetlab/ingest.hpp"
#include "tweetlab/rng.hpp"

namespace tweetlab::synth {

namespace {

constexpr std::array<Archetype, kArchetypeCount> kArchetypes = {
    Archetype::traditional_spammer, Archetype::social_spam_bot, Archetype::influential,
    Archetype::hidden_influential, Archetype::common_human};

const std::vector<std::string> kFiller = {
    "today", "people", "vote",  "debate", "news",  "watch", "tonight", "country", "america",
    "state", "night",  "time",  "world",  "video", "live",  "check",   "follow",  "update",
    "rally", "poll",   "media", "story",  "week",  "job",   "plan",    "speech",  "town"};
const std::vector<std::string> kStop = {"the", "a", "is", "to", "and", "of", "for", "in", "on", "this"};
const std::vector<std::string> kSpam = {"win",    "free",   "dvd",    "giveaway", "movies",
                                        "deals",  "horror", "bluray", "ebay",     "offer"};
const std::vector<std::string> kPositive = {"good", "great", "love", "happy", "awesome", "best"};
const std::vector<std::string> kNegative = {"bad", "hate", "terrible", "sad", "awful", "worst"};
const std::vector<std::string> kBoosters = {"very", "really", "so"};
const std::vector<std::string> kNegators = {"not", "never"};
const std::vector<std::string> kGenericTags = {"election2016", "debate", "vote",  "news",
                                               "politics",     "music",  "sports", "usa"};
const std::vector<std::string> kClintonTags = {"hillaryclinton", "imwithher", "nevertrump", "hillary"};
const std::vector<std::string> kTrumpTags = {"donaldtrump", "trump2016", "neverhillary",
                                             "trumppence16", "trump"};
const std::vector<std::string> kFirstNames = {"anna", "mark", "lucy", "john", "sara",
                                              "mike", "emma", "paul", "kate", "dave"};

const std::string& pick(Rng& rng, const std::vector<std::string>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct Draft {
  std::size_t user = 0;
  std::size_t seq = 0;  // per-user order
  ingest::TweetRecord record;
  ingest::ProfileSnapshot snapshot;
};

// Counter trajectories for one user; value(t) interpolates between the first
// and last tweet times so the extrema land exactly on the planted differences.
struct Counters {
  std::uint64_t followers0 = 0, friends0 = 0, statuses0 = 0, retweets0 = 0;
  std::uint64_t d_followers = 0, d_friends = 0, d_statuses = 0, d_retweets = 0;
};

std::uint64_t interpolate(std::uint64_t base, std::uint64_t diff, Timestamp t, Timestamp first,
                          Timestamp last) {
  if (t <= first) return base;
  if (t >= last) return base + diff;
  const auto num = static_cast<long double>(diff) * static_cast<long double>(t - first);
  return base + static_cast<std::uint64_t>(num / static_cast<long double>(last - first));
}

// Splits a target ratio r = (1 + a) / (1 + b) into two non-negative daily
// rates using `base` as the smaller one.
std::pair<double, double> split_ratio(double r, double base) {
  if (r >= 1.0) return {r * (1.0 + base) - 1.0, base};
  return {base, (1.0 + base) / r - 1.0};
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::traditional_spammer: return "traditional_spammer";
    case Archetype::social_spam_bot: return "social_spam_bot";
    case Archetype::influential: return "influential";
    case Archetype::hidden_influential: return "hidden_influential";
    case Archetype::common_human: return "common_human";
  }
  return "common_human";
}

dac::Quadrant planted_quadrant(Archetype a) {
  switch (a) {
    case Archetype::traditional_spammer: return dac::Quadrant::traditional_spammer;
    case Archetype::social_spam_bot: return dac::Quadrant::social_spam_bot;
    case Archetype::influential: return dac::Quadrant::influential;
    case Archetype::hidden_influential: return dac::Quadrant::hidden_influential;
    case Archetype::common_human: return dac::Quadrant::traditional_spammer;
  }
  return dac::Quadrant::traditional_spammer;
}

std::size_t SynthSpec::users() const {
  std::size_t n = 0;
  for (const auto& a : archetypes) n += a.count;
  return n;
}

void SynthSpec::validate() const {
  for (const double p :
       {bot_spam_probability, human_spam_probability, bot_retweet_probability,
        human_retweet_probability, bot_reply_probability, human_reply_probability,
        bot_default_profile_probability, human_default_profile_probability, human_geo_probability,
        faction_probability, homophily})
    if (!is_probability(p)) throw ConfigError("synth: probability outside [0, 1]");
  if (bot_retweet_probability + bot_reply_probability > 1.0 ||
      human_retweet_probability + human_reply_probability > 1.0)
    throw ConfigError("synth: retweet plus reply probability exceeds 1");
  if (!(duration_days > 0)) throw ConfigError("synth: duration_days must be positive");
  for (const auto a : kArchetypes) {
    const auto& s = (*this)[a];
    const std::string name(to_string(a));
    if (!is_probability(s.bot_fraction)) throw ConfigError("synth: " + name + ".bot_fraction outside [0, 1]");
    if (s.tweets_min < 2 || s.tweets_max < s.tweets_min)
      throw ConfigError("synth: " + name + " needs 2 <= tweets_min <= tweets_max");
    if (s.log10_x_min > s.log10_x_max || s.log10_y_min > s.log10_y_max)
      throw ConfigError("synth: " + name + " has an empty planted range");
    const auto q = planted_quadrant(a);
    const bool right = q == dac::Quadrant::social_spam_bot || q == dac::Quadrant::influential;
    const bool up = q == dac::Quadrant::influential || q == dac::Quadrant::hidden_influential;
    const bool x_ok = right ? s.log10_x_min >= 0.0 : s.log10_x_max < 0.0;
    const bool y_ok = up ? s.log10_y_min >= 0.0 : s.log10_y_max < 0.0;
    if (!x_ok || !y_ok) throw ConfigError("synth: " + name + " planted range leaves its quadrant");
  }
}

SynthSpec SynthSpec::defaults() {
  SynthSpec s;
  s.start = from_civil(2016, 9, 16);
  auto set = [&](Archetype a, std::size_t count, double bots, std::size_t tmin, std::size_t tmax,
                 double x0, double x1, double y0, double y1) {
    s[a] = {count, bots, tmin, tmax, x0, x1, y0, y1};
  };
  set(Archetype::traditional_spammer, 60, 0.8, 10, 40, -1.5, -0.3, -1.5, -0.3);
  set(Archetype::social_spam_bot, 80, 0.9, 10, 40, 0.3, 1.5, -1.5, -0.3);
  set(Archetype::influential, 30, 0.1, 5, 20, 0.3, 1.5, 0.3, 1.5);
  set(Archetype::hidden_influential, 20, 0.2, 5, 20, -1.5, -0.3, 0.3, 1.5);
  set(Archetype::common_human, 400, 0.05, 2, 12, std::log10(0.2), std::log10(0.6), std::log10(0.2),
      std::log10(0.6));
  return s;
}

SynthSpec SynthSpec::from_config(const KeyValueConfig& cfg) {
  SynthSpec s = defaults();
  s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(s.seed)));
  if (const auto v = cfg.get("start")) {
    const auto t = parse_timestamp(*v);
    if (!t) throw ConfigError("synth: bad start '" + *v + "'");
    s.start = *t;
  }
  s.duration_days = cfg.get_double("duration_days", s.duration_days);
  auto prob = [&](const char* key, double& slot) { slot = cfg.get_double(key, slot); };
  prob("bot_spam_probability", s.bot_spam_probability);
  prob("human_spam_probability", s.human_spam_probability);
  prob("bot_retweet_probability", s.bot_retweet_probability);
  prob("human_retweet_probability", s.human_retweet_probability);
  prob("bot_reply_probability", s.bot_reply_probability);
  prob("human_reply_probability", s.human_reply_probability);
  prob("bot_default_profile_probability", s.bot_default_profile_probability);
  prob("human_default_profile_probability", s.human_default_profile_probability);
  prob("human_geo_probability", s.human_geo_probability);
  prob("faction_probability", s.faction_probability);
  prob("homophily", s.homophily);
  const auto malformed = cfg.get_int("malformed_lines", 0);
  if (malformed < 0) throw ConfigError("synth: malformed_lines must be non-negative");
  s.malformed_lines = static_cast<std::size_t>(malformed);

  for (const auto a : kArchetypes) {
    auto& spec = s[a];
    const std::string p = std::string(to_string(a)) + ".";
    auto count = [&](const std::string& key, std::size_t& slot) {
      const auto v = cfg.get_int(p + key, static_cast<long long>(slot));
      if (v < 0) throw ConfigError("synth: " + p + key + " must be non-negative");
      slot = static_cast<std::size_t>(v);
    };
    count("count", spec.count);
    count("tweets_min", spec.tweets_min);
    count("tweets_max", spec.tweets_max);
    spec.bot_fraction = cfg.get_double(p + "bot_fraction", spec.bot_fraction);
    spec.log10_x_min = cfg.get_double(p + "log10_x_min", spec.log10_x_min);
    spec.log10_x_max = cfg.get_double(p + "log10_x_max", spec.log10_x_max);
    spec.log10_y_min = cfg.get_double(p + "log10_y_min", spec.log10_y_min);
    spec.log10_y_max = cfg.get_double(p + "log10_y_max", spec.log10_y_max);
  }
  if (const auto unused = cfg.unused_keys(); !unused.empty())
    throw ConfigError("synth: unknown key '" + unused.front() + "'");
  s.validate();
  return s;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

// ---------------------------------------------------------------------------

SynthOutput generate_fixture(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthOutput out;

  struct User {
    PlantedUser planted;
    std::string screen_name;
    Timestamp created = 0;
    bool default_profile = false;
    std::vector<Timestamp> times;
    Counters counters;
    int faction = 0;  // 0 none, 1 clinton, 2 trump
  };
  std::vector<User> users;
  std::vector<std::size_t> bots;
  std::vector<std::size_t> humans;

  const auto span_seconds = static_cast<std::int64_t>(spec.duration_days * kSecondsPerDay);
  for (const auto a : kArchetypes) {
    const auto& as = spec[a];
    // Exactly round(count * bot_fraction) bots per archetype.
    const auto n_bots = static_cast<std::size_t>(std::llround(static_cast<double>(as.count) * as.bot_fraction));
    for (std::size_t i = 0; i < as.count; ++i) {
      User u;
      const std::size_t index = users.size();
      u.planted.author_id = "u" + std::string(6 - std::min<std::size_t>(6, std::to_string(index).size()), '0') +
                            std::to_string(index);
      u.planted.archetype = a;
      u.planted.is_bot = i < n_bots;
      const bool bot = u.planted.is_bot;

      if (bot) {
        const auto len = static_cast<std::size_t>(rng.between(10, 14));
        static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
        for (std::size_t k = 0; k < len; ++k) u.screen_name += alphabet[rng.below(alphabet.size())];
      } else {
        u.screen_name = pick(rng, kFirstNames);
        if (rng.chance(0.3)) u.screen_name += std::to_string(rng.between(1, 9));
      }
      u.default_profile = rng.chance(bot ? spec.bot_default_profile_probability
                                         : spec.human_default_profile_probability);
      const auto age_days = bot ? rng.between(5, 90) : rng.between(365, 3000);
      u.created = spec.start - age_days * 86400 - rng.between(0, 86399);

      const auto n = static_cast<std::size_t>(
          rng.between(static_cast<std::int64_t>(as.tweets_min), static_cast<std::int64_t>(as.tweets_max)));
      while (true) {
        u.times.clear();
        for (std::size_t k = 0; k < n; ++k) u.times.push_back(spec.start + rng.between(0, span_seconds - 1));
        std::sort(u.times.begin(), u.times.end());
        if (u.times.front() < u.times.back()) break;
      }

      if (rng.chance(spec.faction_probability)) u.faction = rng.chance(0.5) ? 1 : 2;
      u.planted.faction = u.faction == 1 ? "clinton" : u.faction == 2 ? "trump" : "none";

      // Planted coordinates, realized as integer counter differences over the
      // activity period the pipeline will measure.
      const double t = std::max(1.0, static_cast<double>(u.times.back() - u.created) / kSecondsPerDay);
      const double x = std::pow(10.0, rng.uniform(as.log10_x_min, as.log10_x_max));
      const double y = std::pow(10.0, rng.uniform(as.log10_y_min, as.log10_y_max));
      const auto [df, dF] = split_ratio(x, std::pow(10.0, rng.uniform(-1.0, 1.0)));
      const auto [drt, dt] = split_ratio(y, std::pow(10.0, rng.uniform(-1.0, 1.0)));
      auto& c = u.counters;
      c.d_followers = static_cast<std::uint64_t>(std::llround(df * t));
      c.d_friends = static_cast<std::uint64_t>(std::llround(dF * t));
      c.d_retweets = static_cast<std::uint64_t>(std::llround(drt * t));
      c.d_statuses = static_cast<std::uint64_t>(std::llround(dt * t));
      c.followers0 = static_cast<std::uint64_t>(rng.between(0, 5000));
      c.friends0 = static_cast<std::uint64_t>(rng.between(0, 2000));
      c.statuses0 = static_cast<std::uint64_t>(rng.between(10, 20000));
      c.retweets0 = static_cast<std::uint64_t>(rng.between(0, 1000));
      auto rate = [&](std::uint64_t d) { return static_cast<double>(d) / t; };
      u.planted.x = (1.0 + rate(c.d_followers)) / (1.0 + rate(c.d_friends));
      u.planted.y = (1.0 + rate(c.d_retweets)) / (1.0 + rate(c.d_statuses));

      (bot ? bots : humans).push_back(index);
      users.push_back(std::move(u));
    }
  }

  auto pick_target = [&](std::size_t self, bool bot) -> std::optional<std::size_t> {
    const bool same = rng.chance(spec.homophily);
    const auto& pool = (same == bot) ? bots : humans;
    if (pool.empty() || (pool.size() == 1 && pool.front() == self)) return std::nullopt;
    while (true) {
      const auto j = pool[rng.below(pool.size())];
      if (j != self) return j;
    }
  };

  auto sentiment_phrase = [&](std::vector<std::string>& words) {
    const auto hits = rng.below(3);
    for (std::uint64_t h = 0; h < hits; ++h) {
      if (rng.chance(0.15)) words.push_back(pick(rng, kNegators));
      if (rng.chance(0.2)) words.push_back(pick(rng, kBoosters));
      words.push_back(pick(rng, rng.chance(0.5) ? kPositive : kNegative));
    }
  };

  std::vector<Draft> drafts;
  for (std::size_t ui = 0; ui < users.size(); ++ui) {
    auto& u = users[ui];
    const bool bot = u.planted.is_bot;
    const bool spammer_type = u.planted.archetype == Archetype::traditional_spammer ||
                              u.planted.archetype == Archetype::social_spam_bot;
    for (std::size_t k = 0; k < u.times.size(); ++k) {
      Draft d;
      d.user = ui;
      d.seq = k;
      auto& r = d.record;
      r.author_id = u.planted.author_id;
      r.created_at = u.times[k];

      const double p_rt = bot ? spec.bot_retweet_probability : spec.human_retweet_probability;
      const double p_re = bot ? spec.bot_reply_probability : spec.human_reply_probability;
      const double roll = rng.uniform();
      std::optional<std::size_t> target;
      if (roll < p_rt + p_re) target = pick_target(ui, bot);
      if (target) r.kind = roll < p_rt ? ingest::TweetKind::retweet : ingest::TweetKind::reply;
      if (target) r.target_author_id = users[*target].planted.author_id;

      std::vector<std::string> words;
      std::vector<std::string> tags;
      const double p_spam = bot ? spec.bot_spam_probability * (spammer_type ? 1.0 : 0.3)
                                : spec.human_spam_probability;
      if (rng.chance(p_spam)) {
        const auto n = rng.between(3, 5);
        for (std::int64_t w = 0; w < n; ++w) words.push_back(pick(rng, kSpam));
        words.push_back(pick(rng, kFiller));
        if (rng.chance(0.5)) words.push_back("http://spam.example/" + std::to_string(rng.below(1000)));
      } else {
        const auto n = rng.between(3, 8);
        for (std::int64_t w = 0; w < n; ++w)
          words.push_back(pick(rng, rng.chance(0.3) ? kStop : kFiller));
        sentiment_phrase(words);
        if (rng.chance(0.35)) words.push_back(rng.chance(0.5) ? "hillary" : "trump");
        if (rng.chance(0.1)) words.push_back(rng.chance(0.5) ? "clinton" : "donald");
      }
      if (u.faction != 0 && rng.chance(0.7))
        tags.push_back(pick(rng, u.faction == 1 ? kClintonTags : kTrumpTags));
      if (rng.chance(0.4)) tags.push_back(pick(rng, kGenericTags));
      rng.shuffle(words.begin(), words.end());

      std::string text;
      if (r.kind == ingest::TweetKind::retweet) text = "RT @" + users[*target].screen_name + ": ";
      if (r.kind == ingest::TweetKind::reply) text = "@" + users[*target].screen_name + " ";
      for (std::size_t w = 0; w < words.size(); ++w) text += (w ? " " : "") + words[w];
      for (const auto& tag : tags) text += " #" + tag;
      if (rng.chance(0.1)) text += rng.chance(0.5) ? " :)" : " :(";
      r.text = text;
      std::sort(tags.begin(), tags.end());
      tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
      r.hashtags = tags;

      if (r.kind != ingest::TweetKind::retweet) {
        const bool popular = u.planted.archetype == Archetype::influential ||
                             u.planted.archetype == Archetype::hidden_influential;
        r.retweet_count = popular ? static_cast<std::uint64_t>(rng.between(0, 40))
                                  : static_cast<std::uint64_t>(rng.chance(0.25) ? rng.between(1, 3) : 0);
      } else {
        r.retweet_count = 0;
      }
      r.has_geo = !bot && rng.chance(spec.human_geo_probability);

      auto& s = d.snapshot;
      const auto first = u.times.front();
      const auto last = u.times.back();
      const auto& c = u.counters;
      s.author_id = r.author_id;
      s.observed_at = r.created_at;
      s.followers = interpolate(c.followers0, c.d_followers, r.created_at, first, last);
      s.friends = interpolate(c.friends0, c.d_friends, r.created_at, first, last);
      s.statuses_total = interpolate(c.statuses0, c.d_statuses, r.created_at, first, last);
      s.retweets_received = interpolate(c.retweets0, c.d_retweets, r.created_at, first, last);
      s.account_created_at = u.created;
      s.is_default_profile = u.default_profile;
      s.screen_name = u.screen_name;
      drafts.push_back(std::move(d));
    }
  }

  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.record.created_at != b.record.created_at) return a.record.created_at < b.record.created_at;
    if (a.user != b.user) return a.user < b.user;
    return a.seq < b.seq;
  });

  const std::size_t n = drafts.size();
  const std::size_t junk = spec.malformed_lines;
  std::size_t next_junk = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& d = drafts[i];
    d.record.tweet_id = "t" + std::string(8 - std::min<std::size_t>(8, std::to_string(i).size()), '0') +
                        std::to_string(i);
    while (next_junk < junk && i == n * (next_junk + 1) / (junk + 1)) {
      out.archive += next_junk % 2 == 0 ? "{\"id\": \"broken\", \"author\": \n" : "not json at all\n";
      ++next_junk;
    }
    out.archive += ingest::to_flat_json(d.record, &d.snapshot);
    out.archive += '\n';
  }
  for (; next_junk < junk; ++next_junk) out.archive += "{\n";
  out.tweets = n;
  for (auto& u : users) out.users.push_back(std::move(u.planted));
  return out;
}

std::string SynthOutput::ground_truth_csv() const {
  csv::Writer w({"author_id", "archetype", "planted_quadrant", "is_bot", "faction", "x", "y"});
  for (const auto& u : users)
    w.row({u.author_id, std::string(to_string(u.archetype)),
           std::string(dac::to_string(planted_quadrant(u.archetype))), u.is_bot ? "1" : "0", u.faction,
           format_double(u.x), format_double(u.y)});
  return w.str();
}

std::string SynthOutput::labels_csv() const {
  csv::Writer w({"author_id", "label"});
  for (const auto& u : users) w.row({u.author_id, u.is_bot ? "bot" : "human"});
  return w.str();
}

void write_maybe_gz(const std::filesystem::path& path, std::string_view text) {
  if (path.extension() != ".gz") {
    write_text_file(path, text);
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  gzFile f = gzopen(path.string().c_str(), "wb9");
  if (!f) throw DataError("cannot write " + path.string());
  std::size_t off = 0;
  while (off < text.size()) {
    const auto chunk = static_cast<unsigned>(std::min<std::size_t>(text.size() - off, 1u << 20));
    if (gzwrite(f, text.data() + off, chunk) != static_cast<int>(chunk)) {
      gzclose(f);
      throw DataError("gzip write failed for " + path.string());
    }
    off += chunk;
  }
  if (gzclose(f) != Z_OK) throw DataError("gzip close failed for " + path.string());
}

void write_fixture(const SynthOutput& out, const std::filesystem::path& dir, bool gzip) {
  write_maybe_gz(dir / (gzip ? "archive.jsonl.gz" : "archive.jsonl"), out.archive);
  write_text_file(dir / "ground_truth.csv", out.ground_truth_csv());
  write_text_file(dir / "labels.csv", out.labels_csv());
}

}  // namespace tweetlab::synth
