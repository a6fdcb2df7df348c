#include "tweetlab/common.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tweetlab {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

int month_from_abbrev(std::string_view m) {
  static constexpr std::array<std::string_view, 12> names = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == m) return static_cast<int>(i) + 1;
  return 0;
}

bool valid_clock(int h, int mi, int s) {
  return h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s <= 60;
}

// "+HHMM", "+HH:MM", "Z"
std::optional<int> parse_offset_seconds(std::string_view z) {
  if (z.empty() || z == "Z" || z == "z") return 0;
  if (z[0] != '+' && z[0] != '-') return std::nullopt;
  const int sign = z[0] == '-' ? -1 : 1;
  std::string digits;
  for (char c : z.substr(1))
    if (c != ':') digits.push_back(c);
  if (digits.size() != 4) return std::nullopt;
  int hh = 0, mm = 0;
  if (!parse_int(std::string_view(digits).substr(0, 2), hh) ||
      !parse_int(std::string_view(digits).substr(2, 2), mm))
    return std::nullopt;
  return sign * (hh * 3600 + mm * 60);
}

std::optional<Timestamp> parse_iso(std::string_view s) {
  // YYYY-MM-DD[THH:MM:SS[.fff][zone]]
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0, mo = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
      !parse_int(s.substr(8, 2), d))
    return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  if (s.size() == 10) return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  if ((s[10] != 'T' && s[10] != ' ') || s.size() < 19 || s[13] != ':' || s[16] != ':')
    return std::nullopt;
  int h = 0, mi = 0, sec = 0;
  if (!parse_int(s.substr(11, 2), h) || !parse_int(s.substr(14, 2), mi) ||
      !parse_int(s.substr(17, 2), sec) || !valid_clock(h, mi, sec))
    return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  const auto offset = parse_offset_seconds(s.substr(pos));
  if (!offset) return std::nullopt;
  return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec) - *offset;
}

std::optional<Timestamp> parse_api_form(std::string_view s) {
  // Www Mmm DD HH:MM:SS +ZZZZ YYYY
  std::istringstream in{std::string(s)};
  std::string wday, mon, day, clock, zone, year;
  if (!(in >> wday >> mon >> day >> clock >> zone >> year)) return std::nullopt;
  const int mo = month_from_abbrev(mon);
  int d = 0, y = 0, h = 0, mi = 0, sec = 0;
  if (mo == 0 || !parse_int(day, d) || !parse_int(year, y) || clock.size() != 8) return std::nullopt;
  const std::string_view cv = clock;
  if (!parse_int(cv.substr(0, 2), h) || !parse_int(cv.substr(3, 2), mi) ||
      !parse_int(cv.substr(6, 2), sec) || !valid_clock(h, mi, sec))
    return std::nullopt;
  const auto offset = parse_offset_seconds(zone);
  if (!offset) return std::nullopt;
  return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec) - *offset;
}

}  // namespace

Timestamp from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  using namespace std::chrono;
  const sys_days days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return static_cast<Timestamp>(days.time_since_epoch().count()) * 86400 + hour * 3600 +
         minute * 60 + second;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  Timestamp epoch = 0;
  const auto* end = text.data() + text.size();
  if (auto [ptr, ec] = std::from_chars(text.data(), end, epoch); ec == std::errc() && ptr == end)
    return epoch;
  if (std::isdigit(static_cast<unsigned char>(text[0]))) return parse_iso(text);
  return parse_api_form(text);
}

std::int64_t utc_day_index(Timestamp t) {
  // floor division so pre-1970 instants land on the right day
  return t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
}

std::string format_day(Timestamp t) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{utc_day_index(t)}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const std::int64_t secs = t - utc_day_index(t) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_day(t).c_str(),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("short write to " + path.string());
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace tweetlab
