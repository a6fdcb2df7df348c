#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tweetlab {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr double kSecondsPerDay = 86400.0;

// Errors carry a stable code (the name used in reports) and a category that
// the CLI maps onto its exit status.
enum class ErrorCategory { config, data, internal };

class Error : public std::runtime_error {
public:
  Error(std::string code, ErrorCategory category, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), category_(category) {}

  const std::string& code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_; }

private:
  std::string code_;
  ErrorCategory category_;
};

#define TWEETLAB_DEFINE_ERROR(Name, Category)                                  \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& message)                                  \
        : Error(#Name, ErrorCategory::Category, message) {}                    \
  }

TWEETLAB_DEFINE_ERROR(ConfigError, config);
TWEETLAB_DEFINE_ERROR(InvalidTimeline, data);
TWEETLAB_DEFINE_ERROR(InsufficientData, data);
TWEETLAB_DEFINE_ERROR(RangeError, data);
TWEETLAB_DEFINE_ERROR(EmptyName, data);
TWEETLAB_DEFINE_ERROR(EmptyInput, data);
TWEETLAB_DEFINE_ERROR(ModelMismatch, data);
TWEETLAB_DEFINE_ERROR(DegenerateData, data);
TWEETLAB_DEFINE_ERROR(NonFinite, data);
TWEETLAB_DEFINE_ERROR(InsufficientStrata, data);
TWEETLAB_DEFINE_ERROR(DataError, data);

#undef TWEETLAB_DEFINE_ERROR

// Timestamps ---------------------------------------------------------------

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]",
/// the classic API form "Wed Oct 10 20:19:24 +0000 2018", or a decimal
/// epoch-seconds string.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

/// "YYYY-MM-DD" of the UTC calendar day containing t.
std::string format_day(Timestamp t);

/// Day number (days since 1970-01-01) of the UTC calendar day containing t.
std::int64_t utc_day_index(Timestamp t);

Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                     int second = 0);

// Formatting ---------------------------------------------------------------

/// Shortest round-trip decimal form; stable across platforms.
std::string format_double(double v);

// Strings ------------------------------------------------------------------

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

// Files --------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Parallelism ---------------------------------------------------------------

unsigned resolve_workers(unsigned requested);

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(begin, end, worker_index) on each. Chunk boundaries depend only on n and
/// the worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n < 2) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    threads.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tweetlab
