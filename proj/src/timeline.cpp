#include "tweetlab/timeline.hpp"

#include <map>

#include "tweetlab/csv.hpp"

namespace tweetlab::timeline {

std::vector<DayCount> emit_timeline(std::span<const Timestamp> times) {
  std::map<std::int64_t, std::uint64_t> days;
  for (const auto t : times) ++days[utc_day_index(t)];
  std::vector<DayCount> out;
  out.reserve(days.size());
  std::uint64_t running = 0;
  for (const auto& [day, n] : days) {
    running += n;
    out.push_back({format_day(static_cast<Timestamp>(day) * 86400), n, running});
  }
  return out;
}

std::string timeline_csv(std::span<const DayCount> rows) {
  csv::Writer w({"day", "count", "cumulative"});
  for (const auto& r : rows) w.row({r.day, std::to_string(r.count), std::to_string(r.cumulative)});
  return w.str();
}

}  // namespace tweetlab::timeline
