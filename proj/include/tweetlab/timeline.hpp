#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetlab/common.hpp"

namespace tweetlab::timeline {

struct DayCount {
  std::string day;  // YYYY-MM-DD, UTC
  std::uint64_t count = 0;
  std::uint64_t cumulative = 0;

  friend bool operator==(const DayCount&, const DayCount&) = default;
};

/// One row per UTC calendar day that has at least one timestamp, ascending.
std::vector<DayCount> emit_timeline(std::span<const Timestamp> times);

std::string timeline_csv(std::span<const DayCount> rows);

}  // namespace tweetlab::timeline
