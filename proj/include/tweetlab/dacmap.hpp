#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetlab/ingest.hpp"

namespace tweetlab::dac {

/// Per-day growth of each counter over the activity period.
struct DeltaRates {
  double followers = 0;  // (max - min) / t
  double friends = 0;
  double retweets = 0;
  double tweets = 0;
  double period_days = 1;
};

/// Throws InsufficientData when the user lacks follower, friend or status
/// observations; InvalidTimeline is propagated from activity_period_days.
DeltaRates compute_deltas(const ingest::UserAggregate& agg,
                          ingest::RetweetMode mode = ingest::RetweetMode::in_dataset,
                          double t_min_days = 1.0);

enum class Quadrant { traditional_spammer, social_spam_bot, influential, hidden_influential };

inline constexpr std::size_t kQuadrantCount = 4;

std::string_view to_string(Quadrant q);

/// Points on x = 1 or y = 1 belong to the upper/right side.
Quadrant classify_quadrant(double x, double y);

struct DacPoint {
  double x = 1;  // (1 + followers delta) / (1 + friends delta)
  double y = 1;  // (1 + retweets delta) / (1 + tweets delta)
  Quadrant quadrant = Quadrant::influential;
};

DacPoint dac_point(const DeltaRates& d);

struct UserPoint {
  std::string author_id;
  DacPoint point;
};

struct PointSet {
  std::vector<UserPoint> points;  // order of `ids`
  std::size_t skipped = 0;        // users without the required observations
};

PointSet compute_points(const ingest::AggregateMap& users, std::span<const std::string> ids,
                        ingest::RetweetMode mode, double t_min_days, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Log-binned density

struct LogAxis {
  int log10_min = -2;
  int log10_max = 2;
  int bins_per_decade = 10;

  std::size_t bins() const;
  /// bins() + 1 ascending edges, 10^(log10_min + i / bins_per_decade).
  std::vector<double> edges() const;
  /// Throws ConfigError for an empty range or non-positive bin count.
  void validate() const;
};

/// Cell index on an axis. Out-of-range values land in the first or last
/// cell and set `clipped`.
std::size_t bin_index(double v, const LogAxis& axis, const std::vector<double>& edges, bool& clipped);

/// Count per unit of linear area, normalized by the total number of points.
/// Kept separate so an alternative normalization can be swapped in.
double cell_density(std::uint64_t count, std::uint64_t total, double width_x, double width_y);

struct DacDensityMap {
  LogAxis x_axis;
  LogAxis y_axis;
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<std::uint64_t> counts;  // [ix * ny + iy]
  std::vector<double> density;
  std::uint64_t total = 0;
  std::uint64_t clipped = 0;

  bool empty() const { return total == 0; }
  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  /// Sum of density times linear cell area; 1 for non-empty maps.
  double integral() const;
};

/// Mergeable partial counts.
class DensityAccumulator {
public:
  DensityAccumulator(LogAxis x_axis, LogAxis y_axis);

  void add(double x, double y);
  void merge(const DensityAccumulator& other);
  DacDensityMap finish() const;

private:
  LogAxis xa_;
  LogAxis ya_;
  std::vector<double> xe_;
  std::vector<double> ye_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t clipped_ = 0;
};

DacDensityMap build_density(std::span<const DacPoint> points, const LogAxis& x_axis = {},
                            const LogAxis& y_axis = {});

/// Quadrant counts indexed by Quadrant.
std::array<std::uint64_t, kQuadrantCount> quadrant_counts(std::span<const UserPoint> points);

}  // namespace tweetlab::dac
