#include "tweetlab/dacmap.hpp"

#include <algorithm>
#include <cmath>

namespace tweetlab::dac {

DeltaRates compute_deltas(const ingest::UserAggregate& agg, ingest::RetweetMode mode,
                          double t_min_days) {
  if (agg.followers.empty || agg.friends.empty || agg.statuses.empty)
    throw InsufficientData("user " + agg.author_id + " has no profile observations");
  const auto rt = agg.retweet_extrema(mode);
  DeltaRates d;
  d.period_days = ingest::activity_period_days(agg, t_min_days);
  auto rate = [&](const ingest::CounterRange& r) {
    return static_cast<double>(r.max - r.min) / d.period_days;
  };
  d.followers = rate(agg.followers);
  d.friends = rate(agg.friends);
  d.retweets = rate(rt);
  d.tweets = rate(agg.statuses);
  return d;
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::traditional_spammer: return "traditional_spammer";
    case Quadrant::social_spam_bot: return "social_spam_bot";
    case Quadrant::influential: return "influential";
    case Quadrant::hidden_influential: return "hidden_influential";
  }
  return "influential";
}

Quadrant classify_quadrant(double x, double y) {
  if (x >= 1.0) return y >= 1.0 ? Quadrant::influential : Quadrant::social_spam_bot;
  return y >= 1.0 ? Quadrant::hidden_influential : Quadrant::traditional_spammer;
}

DacPoint dac_point(const DeltaRates& d) {
  DacPoint p;
  p.x = (1.0 + d.followers) / (1.0 + d.friends);
  p.y = (1.0 + d.retweets) / (1.0 + d.tweets);
  p.quadrant = classify_quadrant(p.x, p.y);
  return p;
}

PointSet compute_points(const ingest::AggregateMap& users, std::span<const std::string> ids,
                        ingest::RetweetMode mode, double t_min_days, unsigned workers) {
  std::vector<std::optional<DacPoint>> slots(ids.size());
  parallel_for(ids.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto it = users.find(ids[i]);
      if (it == users.end()) continue;
      try {
        slots[i] = dac_point(compute_deltas(it->second, mode, t_min_days));
      } catch (const InsufficientData&) {
      } catch (const InvalidTimeline&) {
      }
    }
  });
  PointSet out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (slots[i]) {
      out.points.push_back({ids[i], *slots[i]});
    } else {
      ++out.skipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t LogAxis::bins() const {
  return static_cast<std::size_t>((log10_max - log10_min) * bins_per_decade);
}

std::vector<double> LogAxis::edges() const {
  std::vector<double> e(bins() + 1);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const int num = log10_min * bins_per_decade + static_cast<int>(i);
    // Whole decades are computed as exact powers so that 1.0 is an edge.
    e[i] = num % bins_per_decade == 0
               ? std::pow(10.0, num / bins_per_decade)
               : std::pow(10.0, static_cast<double>(num) / bins_per_decade);
  }
  return e;
}

void LogAxis::validate() const {
  if (log10_max <= log10_min) throw ConfigError("log axis: max decade must exceed min decade");
  if (bins_per_decade <= 0) throw ConfigError("log axis: bins per decade must be positive");
}

std::size_t bin_index(double v, const LogAxis& axis, const std::vector<double>& edges, bool& clipped) {
  const std::size_t n = edges.size() - 1;
  clipped = false;
  if (!(v >= edges.front())) {  // also catches NaN and non-positive values
    clipped = true;
    return 0;
  }
  if (v >= edges.back()) {
    // The top edge is exclusive; a value exactly on it is counted as clipped.
    clipped = true;
    return n - 1;
  }
  auto guess = static_cast<long long>(
      std::floor((std::log10(v) - axis.log10_min) * static_cast<double>(axis.bins_per_decade)));
  guess = std::clamp<long long>(guess, 0, static_cast<long long>(n - 1));
  auto i = static_cast<std::size_t>(guess);
  // log10 rounding can be off by one next to an edge; settle against the edges.
  while (i > 0 && v < edges[i]) --i;
  while (i + 1 < n && v >= edges[i + 1]) ++i;
  return i;
}

double cell_density(std::uint64_t count, std::uint64_t total, double width_x, double width_y) {
  if (total == 0 || count == 0) return 0.0;
  return static_cast<double>(count) / (static_cast<double>(total) * width_x * width_y);
}

double DacDensityMap::integral() const {
  double sum = 0.0;
  for (std::size_t ix = 0; ix < nx(); ++ix)
    for (std::size_t iy = 0; iy < ny(); ++iy)
      sum += density[ix * ny() + iy] * (x_edges[ix + 1] - x_edges[ix]) * (y_edges[iy + 1] - y_edges[iy]);
  return sum;
}

DensityAccumulator::DensityAccumulator(LogAxis x_axis, LogAxis y_axis)
    : xa_(x_axis), ya_(y_axis) {
  xa_.validate();
  ya_.validate();
  xe_ = xa_.edges();
  ye_ = ya_.edges();
  counts_.assign(xa_.bins() * ya_.bins(), 0);
}

void DensityAccumulator::add(double x, double y) {
  bool cx = false;
  bool cy = false;
  const auto ix = bin_index(x, xa_, xe_, cx);
  const auto iy = bin_index(y, ya_, ye_, cy);
  ++counts_[ix * ya_.bins() + iy];
  ++total_;
  if (cx || cy) ++clipped_;
}

void DensityAccumulator::merge(const DensityAccumulator& other) {
  if (other.counts_.size() != counts_.size() || other.xe_ != xe_ || other.ye_ != ye_)
    throw ConfigError("cannot merge density maps with different axes");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  clipped_ += other.clipped_;
}

DacDensityMap DensityAccumulator::finish() const {
  DacDensityMap m;
  m.x_axis = xa_;
  m.y_axis = ya_;
  m.x_edges = xe_;
  m.y_edges = ye_;
  m.counts = counts_;
  m.total = total_;
  m.clipped = clipped_;
  m.density.assign(counts_.size(), 0.0);
  const std::size_t ny = ye_.size() - 1;
  for (std::size_t ix = 0; ix + 1 < xe_.size(); ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy)
      m.density[ix * ny + iy] = cell_density(counts_[ix * ny + iy], total_, xe_[ix + 1] - xe_[ix],
                                             ye_[iy + 1] - ye_[iy]);
  return m;
}

DacDensityMap build_density(std::span<const DacPoint> points, const LogAxis& x_axis,
                            const LogAxis& y_axis) {
  DensityAccumulator acc(x_axis, y_axis);
  for (const auto& p : points) acc.add(p.x, p.y);
  return acc.finish();
}

std::array<std::uint64_t, kQuadrantCount> quadrant_counts(std::span<const UserPoint> points) {
  std::array<std::uint64_t, kQuadrantCount> c{};
  for (const auto& p : points) ++c[static_cast<std::size_t>(p.point.quadrant)];
  return c;
}

}  // namespace tweetlab::dac
