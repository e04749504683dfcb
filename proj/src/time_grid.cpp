#include "occutime/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occutime/errors.hpp"

namespace occutime {

namespace {
constexpr double kFloorGuard = 0x1.0p-40;
}

TimeGrid::TimeGrid(double horizon, std::size_t coarse_count,
                   std::size_t refine_factor)
    : horizon_(horizon),
      coarse_count_(coarse_count),
      refine_factor_(refine_factor) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ArgumentError("time grid horizon must be positive, got " +
                        std::to_string(horizon));
  }
  if (coarse_count == 0) throw ArgumentError("coarse count n must be >= 1");
  if (refine_factor == 0) throw ArgumentError("refine factor m must be >= 1");
  coarse_step_ = horizon / static_cast<double>(coarse_count);
  fine_step_ = coarse_step_ / static_cast<double>(refine_factor);
}

double TimeGrid::coarse_time(std::size_t k) const {
  // Ratio form so that coarse_time(k) == fine_time(k * m) bit for bit.
  return horizon_ * (static_cast<double>(k) / static_cast<double>(coarse_count_));
}

double TimeGrid::fine_time(std::size_t j) const {
  return horizon_ * (static_cast<double>(j) / static_cast<double>(fine_count()));
}

std::size_t TimeGrid::coarse_index_floor(double t) const {
  if (!(t >= 0.0)) return 0;
  const double k = std::floor(t / coarse_step_ + kFloorGuard);
  return static_cast<std::size_t>(std::min(k, static_cast<double>(coarse_count_)));
}

std::size_t TimeGrid::fine_index_floor(double t) const {
  if (!(t >= 0.0)) return 0;
  const double j = std::floor(t / fine_step_ + kFloorGuard);
  return static_cast<std::size_t>(std::min(j, static_cast<double>(fine_count())));
}

TimeGrid build_grid(double horizon, std::size_t coarse_count,
                    std::size_t refine_factor) {
  return TimeGrid(horizon, coarse_count, refine_factor);
}

}  // namespace occutime
