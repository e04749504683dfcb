#pragma once

#include <cstddef>

namespace occutime {

// Coarse observation grid t_k = k * coarse_step, k = 0..n, refined by an
// integer factor m into the simulation grid j * fine_step, j = 0..n*m.
// Every coarse node is the fine node with index k * m.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t coarse_count, std::size_t refine_factor);

  double horizon() const { return horizon_; }
  std::size_t coarse_count() const { return coarse_count_; }
  std::size_t refine_factor() const { return refine_factor_; }
  std::size_t fine_count() const { return coarse_count_ * refine_factor_; }

  double coarse_step() const { return coarse_step_; }
  double fine_step() const { return fine_step_; }

  double coarse_time(std::size_t k) const;
  double fine_time(std::size_t j) const;

  // floor(t / coarse_step + 2^-40), clamped to [0, n], so that t = T selects
  // all n intervals despite rounding in T / n.
  std::size_t coarse_index_floor(double t) const;
  std::size_t fine_index_floor(double t) const;

 private:
  double horizon_;
  std::size_t coarse_count_;
  std::size_t refine_factor_;
  double coarse_step_;
  double fine_step_;
};

TimeGrid build_grid(double horizon, std::size_t coarse_count,
                    std::size_t refine_factor);

}  // namespace occutime
