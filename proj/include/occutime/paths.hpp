#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "occutime/process.hpp"
#include "occutime/rng.hpp"
#include "occutime/time_grid.hpp"

namespace occutime {

// One simulated trajectory on the fine grid. States are stored row-major,
// `dim` values per fine node.
class Path {
 public:
  Path(std::shared_ptr<const ProcessSpec> spec, TimeGrid grid,
       std::uint64_t master_seed, std::uint64_t path_index);

  const ProcessSpec& spec() const { return *spec_; }
  const std::shared_ptr<const ProcessSpec>& spec_ptr() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }
  int dim() const { return spec_->dim(); }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t path_index() const { return path_index_; }

  std::size_t node_count() const { return grid_.fine_count() + 1; }
  std::span<const double> state(std::size_t fine_index) const;
  std::span<const double> states() const { return x_; }
  std::span<const double> shift() const { return xi_; }

  bool has_companions() const { return !w_.empty(); }
  // Driving Brownian motion W at a fine node; requires companions.
  std::span<const double> brownian(std::size_t fine_index) const;
  // Drift b at a fine node (d values written into `out`).
  void drift(std::size_t fine_index, std::span<double> out) const;
  // sigma at a fine node equals diffusion_scale(j) * spec().mixing().
  double diffusion_scale(std::size_t fine_index) const;

  // Stream for auxiliary draws tied to this path (limit-law W~, probes).
  StreamKey stream_key(StreamTag tag, std::uint16_t replica = 0) const {
    return {master_seed_, path_index_, tag, replica};
  }

 private:
  friend Path simulate_path(std::shared_ptr<const ProcessSpec>, const TimeGrid&,
                            std::uint64_t, std::uint64_t, bool);

  std::shared_ptr<const ProcessSpec> spec_;
  TimeGrid grid_;
  std::uint64_t master_seed_;
  std::uint64_t path_index_;
  std::vector<double> x_;
  std::vector<double> w_;      // companions: driving W, same layout as x_
  std::vector<double> w_aux_;  // StochVol volatility driver W', one per node
  std::vector<double> xi_;
};

struct PathBundle {
  std::shared_ptr<const ProcessSpec> spec;
  TimeGrid grid;
  std::uint64_t master_seed = 0;
  std::vector<Path> paths;
};

// Simulates path number `path_index` from the stream (master_seed,
// path_index). Gaussian specs use exact transitions; StochVol uses
// Euler-Maruyama. The result depends only on the arguments.
Path simulate_path(std::shared_ptr<const ProcessSpec> spec, const TimeGrid& grid,
                   std::uint64_t master_seed, std::uint64_t path_index,
                   bool keep_companions = true);

PathBundle simulate_paths(std::shared_ptr<const ProcessSpec> spec,
                          const TimeGrid& grid, std::size_t count,
                          std::uint64_t master_seed, int threads = 1,
                          bool keep_companions = true);

// X~_t(s) = X_s + b_s (t - s) + sigma_s (W_t - W_s); s, t must be fine nodes.
std::vector<double> one_step_euler(const Path& path, double s, double t);

struct RegularityRow {
  double lag = 0.0;
  double modulus = 0.0;  // E[sup_{r <= lag} |sigma_{t+r} - sigma_t|^2]
  double std_error = 0.0;
};

struct RegularityTable {
  std::vector<RegularityRow> rows;
  // Log-log slope of modulus vs lag (estimates 2 alpha); empty when the
  // moduli vanish identically.
  std::optional<double> slope;
};

RegularityTable regularity_probe(std::shared_ptr<const ProcessSpec> spec,
                                 const TimeGrid& grid, std::size_t count,
                                 std::uint64_t seed, int threads = 1);

// CSV with header `path_id,time,x_1..x_d`, one row per fine node.
void write_paths_csv(std::ostream& out, const PathBundle& bundle);

}  // namespace occutime
