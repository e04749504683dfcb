#include "occutime/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "occutime/errors.hpp"
#include "occutime/parallel.hpp"
#include "occutime/stats.hpp"

namespace occutime {

Path::Path(std::shared_ptr<const ProcessSpec> spec, TimeGrid grid,
           std::uint64_t master_seed, std::uint64_t path_index)
    : spec_(std::move(spec)),
      grid_(grid),
      master_seed_(master_seed),
      path_index_(path_index) {}

std::span<const double> Path::state(std::size_t j) const {
  const auto d = static_cast<std::size_t>(dim());
  return std::span<const double>(x_).subspan(j * d, d);
}

std::span<const double> Path::brownian(std::size_t j) const {
  if (!has_companions()) {
    throw CapabilityError("path was simulated without companion sequences");
  }
  const auto d = static_cast<std::size_t>(dim());
  return std::span<const double>(w_).subspan(j * d, d);
}

void Path::drift(std::size_t j, std::span<double> out) const {
  switch (spec_->kind()) {
    case ProcessKind::kBrownian:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case ProcessKind::kDeterministicGaussian:
      std::fill(out.begin(), out.end(), spec_->drift_level(grid_.fine_time(j)));
      return;
    case ProcessKind::kStochVol: {
      const double kappa = std::get<StochVol>(spec_->coefficients()).kappa;
      const auto x = state(j);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = -kappa * x[i];
      return;
    }
  }
}

double Path::diffusion_scale(std::size_t j) const {
  switch (spec_->kind()) {
    case ProcessKind::kBrownian: return 1.0;
    case ProcessKind::kDeterministicGaussian:
      return spec_->diffusion_level(grid_.fine_time(j));
    case ProcessKind::kStochVol: {
      const auto& sv = std::get<StochVol>(spec_->coefficients());
      return sv.sigma0 * (1.0 + sv.eta * std::sin(w_aux_[j]));
    }
  }
  return 1.0;
}

namespace {

void draw_initial(const InitialLaw& law, RandomStream& rng, std::span<double> x0) {
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        for (std::size_t i = 0; i < x0.size(); ++i) {
          if constexpr (std::is_same_v<T, FixedPoint>) {
            x0[i] = l.x0[i];
          } else if constexpr (std::is_same_v<T, UniformBox>) {
            x0[i] = l.low + (l.high - l.low) * rng.uniform();
          } else {
            x0[i] = l.mean + l.sd * rng.standard_normal();
          }
        }
      },
      law);
}

}  // namespace

Path simulate_path(std::shared_ptr<const ProcessSpec> spec, const TimeGrid& grid,
                   std::uint64_t master_seed, std::uint64_t path_index,
                   bool keep_companions) {
  Path path(spec, grid, master_seed, path_index);
  const auto d = static_cast<std::size_t>(spec->dim());
  const std::size_t steps = grid.fine_count();
  const double dt = grid.fine_step();
  const double sqrt_dt = std::sqrt(dt);

  RandomStream rng({master_seed, path_index, StreamTag::kPath});
  path.x_.assign((steps + 1) * d, 0.0);
  if (keep_companions) path.w_.assign((steps + 1) * d, 0.0);
  path.xi_.assign(d, 0.0);

  draw_initial(spec->initial(), rng, std::span(path.x_).first(d));
  if (const auto& shift = spec->shift()) {
    for (auto& v : path.xi_) v = shift->half_width * (2.0 * rng.uniform() - 1.0);
  }

  std::vector<double> z(d);
  const auto& mixing = spec->mixing();

  switch (spec->kind()) {
    case ProcessKind::kBrownian: {
      for (std::size_t j = 0; j < steps; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
          const double dw = sqrt_dt * rng.standard_normal();
          path.x_[(j + 1) * d + i] = path.x_[j * d + i] + dw;
          if (keep_companions) path.w_[(j + 1) * d + i] = path.w_[j * d + i] + dw;
        }
      }
      break;
    }
    case ProcessKind::kDeterministicGaussian: {
      const auto& dg = std::get<DeterministicGaussian>(spec->coefficients());
      for (std::size_t j = 0; j < steps; ++j) {
        const double t0 = grid.fine_time(j), t1 = grid.fine_time(j + 1);
        if (!dg.allow_degenerate) {
          const double level = dg.diffusion(t0);
          if (!(level * level * spec->mixing_min_eigenvalue() > 1e-12)) {
            std::ostringstream msg;
            msg << "degenerate diffusion: sigma sigma^T is singular at t = " << t0;
            throw SimulationError(msg.str());
          }
        }
        const double mean = dg.drift.integral(t0, t1);
        const double scale = std::sqrt(std::max(dg.diffusion.integral_of_square(t0, t1), 0.0));
        for (auto& v : z) v = rng.standard_normal();
        for (std::size_t i = 0; i < d; ++i) {
          double az = 0.0;
          for (std::size_t k = 0; k < d; ++k) az += mixing[i * d + k] * z[k];
          path.x_[(j + 1) * d + i] = path.x_[j * d + i] + mean + scale * az;
          if (keep_companions) {
            path.w_[(j + 1) * d + i] = path.w_[j * d + i] + sqrt_dt * z[i];
          }
        }
      }
      break;
    }
    case ProcessKind::kStochVol: {
      const auto& sv = std::get<StochVol>(spec->coefficients());
      path.w_aux_.assign(steps + 1, 0.0);
      for (std::size_t j = 0; j < steps; ++j) {
        const double sigma = sv.sigma0 * (1.0 + sv.eta * std::sin(path.w_aux_[j]));
        for (std::size_t i = 0; i < d; ++i) {
          const double dw = sqrt_dt * rng.standard_normal();
          const double x = path.x_[j * d + i];
          path.x_[(j + 1) * d + i] = x - sv.kappa * x * dt + sigma * dw;
          if (keep_companions) path.w_[(j + 1) * d + i] = path.w_[j * d + i] + dw;
        }
        path.w_aux_[j + 1] = path.w_aux_[j] + sqrt_dt * rng.standard_normal();
      }
      break;
    }
  }
  return path;
}

PathBundle simulate_paths(std::shared_ptr<const ProcessSpec> spec,
                          const TimeGrid& grid, std::size_t count,
                          std::uint64_t master_seed, int threads,
                          bool keep_companions) {
  if (count == 0) throw ArgumentError("path count must be >= 1");
  std::vector<std::optional<Path>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) {
    slots[i].emplace(simulate_path(spec, grid, master_seed, i, keep_companions));
  });
  PathBundle bundle{spec, grid, master_seed, {}};
  bundle.paths.reserve(count);
  for (auto& slot : slots) bundle.paths.push_back(std::move(*slot));
  return bundle;
}

namespace {

std::size_t node_index(const TimeGrid& grid, double t, const char* what) {
  const double ratio = t / grid.fine_step();
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 || rounded > static_cast<double>(grid.fine_count())) {
    throw ArgumentError(std::string(what) + " is not a fine grid node");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

std::vector<double> one_step_euler(const Path& path, double s, double t) {
  if (!(s >= 0.0 && s <= t && t <= path.grid().horizon() * (1 + 1e-15))) {
    throw ArgumentError("one_step_euler needs 0 <= s <= t <= T");
  }
  if (!path.has_companions()) {
    throw CapabilityError("one_step_euler needs companion W, b, sigma sequences");
  }
  const std::size_t js = node_index(path.grid(), s, "s");
  const std::size_t jt = node_index(path.grid(), t, "t");
  const auto d = static_cast<std::size_t>(path.dim());
  const auto xs = path.state(js);
  const auto ws = path.brownian(js);
  const auto wt = path.brownian(jt);
  std::vector<double> b(d);
  path.drift(js, b);
  const double scale = path.diffusion_scale(js);
  const auto& mixing = path.spec().mixing();
  const double h = path.grid().fine_time(jt) - path.grid().fine_time(js);

  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    double noise = 0.0;
    for (std::size_t k = 0; k < d; ++k) noise += mixing[i * d + k] * (wt[k] - ws[k]);
    out[i] = xs[i] + b[i] * h + scale * noise;
  }
  return out;
}

RegularityTable regularity_probe(std::shared_ptr<const ProcessSpec> spec,
                                 const TimeGrid& grid, std::size_t count,
                                 std::uint64_t seed, int threads) {
  if (spec->kind() == ProcessKind::kBrownian) {
    throw CapabilityError("regularity probe needs a deterministic Gaussian or stochvol spec");
  }
  double mixing_frob2 = 0.0;
  for (double a : spec->mixing()) mixing_frob2 += a * a;

  const std::size_t steps = grid.fine_count();
  const std::size_t m = grid.refine_factor();
  std::vector<std::size_t> lags;
  for (std::size_t lag = 1; lag <= steps / 4; lag *= 2) lags.push_back(lag);
  if (lags.empty()) lags.push_back(1);

  // Average over base times t = coarse nodes with t + lag <= T.
  auto path_moduli = [&](auto&& scale_at) {
    std::vector<double> moduli(lags.size(), 0.0);
    for (std::size_t li = 0; li < lags.size(); ++li) {
      const std::size_t lag = lags[li];
      double total = 0.0;
      std::size_t bases = 0;
      for (std::size_t j0 = 0; j0 + lag <= steps; j0 += m) {
        const double s0 = scale_at(j0);
        double sup = 0.0;
        for (std::size_t r = 1; r <= lag; ++r) {
          const double diff = scale_at(j0 + r) - s0;
          sup = std::max(sup, diff * diff);
        }
        total += sup * mixing_frob2;
        ++bases;
      }
      moduli[li] = bases ? total / static_cast<double>(bases) : 0.0;
    }
    return moduli;
  };

  RegularityTable table;
  if (spec->kind() == ProcessKind::kDeterministicGaussian) {
    const auto moduli = path_moduli(
        [&](std::size_t j) { return spec->diffusion_level(grid.fine_time(j)); });
    for (std::size_t li = 0; li < lags.size(); ++li) {
      table.rows.push_back({static_cast<double>(lags[li]) * grid.fine_step(), moduli[li], 0.0});
    }
  } else {
    if (count == 0) throw ArgumentError("regularity probe needs at least one path");
    std::vector<std::vector<double>> per_path(count);
    parallel_for(count, threads, [&](std::size_t p) {
      const Path path = simulate_path(spec, grid, seed, p, false);
      per_path[p] = path_moduli([&](std::size_t j) { return path.diffusion_scale(j); });
    });
    for (std::size_t li = 0; li < lags.size(); ++li) {
      std::vector<double> column(count);
      for (std::size_t p = 0; p < count; ++p) column[p] = per_path[p][li];
      const auto est = stats::mean(column);
      table.rows.push_back({static_cast<double>(lags[li]) * grid.fine_step(), est.value,
                            est.std_error});
    }
  }

  // Skip the shortest lags when enough remain: the discrete sup over a few
  // fine nodes underestimates the continuous one.
  std::vector<double> xs, ys;
  for (std::size_t li = 0; li < table.rows.size(); ++li) {
    const auto& row = table.rows[li];
    if (row.modulus > 0.0) {
      xs.push_back(std::log(row.lag));
      ys.push_back(std::log(row.modulus));
    }
  }
  if (xs.size() >= 6) {
    xs.erase(xs.begin(), xs.begin() + 3);
    ys.erase(ys.begin(), ys.begin() + 3);
  }
  if (xs.size() >= 2) {
    const std::vector<double> unit(xs.size(), 1.0);
    if (auto fit = stats::fit_log_log_slope(xs, ys, unit, 0.0)) table.slope = fit->slope;
  }
  return table;
}

void write_paths_csv(std::ostream& out, const PathBundle& bundle) {
  const int d = bundle.spec->dim();
  out << "path_id,time";
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  out << '\n';
  char buffer[64];
  for (const auto& path : bundle.paths) {
    for (std::size_t j = 0; j < path.node_count(); ++j) {
      out << path.path_index();
      std::snprintf(buffer, sizeof buffer, ",%.17g", bundle.grid.fine_time(j));
      out << buffer;
      for (double v : path.state(j)) {
        std::snprintf(buffer, sizeof buffer, ",%.17g", v);
        out << buffer;
      }
      out << '\n';
    }
  }
}

}  // namespace occutime
