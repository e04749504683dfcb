#include "occutime/limit_law.hpp"

#include <cmath>

#include "occutime/errors.hpp"
#include "occutime/parallel.hpp"
#include "occutime/path_eval.hpp"
#include "occutime/rng.hpp"
#include "occutime/stats.hpp"

namespace occutime {

LimitSample simulate_limit(const TestFunction& f, const Path& path,
                           std::uint16_t replica) {
  if (!f.has_gradient()) throw CapabilityError(f.name() + " has no gradient");
  const auto eval = eval_on_path(f, path, NodeSet::kFine, true);
  return simulate_limit(f, path, eval.gradients, replica);
}

LimitSample simulate_limit(const TestFunction& f, const Path& path,
                           std::span<const double> fine_gradients,
                           std::uint16_t replica) {
  if (!f.has_gradient()) throw CapabilityError(f.name() + " has no gradient");
  const auto d = static_cast<std::size_t>(path.dim());
  const TimeGrid& grid = path.grid();
  const std::size_t steps = grid.fine_count();
  if (fine_gradients.size() != (steps + 1) * d) {
    throw ArgumentError("gradient samples do not match the fine grid");
  }
  const double dt = grid.fine_step();
  const double sqrt_dt = std::sqrt(dt);
  const auto& mixing = path.spec().mixing();

  RandomStream rng(path.stream_key(StreamTag::kLimit, replica));
  std::vector<double> v(d);
  double integral = 0.0, energy = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    const double scale = path.diffusion_scale(j);
    const auto g = fine_gradients.subspan(j * d, d);
    // v = sigma^T grad f = scale * A^T g
    double norm2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += mixing[r * d + c] * g[r];
      v[c] = scale * s;
      norm2 += v[c] * v[c];
    }
    for (std::size_t c = 0; c < d; ++c) integral += v[c] * sqrt_dt * rng.standard_normal();
    energy += norm2 * dt;
  }

  const auto xi = path.shift();
  std::vector<double> y0(d), y1(d);
  const auto x0 = path.state(0);
  const auto x1 = path.state(steps);
  for (std::size_t c = 0; c < d; ++c) {
    y0[c] = x0[c] + xi[c];
    y1[c] = x1[c] + xi[c];
  }
  LimitSample out;
  out.bias_part = 0.5 * (f(y1) - f(y0));
  out.mixed_gaussian_part = integral / std::sqrt(12.0);
  out.conditional_variance = energy / 12.0;
  return out;
}

double gradient_energy(std::span<const double> fine_gradients, const TimeGrid& grid,
                       int dim) {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t nodes = grid.fine_count() + 1;
  if (fine_gradients.size() != nodes * d) {
    throw ArgumentError("gradient samples do not match the fine grid");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) norm2 += fine_gradients[j * d + c] * fine_gradients[j * d + c];
    sum += (j == 0 || j + 1 == nodes) ? 0.5 * norm2 : norm2;
  }
  return sum * grid.fine_step() / 12.0;
}

double gradient_energy(const TestFunction& f, const Path& path) {
  if (!f.has_gradient()) throw CapabilityError(f.name() + " has no gradient");
  const auto eval = eval_on_path(f, path, NodeSet::kFine, true);
  return gradient_energy(eval.gradients, path.grid(), path.dim());
}

LowerBound lower_bound_from_energies(std::span<const double> energies) {
  if (energies.empty()) throw ArgumentError("no paths for the lower bound");
  const auto m = stats::mean(energies);
  LowerBound out;
  out.mean_energy = m.value;
  out.mean_energy_se = m.std_error;
  out.value = std::sqrt(std::max(m.value, 0.0));
  out.std_error = out.value > 0.0 ? m.std_error / (2.0 * out.value) : 0.0;
  return out;
}

LowerBound lower_bound_constant(const TestFunction& f, const PathBundle& bundle,
                                int threads) {
  if (!f.has_gradient()) throw CapabilityError(f.name() + " has no gradient");
  if (bundle.spec->kind() != ProcessKind::kBrownian) {
    throw CapabilityError("lower bound constant is defined for Brownian bundles");
  }
  std::vector<double> energies(bundle.paths.size());
  parallel_for(energies.size(), threads, [&](std::size_t p) {
    energies[p] = gradient_energy(f, bundle.paths[p]);
  });
  return lower_bound_from_energies(energies);
}

}  // namespace occutime
