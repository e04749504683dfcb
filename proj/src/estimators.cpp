#include "occutime/estimators.hpp"

#include <cmath>

#include "occutime/errors.hpp"
#include "occutime/parallel.hpp"
#include "occutime/path_eval.hpp"
#include "occutime/quadrature.hpp"

namespace occutime {

namespace {

void check_time(const TimeGrid& grid, double t) {
  if (!(t >= 0.0 && t <= grid.horizon() * (1.0 + 1e-12))) {
    throw ArgumentError("evaluation time must lie in [0, T]");
  }
}

std::size_t intervals_up_to(std::span<const double> values, const TimeGrid& grid,
                            double t) {
  check_time(grid, t);
  const std::size_t k = grid.coarse_index_floor(t);
  if (values.size() < k + 1) {
    throw ArgumentError("need coarse samples 0.." + std::to_string(k) + ", got " +
                        std::to_string(values.size()));
  }
  return k;
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kRiemann: return "riemann";
    case EstimatorKind::kTrapezoid: return "trapezoid";
    case EstimatorKind::kBridgeConditional: return "bridge_conditional";
    case EstimatorKind::kReference: return "reference";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(const std::string& name) {
  if (name == "riemann") return EstimatorKind::kRiemann;
  if (name == "trapezoid") return EstimatorKind::kTrapezoid;
  if (name == "bridge" || name == "bridge_conditional") return EstimatorKind::kBridgeConditional;
  if (name == "reference") return EstimatorKind::kReference;
  throw ArgumentError("unknown estimator '" + name + "'");
}

CoarseObservations::CoarseObservations(std::shared_ptr<const ProcessSpec> spec,
                                       TimeGrid grid, std::vector<double> states,
                                       std::vector<double> shift)
    : spec_(std::move(spec)), grid_(grid), states_(std::move(states)), shift_(std::move(shift)) {
  const auto d = static_cast<std::size_t>(spec_->dim());
  if (states_.size() != (grid_.coarse_count() + 1) * d) {
    throw ArgumentError("coarse states do not match the grid");
  }
  if (shift_.empty()) shift_.assign(d, 0.0);
  if (shift_.size() != d) throw ArgumentError("shift has wrong dimension");
}

CoarseObservations CoarseObservations::from_path(const Path& path) {
  const TimeGrid& grid = path.grid();
  const auto d = static_cast<std::size_t>(path.dim());
  std::vector<double> states((grid.coarse_count() + 1) * d);
  for (std::size_t k = 0; k <= grid.coarse_count(); ++k) {
    const auto x = path.state(k * grid.refine_factor());
    std::copy(x.begin(), x.end(), states.begin() + k * d);
  }
  const auto xi = path.shift();
  return CoarseObservations(path.spec_ptr(), grid, std::move(states),
                            std::vector<double>(xi.begin(), xi.end()));
}

std::span<const double> CoarseObservations::state(std::size_t k) const {
  const auto d = static_cast<std::size_t>(dim());
  return std::span<const double>(states_).subspan(k * d, d);
}

std::vector<double> CoarseObservations::values(const TestFunction& f) const {
  const int d = dim();
  if (f.dim() != d) throw ArgumentError("function and process dimensions differ");
  std::vector<double> out(grid_.coarse_count() + 1);
  std::vector<double> y(d);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto x = state(k);
    for (int c = 0; c < d; ++c) y[c] = x[c] + shift_[c];
    out[k] = f(y);
  }
  return out;
}

double riemann_estimate(std::span<const double> coarse_values, const TimeGrid& grid,
                        double t) {
  const std::size_t k_max = intervals_up_to(coarse_values, grid, t);
  double sum = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) sum += coarse_values[k - 1];
  return grid.coarse_step() * sum;
}

double trapezoid_estimate(std::span<const double> coarse_values, const TimeGrid& grid,
                          double t) {
  const std::size_t k_max = intervals_up_to(coarse_values, grid, t);
  return riemann_estimate(coarse_values, grid, t) +
         grid.coarse_step() * (coarse_values[k_max] - coarse_values[0]) / 2.0;
}

double riemann_estimate(const TestFunction& f, const CoarseObservations& obs, double t) {
  return riemann_estimate(obs.values(f), obs.grid(), t);
}

double trapezoid_estimate(const TestFunction& f, const CoarseObservations& obs, double t) {
  return trapezoid_estimate(obs.values(f), obs.grid(), t);
}

double reference_value(std::span<const double> fine_values, const TimeGrid& grid,
                       double t) {
  if (grid.refine_factor() < 2) {
    throw ArgumentError("reference value needs refine factor m >= 2");
  }
  check_time(grid, t);
  if (fine_values.size() != grid.fine_count() + 1) {
    throw ArgumentError("fine values do not match the grid");
  }
  const std::size_t j_max = grid.fine_index_floor(t);
  double sum = 0.0;
  for (std::size_t j = 1; j <= j_max; ++j) sum += fine_values[j - 1] + fine_values[j];
  double total = 0.5 * grid.fine_step() * sum;
  const double rest = t - grid.fine_time(j_max);
  if (j_max < grid.fine_count() && rest > 0.0) {
    const double v0 = fine_values[j_max];
    const double v1 = v0 + (fine_values[j_max + 1] - v0) * rest / grid.fine_step();
    total += 0.5 * rest * (v0 + v1);
  }
  return total;
}

double reference_value(const TestFunction& f, const Path& path, double t) {
  return reference_value(eval_on_path(f, path, NodeSet::kFine).values, path.grid(), t);
}

std::vector<double> reference_values(const TestFunction& f, const PathBundle& bundle,
                                     double t, int threads) {
  std::vector<double> out(bundle.paths.size());
  parallel_for(out.size(), threads, [&](std::size_t p) {
    out[p] = reference_value(f, bundle.paths[p], t);
  });
  return out;
}

std::vector<double> bridge_conditional_mean(std::span<const double> x_prev,
                                            std::span<const double> x_next, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in [0, 1]");
  if (x_prev.size() != x_next.size()) throw ArgumentError("bridge endpoints differ in size");
  std::vector<double> out(x_prev.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x_prev[i] + tau * (x_next[i] - x_prev[i]);
  }
  return out;
}

double bridge_conditional_estimate(const TestFunction& f, const CoarseObservations& obs,
                                   double t, const BridgeQuadrature& quad) {
  if (obs.spec().kind() != ProcessKind::kBrownian) {
    throw CapabilityError("bridge conditional estimator needs a Brownian process spec");
  }
  if (quad.time_nodes < 1 || quad.space_nodes < 1) {
    throw ArgumentError("bridge quadrature needs positive node counts");
  }
  const TimeGrid& grid = obs.grid();
  check_time(grid, t);
  const std::size_t k_max = grid.coarse_index_floor(t);
  const double delta = grid.coarse_step();
  const int d = obs.dim();
  const auto xi = obs.shift();
  const QuadratureRule& rule = gauss_legendre(quad.time_nodes);

  std::vector<double> prev(d), next(d);
  double total = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto a = obs.state(k - 1);
    const auto b = obs.state(k);
    for (int c = 0; c < d; ++c) {
      prev[c] = a[c] + xi[c];
      next[c] = b[c] + xi[c];
    }
    double interval = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double tau = 0.5 * (rule.nodes[i] + 1.0);
      const auto mean = bridge_conditional_mean(prev, next, tau);
      const double sd = std::sqrt(tau * (1.0 - tau) * delta);
      interval += 0.5 * rule.weights[i] *
                  f.gaussian_expectation(mean, sd, quad.space_nodes, quad.closed_form);
    }
    total += delta * interval;
  }
  return total;
}

std::vector<EstimateResult> estimate_bundle(EstimatorKind kind, const TestFunction& f,
                                            const PathBundle& bundle, double t,
                                            const BridgeQuadrature& quad, int threads) {
  std::vector<EstimateResult> out(bundle.paths.size());
  parallel_for(out.size(), threads, [&](std::size_t p) {
    const Path& path = bundle.paths[p];
    double value = 0.0;
    if (kind == EstimatorKind::kReference) {
      value = reference_value(f, path, t);
    } else {
      const auto obs = CoarseObservations::from_path(path);
      switch (kind) {
        case EstimatorKind::kRiemann: value = riemann_estimate(f, obs, t); break;
        case EstimatorKind::kTrapezoid: value = trapezoid_estimate(f, obs, t); break;
        case EstimatorKind::kBridgeConditional:
          value = bridge_conditional_estimate(f, obs, t, quad);
          break;
        case EstimatorKind::kReference: break;
      }
    }
    out[p] = {kind, t, value};
  });
  return out;
}

}  // namespace occutime
