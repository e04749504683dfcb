#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "occutime/paths.hpp"
#include "occutime/test_function.hpp"
#include "occutime/time_grid.hpp"

namespace occutime {

enum class EstimatorKind { kRiemann, kTrapezoid, kBridgeConditional, kReference };

std::string to_string(EstimatorKind kind);
// Accepts "riemann", "trapezoid", "bridge" / "bridge_conditional", "reference".
EstimatorKind estimator_from_string(const std::string& name);

struct EstimateResult {
  EstimatorKind kind = EstimatorKind::kRiemann;
  double t = 0.0;
  double value = 0.0;
};

// What an observer sees: the states at coarse nodes, the realised shift and
// the process law. Fine-grid data cannot be reached from here.
class CoarseObservations {
 public:
  CoarseObservations(std::shared_ptr<const ProcessSpec> spec, TimeGrid grid,
                     std::vector<double> states, std::vector<double> shift);
  static CoarseObservations from_path(const Path& path);

  const ProcessSpec& spec() const { return *spec_; }
  const TimeGrid& grid() const { return grid_; }
  int dim() const { return spec_->dim(); }
  std::span<const double> state(std::size_t k) const;
  std::span<const double> shift() const { return shift_; }

  // f(X_{t_k} + xi) for k = 0..n.
  std::vector<double> values(const TestFunction& f) const;

 private:
  std::shared_ptr<const ProcessSpec> spec_;
  TimeGrid grid_;
  std::vector<double> states_;
  std::vector<double> shift_;
};

// Delta * sum_{k=1}^{floor(t/Delta)} f(X_{t_{k-1}}); `coarse_values` holds
// f at coarse nodes 0..floor(t/Delta) (at least).
double riemann_estimate(std::span<const double> coarse_values, const TimeGrid& grid,
                        double t);
double trapezoid_estimate(std::span<const double> coarse_values, const TimeGrid& grid,
                          double t);

double riemann_estimate(const TestFunction& f, const CoarseObservations& obs, double t);
double trapezoid_estimate(const TestFunction& f, const CoarseObservations& obs, double t);

// Fine-grid trapezoid sum of f over [0, t]; the last partial fine step is
// integrated with the linear interpolant. Requires refine factor >= 2.
double reference_value(std::span<const double> fine_values, const TimeGrid& grid,
                       double t);
double reference_value(const TestFunction& f, const Path& path, double t);
std::vector<double> reference_values(const TestFunction& f, const PathBundle& bundle,
                                     double t, int threads = 1);

// x_prev + tau (x_next - x_prev), tau in [0, 1].
std::vector<double> bridge_conditional_mean(std::span<const double> x_prev,
                                            std::span<const double> x_next, double tau);

struct BridgeQuadrature {
  int time_nodes = 8;
  int space_nodes = 32;
  // Use closed-form Gaussian expectations (indicator CDF differences and
  // the like) when the function family provides them.
  bool closed_form = true;
};

// E[Gamma_t(f) | X_{t_0}, ..., X_{t_n}] for Brownian X: per coarse interval,
// Gauss-Legendre in time against Brownian-bridge marginals
// N(mean, tau (1 - tau) Delta I). Sums over intervals up to floor(t/Delta).
double bridge_conditional_estimate(const TestFunction& f, const CoarseObservations& obs,
                                   double t, const BridgeQuadrature& quad = {});

// Per-path estimates for a bundle, in path order.
std::vector<EstimateResult> estimate_bundle(EstimatorKind kind, const TestFunction& f,
                                            const PathBundle& bundle, double t,
                                            const BridgeQuadrature& quad = {},
                                            int threads = 1);

}  // namespace occutime
