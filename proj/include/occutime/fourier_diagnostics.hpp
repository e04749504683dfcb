#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "occutime/estimators.hpp"
#include "occutime/paths.hpp"
#include "occutime/test_function.hpp"

namespace occutime {

using cplx = std::complex<double>;

// Cumulative terms over the coarse intervals up to t_k.
struct DecompositionRow {
  std::size_t k = 0;
  double t = 0.0;
  cplx martingale;       // M
  cplx drift;            // D
  cplx endpoint;         // E
  cplx drift_part;       // F1 (NaN unless f is an exponential)
  cplx diffusion_part;   // F2 (NaN unless f is an exponential)
  cplx realized_error;   // fine reference minus Riemann sum
};

struct DecompositionTrace {
  std::vector<double> u;  // frequency, empty for non-exponential f
  std::vector<DecompositionRow> rows;
};

// Conditional expectations come from the Gaussian transition law: closed
// form for exponentials (characteristic functions) and Gauss-Hermite
// (closed form where the family has one) for real functions. Rows cover
// k = 1..floor(t/Delta). Throws CapabilityError for StochVol specs.
DecompositionTrace decompose(const TestFunction& f, const Path& path, double t,
                             int time_nodes = 32, int hermite_nodes = 64);

// (Delta/2) sum_k E[f(Y_{t_k}) - f(Y_{t_{k-1}}) | F_{t_{k-1}}].
cplx compute_E(const TestFunction& f, const CoarseObservations& obs, double t,
               int hermite_nodes = 64);

// Exponential-frequency terms; use only coarse states and the Gaussian law.
cplx compute_F1(std::span<const double> u, const CoarseObservations& obs, double t,
                int time_nodes = 32);
cplx compute_F2(std::span<const double> u, const CoarseObservations& obs, double t,
                int time_nodes = 32);

// |E exp(i <u, X_r - X_h>)| = exp(-(1/2) int_h^r |sigma^T u|^2).
double char_increment(std::span<const double> u, const ProcessSpec& spec, double h,
                      double r);

struct GProbeSettings {
  double horizon = 1.0;
  double smoothness = 1.0;  // s in the (1 + |u|^2)^s weight
  std::size_t paths = 400;
  std::uint64_t seed = 1;
  int threads = 1;
  int time_nodes = 32;
};

struct GProbeRow {
  double u = 0.0;
  std::size_t n = 0;
  double g_hat = 0.0;
  double std_error = 0.0;
};

struct GTrend {
  double u = 0.0;
  double kendall_tau = 0.0;
  double p_value = 1.0;
  bool decreasing = false;  // tau < 0 and p < 0.05
};

struct GProbeTable {
  std::vector<GProbeRow> rows;
  std::vector<GTrend> trends;
  double sup_g = 0.0;
  bool bounded = true;  // every entry finite
};

// g(u, n) = Delta^{-2} E[sup_k (|F1_{t_k}|^2 + |F2_{t_k}|^2)] / (1 + |u|^2)^s,
// with u applied to the first coordinate. Paths are simulated on the coarse
// grid only (F1, F2 depend on coarse states alone).
GProbeTable g_decay_probe(std::span<const double> u_list,
                          std::span<const std::size_t> n_list,
                          std::shared_ptr<const ProcessSpec> spec,
                          const GProbeSettings& settings = {});

}  // namespace occutime
