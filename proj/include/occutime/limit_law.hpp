#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "occutime/paths.hpp"
#include "occutime/test_function.hpp"

namespace occutime {

struct LimitSample {
  // (f(X_T + xi) - f(X_0 + xi)) / 2
  double bias_part = 0.0;
  // 12^{-1/2} int <grad f(X_r + xi), sigma_r dW~_r>, W~ independent of X
  double mixed_gaussian_part = 0.0;
  // (1/12) int |sigma_r^T grad f(X_r + xi)|^2 dr
  double conditional_variance = 0.0;
};

// Left-point sums on the fine grid. W~ increments come from the path's
// kLimit stream with the given replica, so repeated draws on one path use
// replica = 0, 1, 2, ...
LimitSample simulate_limit(const TestFunction& f, const Path& path,
                           std::uint16_t replica = 0);

// Same, reusing precomputed fine-node gradients (nodes x d, shift applied).
LimitSample simulate_limit(const TestFunction& f, const Path& path,
                           std::span<const double> fine_gradients,
                           std::uint16_t replica = 0);

// (1/12) int_0^T |grad f(X_r + xi)|^2 dr by the fine trapezoid rule.
double gradient_energy(const TestFunction& f, const Path& path);
double gradient_energy(std::span<const double> fine_gradients, const TimeGrid& grid,
                       int dim);

struct LowerBound {
  double value = 0.0;      // sqrt(E[energy])
  double std_error = 0.0;  // delta method
  double mean_energy = 0.0;
  double mean_energy_se = 0.0;
};

// sqrt(E[(1/12) int_0^T |grad f(X_t)|^2 dt]) over a Brownian bundle.
LowerBound lower_bound_constant(const TestFunction& f, const PathBundle& bundle,
                                int threads = 1);

// Same from per-path energies already computed.
LowerBound lower_bound_from_energies(std::span<const double> energies);

}  // namespace occutime
