#pragma once

#include <string>
#include <vector>

#include "occutime/test_function.hpp"

namespace occutime {

struct SeminormSettings {
  double u_max = 1e4;
  // Tail integrand decaying slower than |u|^{-1-divergence_eps} is divergent.
  double divergence_eps = 0.05;
  int panel_nodes = 20;
  // Octaves [u_max 2^{-k-1}, u_max 2^{-k}], k < tail_octaves, feed the tail fit.
  int tail_octaves = 7;
};

struct SeminormResult {
  // Seminorm over |u| <= u_max plus extrapolated tail. When `divergent` is
  // set this is the truncated value and carries no meaning beyond u_max.
  double value = 0.0;
  bool divergent = false;
  // Fitted log-log slope of the octave masses (decay exponent of the
  // integrand plus one); NaN when the tail mass is negligible.
  double tail_slope = 0.0;
  double tail_estimate = 0.0;
  // False when the d >= 2 tensor bookkeeping only yields an upper bound.
  bool exact = true;
  // "closed_form" or "discrete_transform".
  std::string method;
};

// (int |F f(u)|^2 |u|^{2s} du)^{1/2}.
SeminormResult sobolev_seminorm(const TestFunction& f, double s,
                                const SeminormSettings& settings = {});

// int |F f(u)| |u|^s du.
SeminormResult fourier_lebesgue_seminorm(const TestFunction& f, double s,
                                         const SeminormSettings& settings = {});

}  // namespace occutime
