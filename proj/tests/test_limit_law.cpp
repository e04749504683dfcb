#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "occutime/estimators.hpp"
#include "occutime/limit_law.hpp"
#include "occutime/paths.hpp"
#include "occutime/stats.hpp"

using namespace occutime;

namespace {

std::shared_ptr<const ProcessSpec> bm() {
  return std::make_shared<const ProcessSpec>(ProcessSpec::brownian(1, FixedPoint{{0.0}}));
}

// sqrt( int_0^1 E|f'(X_t)|^2 dt / 12 ) for X_t ~ N(0, t), f = exp(-x^2/2): nested
// Simpson rules over t and x.
double bump_lower_bound_oracle() {
  auto simpson = [](auto f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  auto marginal = [&](double t) {
    if (t == 0.0) return 0.0;
    const double sd = std::sqrt(t);
    return simpson(
        [&](double x) {
          const double g = x * std::exp(-0.5 * x * x);
          return g * g * std::exp(-0.5 * x * x / t) / (sd * std::sqrt(2 * std::numbers::pi));
        },
        -12 * sd, 12 * sd, 4000);
  };
  return std::sqrt(simpson(marginal, 0.0, 1.0, 400) / 12.0);
}

}  // namespace

TEST(LimitLaw, IdentityConditionalVarianceIsOneTwelfth) {
  const Path p = simulate_path(bm(), build_grid(1.0, 8, 16), 3, 0);
  EXPECT_NEAR(simulate_limit(identity_function(), p).conditional_variance, 1.0 / 12.0, 1e-14);
}

TEST(LimitLaw, ConstantGivesZeros) {
  const Path p = simulate_path(bm(), build_grid(1.0, 8, 16), 3, 0);
  const LimitSample s = simulate_limit(constant_function(4.0), p);
  EXPECT_EQ(s.bias_part, 0.0);
  EXPECT_EQ(s.mixed_gaussian_part, 0.0);
  EXPECT_EQ(s.conditional_variance, 0.0);
}

TEST(LimitLaw, IdentityLimitVarianceIsOneThird) {
  const TimeGrid g = build_grid(1.0, 4, 8);
  std::vector<double> total;
  for (std::size_t i = 0; i < 100000; ++i) {
    const Path p = simulate_path(bm(), g, 77, i, false);
    const LimitSample s = simulate_limit(identity_function(), p);
    total.push_back(s.bias_part + s.mixed_gaussian_part);
  }
  EXPECT_NEAR(stats::sample_variance(total), 1.0 / 3.0, 0.05 / 3.0);
}

TEST(LimitLaw, RiemannErrorVarianceOracle) {
  // Direct Monte Carlo on Delta^{-1} (Gamma - Riemann) at n = 64.
  const TimeGrid g = build_grid(1.0, 64, 16);
  std::vector<double> scaled;
  for (std::size_t i = 0; i < 20000; ++i) {
    const Path p = simulate_path(bm(), g, 78, i, false);
    const auto obs = CoarseObservations::from_path(p);
    scaled.push_back((reference_value(identity_function(), p, 1.0) -
                      riemann_estimate(identity_function(), obs, 1.0)) /
                     g.coarse_step());
  }
  EXPECT_NEAR(stats::sample_variance(scaled), 1.0 / 3.0, 0.05 / 3.0);
}

TEST(LimitLaw, MixedPartIsGaussianGivenPath) {
  const Path p = simulate_path(bm(), build_grid(1.0, 16, 8), 5, 1);
  const TestFunction f = gaussian_bump();
  std::vector<double> z;
  double cv = 0.0;
  for (std::uint16_t r = 0; r < 10000; ++r) {
    const LimitSample s = simulate_limit(f, p, r);
    cv = s.conditional_variance;
    z.push_back(s.mixed_gaussian_part);
  }
  ASSERT_GT(cv, 0.0);
  for (double& v : z) v /= std::sqrt(cv);
  EXPECT_GT(stats::ks_test_standard_normal(z).p_value, 0.01);
}

TEST(LimitLaw, ScaleEquivariance) {
  const TimeGrid g = build_grid(1.0, 16, 8);
  const PathBundle b = simulate_paths(bm(), g, 300, 6);
  const TestFunction f = gaussian_bump();
  const TestFunction cf = scaled(-3.0, f);
  const Path& p = b.paths[0];
  EXPECT_NEAR(simulate_limit(cf, p).conditional_variance,
              9.0 * simulate_limit(f, p).conditional_variance, 1e-12);
  EXPECT_NEAR(lower_bound_constant(cf, b).value, 3.0 * lower_bound_constant(f, b).value, 1e-12);
}

TEST(LowerBound, IdentityAndConstant) {
  const PathBundle b = simulate_paths(bm(), build_grid(1.0, 8, 8), 100, 2);
  const LowerBound id = lower_bound_constant(identity_function(), b);
  EXPECT_NEAR(id.value, std::sqrt(1.0 / 12.0), 1e-14);
  EXPECT_NEAR(id.std_error, 0.0, 1e-14);
  EXPECT_EQ(lower_bound_constant(constant_function(2.0), b).value, 0.0);
}

TEST(LowerBound, GaussianBumpMatchesMarginalOracle) {
  const double oracle = bump_lower_bound_oracle();
  // closed form of the same integral: int_0^1 t (1 + 2t)^{-3/2} dt / 12
  const double closed = std::sqrt((2.0 * std::sqrt(3.0) + 2.0 / std::sqrt(3.0) - 4.0) / 4.0 / 12.0);
  EXPECT_NEAR(oracle, closed, 1e-6);
  const PathBundle b = simulate_paths(bm(), build_grid(1.0, 32, 16), 4000, 41, 1, false);
  const LowerBound lb = lower_bound_constant(gaussian_bump(), b);
  EXPECT_NEAR(lb.value, oracle, 3.0 * lb.std_error);
}

TEST(LowerBound, EqualsMeanConditionalVariance) {
  const TimeGrid g = build_grid(1.0, 32, 16);
  const PathBundle b = simulate_paths(bm(), g, 2000, 43);
  std::vector<double> cv;
  for (const auto& p : b.paths) cv.push_back(simulate_limit(gaussian_bump(), p).conditional_variance);
  const auto m = stats::mean(cv);
  const LowerBound lb = lower_bound_constant(gaussian_bump(), b);
  EXPECT_NEAR(lb.value * lb.value, m.value, 3.0 * m.std_error);
}

TEST(LowerBound, RequiresBrownian) {
  const auto sv = std::make_shared<const ProcessSpec>(1, FixedPoint{{0.0}}, StochVol{});
  const PathBundle b = simulate_paths(sv, build_grid(1.0, 4, 4), 10, 1);
  EXPECT_ANY_THROW(lower_bound_constant(gaussian_bump(), b));
}
