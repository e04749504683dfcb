#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "occutime/errors.hpp"
#include "occutime/function_parser.hpp"
#include "occutime/path_eval.hpp"
#include "occutime/paths.hpp"
#include "occutime/seminorm.hpp"
#include "occutime/test_function.hpp"

using namespace occutime;
using std::numbers::pi;

namespace {

std::vector<TestFunction> smooth_family() {
  return {gaussian_bump(),         hat(),
          lacunary_series(1.2),    power_singularity(0.3),
          identity_function(),     quadratic_function(),
          scaled(-2.5, gaussian_bump()), sum(gaussian_bump(), quadratic_function())};
}

// Normal expectation by Simpson's rule on mean +- 12 sd, split at the kinks
// and jumps of the test functions.
double normal_expectation(const TestFunction& f, double mean, double sd) {
  const double lo = mean - 12 * sd, hi = mean + 12 * sd;
  std::vector<double> cuts{lo, hi};
  for (double c : {-1.0, 0.0, 1.0}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  const int n = 20000;
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], h = (cuts[p + 1] - a) / n;
    auto g = [&](double x) { return f(x) * std::exp(-0.5 * std::pow((x - mean) / sd, 2)); };
    auto edge = [&](double x, double inward) { return g(x + inward * 1e-13 * std::max(1.0, std::abs(x))); };
    double s = edge(a, 1.0) + edge(cuts[p + 1], -1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
    total += s * h / 3.0;
  }
  return total / (sd * std::sqrt(2 * pi));
}

}  // namespace

TEST(TestFunctions, GradientMatchesCentralDifferences) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (const auto& f : smooth_family()) {
    ASSERT_TRUE(f.has_gradient()) << f.name();
    const double h = 1e-5 * f.length_scale();
    int checked = 0;
    while (checked < 100) {
      const double x = unif(gen);
      if (std::abs(x) < 0.05 || std::abs(std::abs(x) - 1.0) < 0.05) continue;  // kinks, pole
      const double fd = (f(x + h) - f(x - h)) / (2 * h);
      const double g = f.gradient(std::span<const double>(&x, 1))[0];
      EXPECT_NEAR(fd, g, 1e-5 * std::max(1.0, std::abs(g))) << f.name() << " at " << x;
      ++checked;
    }
  }
}

TEST(TestFunctions, TensorGradient) {
  const TestFunction f = tensor_product({gaussian_bump(), hat()});
  const std::vector<double> x{0.3, 0.4};
  const auto g = f.gradient(x);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    auto xp = x, xm = x;
    xp[i] += h, xm[i] -= h;
    EXPECT_NEAR((f(xp) - f(xm)) / (2 * h), g[i], 1e-6);
  }
}

TEST(TestFunctions, InverseFourierReproducesValues) {
  // f(x) = (2 pi)^{-1} int F f(u) e^{-iux} du, midpoint rule on [-U, U].
  struct Case {
    TestFunction f;
    double u_max, du;
  };
  const std::vector<Case> cases{{gaussian_bump(), 40.0, 1e-3},
                                {lacunary_series(1.2, 6), 80.0, 1e-3},
                                {hat(), 40000.0, 0.02}};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(-2.5, 2.5);
  for (const auto& c : cases) {
    ASSERT_TRUE(c.f.has_fourier());
    for (int p = 0; p < 20; ++p) {
      const double x = unif(gen);
      double re = 0.0;
      for (double u = -c.u_max + 0.5 * c.du; u < c.u_max; u += c.du) {
        re += (c.f.fourier(u) * std::polar(1.0, -u * x)).real();
      }
      EXPECT_NEAR(re * c.du / (2 * pi), c.f(x), 1e-4) << c.f.name() << " at " << x;
    }
  }
}

TEST(TestFunctions, IndicatorTransformMatchesDirectIntegral) {
  const TestFunction f = indicator(-0.5, 1.5);
  for (double u : {-7.0, -0.3, 0.0, 0.9, 4.0}) {
    const int n = 20000;
    std::complex<double> s = 0.0;
    for (int i = 0; i < n; ++i) s += std::polar(1.0, u * (-0.5 + 2.0 * (i + 0.5) / n));
    s *= 2.0 / n;
    EXPECT_NEAR(std::abs(f.fourier(u) - s), 0.0, 1e-7) << u;
  }
}

TEST(TestFunctions, GaussianExpectationsMatchDenseQuadrature) {
  const std::vector<TestFunction> fs{gaussian_bump(), hat(), indicator(0.0, 1.0),
                                     lacunary_series(1.2), quadratic_function()};
  for (const auto& f : fs) {
    for (auto [m, sd] : {std::pair{0.0, 0.3}, std::pair{0.7, 1.1}, std::pair{-1.2, 0.05}}) {
      const double mean[] = {m};
      EXPECT_NEAR(f.gaussian_expectation(mean, sd), normal_expectation(f, m, sd), 1e-7)
          << f.name() << " m=" << m << " sd=" << sd;
      if (f.name() == "gaussian_bump" || f.name() == "quadratic") {
        EXPECT_NEAR(f.gaussian_expectation(mean, sd, 64, false), normal_expectation(f, m, sd),
                    1e-9)
            << f.name() << " (Hermite)";
      }
    }
  }
}

TEST(TestFunctions, Capabilities) {
  const double x[] = {0.2};
  double g[1];
  EXPECT_THROW(indicator(0, 1).gradient(x, g), CapabilityError);
  EXPECT_THROW(power_singularity(0.3).fourier(1.0), CapabilityError);
  EXPECT_THROW(complex_exponential({1.0})(0.3), CapabilityError);
  EXPECT_NEAR(std::abs(complex_exponential({2.0}).complex_value(x) - std::polar(1.0, 0.4)), 0.0,
              1e-15);
  EXPECT_THROW(indicator(1, 0), ArgumentError);
  EXPECT_THROW(lacunary_series(-1.0), ArgumentError);
}

TEST(TestFunctions, ParserRoundTripsNames) {
  const std::vector<std::string> exprs{
      "gaussian_bump",         "hat",
      "indicator(0, 1)",       "indicator(a=-1; b=2)",
      "power(alpha=0.3)",      "lacunary(s=1.2, J=12, width=2)",
      "identity",              "quadratic",
      "constant(2.5)",         "scaled(3, hat)",
      "sum(hat, gaussian_bump)", "tensor(gaussian_bump, hat)",
      "exponential(u=1 2)"};
  for (const auto& e : exprs) {
    const TestFunction f = parse_function(e);
    const TestFunction g = parse_function(f.name());
    EXPECT_EQ(f.name(), g.name()) << e;
    if (!f.is_complex()) {
      std::vector<double> x(f.dim(), 0.37);
      EXPECT_EQ(f(x), g(x)) << e;
    }
  }
  EXPECT_THROW(parse_function("gaussain"), ConfigError);
  EXPECT_THROW(parse_function("indicator(a=0, c=1)"), ConfigError);
  EXPECT_THROW(parse_function("indicator(0, 1"), ConfigError);
}

TEST(PathEval, ValuesAndGradients) {
  DeterministicGaussian ode;
  ode.drift = TimeFunction::constant(1.0);
  ode.diffusion = TimeFunction::constant(0.0);
  ode.allow_degenerate = true;
  const TimeGrid grid = build_grid(2.0, 2, 1);
  const auto from0 = std::make_shared<const ProcessSpec>(1, FixedPoint{{0.0}}, ode);
  const auto from_half = std::make_shared<const ProcessSpec>(1, FixedPoint{{-0.5}}, ode);
  const Path p0 = simulate_path(from0, grid, 1, 0);
  const Path p1 = simulate_path(from_half, grid, 1, 0);

  const auto id = eval_on_path(identity_function(), p0, NodeSet::kCoarse);
  ASSERT_EQ(id.values.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(id.values[k], k, 1e-14);

  const auto ind = eval_on_path(indicator(0, 1), p1, NodeSet::kCoarse);
  EXPECT_EQ(ind.values, (std::vector<double>{0.0, 1.0, 0.0}));

  const TimeGrid one = build_grid(1.0, 1, 1);
  const Path still = simulate_path(
      std::make_shared<const ProcessSpec>(ProcessSpec::brownian(1, FixedPoint{{0.0}})), one, 1, 0);
  const auto gb = eval_on_path(gaussian_bump(), still, NodeSet::kFine, true);
  EXPECT_EQ(gb.gradients[0], 0.0);
  EXPECT_THROW(eval_on_path(indicator(0, 1), still, NodeSet::kFine, true), CapabilityError);
}

TEST(Seminorm, ZeroFunction) {
  for (double s : {0.0, 0.5, 2.0}) {
    EXPECT_EQ(sobolev_seminorm(constant_function(0.0), s).value, 0.0);
    EXPECT_EQ(fourier_lebesgue_seminorm(constant_function(0.0), s).value, 0.0);
  }
}

TEST(Seminorm, GaussianBumpClosedForms) {
  // int 2 pi e^{-u^2} u^2 du = pi^{3/2};  int 2 pi e^{-u^2} |u| du = 2 pi.
  EXPECT_NEAR(sobolev_seminorm(gaussian_bump(), 1.0).value, std::pow(pi, 0.75), 1e-6);
  EXPECT_NEAR(sobolev_seminorm(gaussian_bump(), 0.5).value, std::sqrt(2 * pi), 1e-6);
  EXPECT_NEAR(fourier_lebesgue_seminorm(gaussian_bump(), 0.0).value, 2 * pi, 1e-6);
  // int sqrt(2 pi) e^{-u^2/2} |u| du = 2 sqrt(2 pi)
  EXPECT_NEAR(fourier_lebesgue_seminorm(gaussian_bump(), 1.0).value, 2 * std::sqrt(2 * pi), 1e-6);
}

TEST(Seminorm, HatClosedForm) {
  // |F hat|^2 u^2 = 16 sin^4(u/2) / u^2, whose integral is 4 pi.
  const auto r = sobolev_seminorm(hat(), 1.0);
  EXPECT_FALSE(r.divergent);
  EXPECT_NEAR(r.value, std::sqrt(4 * pi), 2e-3);
  EXPECT_TRUE(sobolev_seminorm(hat(), 1.7).divergent);
}

TEST(Seminorm, TensorOfBumps) {
  const auto r = sobolev_seminorm(tensor_product({gaussian_bump(), gaussian_bump()}), 1.0);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.value, 2 * std::pow(pi, 1.5), 1e-5);
}

TEST(Seminorm, IndicatorDivergenceIsMonotone) {
  const TestFunction f = indicator(0, 1);
  for (double s : {0.5, 0.55, 0.6, 0.75, 1.0}) EXPECT_TRUE(sobolev_seminorm(f, s).divergent) << s;
  for (double s : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    const auto r = sobolev_seminorm(f, s);
    EXPECT_FALSE(r.divergent) << s;
    EXPECT_TRUE(std::isfinite(r.value));
  }
  EXPECT_TRUE(fourier_lebesgue_seminorm(f, 1.0).divergent);
}

TEST(Seminorm, IndicatorAtZeroOrderIsPlancherel) {
  // ||F 1_[0,1]||_2^2 = 2 pi.
  EXPECT_NEAR(sobolev_seminorm(indicator(0, 1), 0.0).value, std::sqrt(2 * pi), 2e-3);
}

TEST(Seminorm, Homogeneity) {
  for (double c : {3.0, -2.0}) {
    for (const auto& f : {gaussian_bump(), hat(), lacunary_series(1.2)}) {
      const double base = sobolev_seminorm(f, 0.8).value;
      EXPECT_NEAR(sobolev_seminorm(scaled(c, f), 0.8).value, std::abs(c) * base, 1e-9 * base);
    }
  }
}

TEST(Seminorm, LacunaryBand) {
  const TestFunction f = lacunary_series(1.2, 20);
  for (double s : {0.5, 1.0, 1.1}) EXPECT_FALSE(sobolev_seminorm(f, s).divergent) << s;
  for (double s : {1.41, 1.6, 2.0}) EXPECT_TRUE(sobolev_seminorm(f, s).divergent) << s;
}

TEST(Seminorm, PowerSingularityBand) {
  const TestFunction f = power_singularity(0.3);
  const auto fin = sobolev_seminorm(f, 0.1);
  EXPECT_FALSE(fin.divergent);
  EXPECT_EQ(fin.method, "discrete_transform");
  EXPECT_TRUE(sobolev_seminorm(f, 0.45).divergent);
}

TEST(Seminorm, RejectsNegativeOrder) {
  EXPECT_THROW(sobolev_seminorm(gaussian_bump(), -0.1), ArgumentError);
}
