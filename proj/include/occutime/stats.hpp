#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace occutime::stats {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate mean(std::span<const double> xs);

// Root mean square with delta-method standard error se(MSE) / (2 RMS).
Estimate rms(std::span<const double> xs);

double sample_variance(std::span<const double> xs);

double normal_cdf(double x);

// Complementary Kolmogorov distribution Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - Phi|
  double p_value = 1.0;
  std::size_t count = 0;
};

// One-sample Kolmogorov-Smirnov test against the standard normal law.
KsResult ks_test_standard_normal(std::span<const double> xs);

struct KendallResult {
  double tau = 0.0;
  double p_value = 1.0;  // two-sided
};

// Kendall rank correlation (tau-a, no ties expected). The p-value is exact
// for up to 9 points and uses the normal approximation beyond that.
KendallResult kendall_tau(std::span<const double> x, std::span<const double> y);

struct SlopeFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double lack_of_fit_p = 1.0;
  std::size_t points_used = 0;
  std::size_t points_dropped = 0;
};

// Weighted least squares of y on x with weights 1/se^2. If the chi-square
// lack-of-fit test rejects at `lof_level`, the leading point (smallest n,
// i.e. the first entry) is dropped and the fit repeated while at least three
// points remain.
std::optional<SlopeFit> fit_log_log_slope(std::span<const double> x,
                                          std::span<const double> y,
                                          std::span<const double> y_se,
                                          double lof_level = 0.01);

}  // namespace occutime::stats
