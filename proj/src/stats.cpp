#include "occutime/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "occutime/errors.hpp"

namespace occutime::stats {

Estimate mean(std::span<const double> xs) {
  if (xs.empty()) return {};
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {m, 0.0};
  return {m, std::sqrt(sample_variance(xs) / n)};
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / (n - 1.0);
}

Estimate rms(std::span<const double> xs) {
  if (xs.empty()) return {};
  std::vector<double> squares(xs.size());
  std::transform(xs.begin(), xs.end(), squares.begin(),
                 [](double x) { return x * x; });
  const Estimate mse = mean(squares);
  const double root = std::sqrt(mse.value);
  if (root == 0.0) return {0.0, 0.0};
  return {root, mse.std_error / (2.0 * root)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_standard_normal(std::span<const double> xs) {
  KsResult result;
  result.count = xs.size();
  if (xs.empty()) return result;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf,
                  cdf - static_cast<double>(i) / n});
  }
  result.statistic = d;
  const double root_n = std::sqrt(n);
  result.p_value = kolmogorov_q((root_n + 0.12 + 0.11 / root_n) * d);
  return result;
}

namespace {

int concordance_sum(std::span<const double> x, std::span<const double> y) {
  int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double prod = (x[j] - x[i]) * (y[j] - y[i]);
      s += (prod > 0) - (prod < 0);
    }
  }
  return s;
}

// Distribution of the concordance sum under independence: enumerate all
// permutations by counting inversions (Mahonian numbers).
std::vector<double> inversion_distribution(int n) {
  std::vector<double> counts{1.0};
  for (int k = 2; k <= n; ++k) {
    std::vector<double> next(counts.size() + k - 1, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (int j = 0; j < k; ++j) next[i + j] += counts[i];
    }
    counts = std::move(next);
  }
  return counts;
}

}  // namespace

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("kendall_tau: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) return {};
  const int s = concordance_sum(x, y);
  const double pairs = 0.5 * n * (n - 1.0);
  KendallResult result;
  result.tau = s / pairs;
  if (n <= 9) {
    // s = pairs - 2 * inversions.
    const auto dist = inversion_distribution(n);
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    double tail = 0.0;
    for (std::size_t inv = 0; inv < dist.size(); ++inv) {
      const double s_perm = pairs - 2.0 * static_cast<double>(inv);
      if (std::abs(s_perm) >= std::abs(s) - 1e-9) tail += dist[inv];
    }
    result.p_value = std::min(1.0, tail / total);
  } else {
    const double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    const double z = std::abs(s) / std::sqrt(var);
    result.p_value = 2.0 * (1.0 - normal_cdf(z));
  }
  return result;
}

namespace {

SlopeFit weighted_fit(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_se = std::sqrt(1.0 / sxx);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    chi2 += w[i] * r * r;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  fit.lack_of_fit_p = dof > 0 ? boost::math::gamma_q(0.5 * dof, 0.5 * chi2) : 1.0;
  fit.ci_low = fit.slope - 1.96 * fit.slope_se;
  fit.ci_high = fit.slope + 1.96 * fit.slope_se;
  fit.points_used = x.size();
  return fit;
}

}  // namespace

std::optional<SlopeFit> fit_log_log_slope(std::span<const double> x,
                                          std::span<const double> y,
                                          std::span<const double> y_se,
                                          double lof_level) {
  if (x.size() != y.size() || x.size() != y_se.size()) {
    throw ArgumentError("fit_log_log_slope: size mismatch");
  }
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(y[i]) || !(y_se[i] > 0.0)) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
    ws.push_back(1.0 / (y_se[i] * y_se[i]));
  }
  if (xs.size() < 2) return std::nullopt;

  std::size_t first = 0;
  SlopeFit fit = weighted_fit(xs, ys, ws);
  while (fit.lack_of_fit_p < lof_level && xs.size() - first > 3) {
    ++first;
    fit = weighted_fit(std::span(xs).subspan(first), std::span(ys).subspan(first),
                       std::span(ws).subspan(first));
  }
  fit.points_dropped = first;
  return fit;
}

}  // namespace occutime::stats
