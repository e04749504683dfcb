#include "occutime/fourier_diagnostics.hpp"

#include <cmath>
#include <limits>

#include "occutime/errors.hpp"
#include "occutime/parallel.hpp"
#include "occutime/quadrature.hpp"
#include "occutime/stats.hpp"

namespace occutime {

namespace {

const cplx kI(0.0, 1.0);

void require_gaussian(const ProcessSpec& spec) {
  if (!spec.is_gaussian()) {
    throw CapabilityError("conditional laws are only tractable for Gaussian process specs");
  }
}

double coordinate_sum(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s;
}

// phi(h, r) = E[exp(i <u, X_r - X_h>) | F_h].
cplx char_function(std::span<const double> u, const ProcessSpec& spec, double h, double r) {
  const double phase = coordinate_sum(u) * spec.drift_integral(h, r);
  const double decay = 0.5 * spec.mixed_norm_squared(u) * spec.diffusion_square_integral(h, r);
  return std::exp(cplx(-decay, phase));
}

cplx plane_wave(std::span<const double> u, std::span<const double> x,
                std::span<const double> xi) {
  double phase = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) phase += u[i] * (x[i] + xi[i]);
  return std::polar(1.0, phase);
}

// Isotropic scale a when the mixing matrix equals a * I.
double isotropic_scale(const ProcessSpec& spec) {
  const auto d = static_cast<std::size_t>(spec.dim());
  const auto& a = spec.mixing();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j && a[i * d + j] != 0.0) {
        throw CapabilityError("real test functions need an isotropic diffusion matrix");
      }
    }
    if (a[i * d + i] != a[0]) {
      throw CapabilityError("real test functions need an isotropic diffusion matrix");
    }
  }
  return std::abs(a[0]);
}

// E[f(y + m(h,r) 1 + N(0, v(h,r) a^2 I))] for real f.
double conditional_real(const TestFunction& f, const ProcessSpec& spec,
                        std::span<const double> y, double h, double r, int hermite) {
  const double shift = spec.drift_integral(h, r);
  const double sd = std::sqrt(std::max(spec.diffusion_square_integral(h, r), 0.0)) *
                    isotropic_scale(spec);
  std::vector<double> mean(y.begin(), y.end());
  for (auto& m : mean) m += shift;
  return f.gaussian_expectation(mean, sd, hermite);
}

std::vector<double> shifted(std::span<const double> x, std::span<const double> xi) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + xi[i];
  return y;
}

// Path-independent per-interval weights for F1 and F2:
// int (t_k - r - Delta/2) {i<u,b_r>, -|sigma_r^T u|^2/2} phi(t_{k-1}, r) dr.
struct FWeights {
  cplx f1, f2;
};

FWeights f_weights(std::span<const double> u, const ProcessSpec& spec, double a, double b,
                   int nodes) {
  const double delta = b - a;
  const double drift_coef = coordinate_sum(u);
  const double diff_coef = -0.5 * spec.mixed_norm_squared(u);
  FWeights w;
  w.f1 = integrate_gl(
      [&](double r) {
        return (b - r - 0.5 * delta) * kI * (drift_coef * spec.drift_level(r)) *
               char_function(u, spec, a, r);
      },
      a, b, nodes);
  w.f2 = integrate_gl(
      [&](double r) {
        const double level = spec.diffusion_level(r);
        return (b - r - 0.5 * delta) * (diff_coef * level * level) *
               char_function(u, spec, a, r);
      },
      a, b, nodes);
  return w;
}

cplx compute_f_term(std::span<const double> u, const CoarseObservations& obs, double t,
                    int nodes, bool drift) {
  require_gaussian(obs.spec());
  if (static_cast<int>(u.size()) != obs.dim()) throw ArgumentError("frequency has wrong dimension");
  const TimeGrid& grid = obs.grid();
  const std::size_t k_max = grid.coarse_index_floor(t);
  cplx total = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const FWeights w = f_weights(u, obs.spec(), grid.coarse_time(k - 1), grid.coarse_time(k), nodes);
    total += plane_wave(u, obs.state(k - 1), obs.shift()) * (drift ? w.f1 : w.f2);
  }
  return total;
}

}  // namespace

double char_increment(std::span<const double> u, const ProcessSpec& spec, double h,
                      double r) {
  require_gaussian(spec);
  if (!(h <= r)) throw ArgumentError("char_increment needs h <= r");
  if (static_cast<int>(u.size()) != spec.dim()) throw ArgumentError("frequency has wrong dimension");
  return std::abs(char_function(u, spec, h, r));
}

cplx compute_F1(std::span<const double> u, const CoarseObservations& obs, double t,
                int time_nodes) {
  return compute_f_term(u, obs, t, time_nodes, true);
}

cplx compute_F2(std::span<const double> u, const CoarseObservations& obs, double t,
                int time_nodes) {
  return compute_f_term(u, obs, t, time_nodes, false);
}

cplx compute_E(const TestFunction& f, const CoarseObservations& obs, double t,
               int hermite_nodes) {
  const ProcessSpec& spec = obs.spec();
  require_gaussian(spec);
  const TimeGrid& grid = obs.grid();
  const std::size_t k_max = grid.coarse_index_floor(t);
  const double delta = grid.coarse_step();
  const auto* freq = f.model().exponential_frequency();
  if (!freq && f.is_complex()) throw CapabilityError(f.name() + " has no conditional law");

  cplx total = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double a = grid.coarse_time(k - 1), b = grid.coarse_time(k);
    if (freq) {
      total += plane_wave(*freq, obs.state(k - 1), obs.shift()) *
               (char_function(*freq, spec, a, b) - 1.0);
    } else {
      const auto y = shifted(obs.state(k - 1), obs.shift());
      total += conditional_real(f, spec, y, a, b, hermite_nodes) - f(y);
    }
  }
  return 0.5 * delta * total;
}

DecompositionTrace decompose(const TestFunction& f, const Path& path, double t,
                             int time_nodes, int hermite_nodes) {
  const ProcessSpec& spec = path.spec();
  require_gaussian(spec);
  const TimeGrid& grid = path.grid();
  if (!(t >= 0.0 && t <= grid.horizon() * (1.0 + 1e-12))) {
    throw ArgumentError("evaluation time must lie in [0, T]");
  }
  const auto* freq = f.model().exponential_frequency();
  if (!freq && f.is_complex()) throw CapabilityError(f.name() + " has no conditional law");
  if (f.dim() != path.dim()) throw ArgumentError("function and process dimensions differ");

  const std::size_t k_max = grid.coarse_index_floor(t);
  const std::size_t m = grid.refine_factor();
  const double delta = grid.coarse_step();
  const double half_fine = 0.5 * grid.fine_step();
  const auto xi = path.shift();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto value_at = [&](std::size_t j) -> cplx {
    const auto y = shifted(path.state(j), xi);
    return freq ? f.complex_value(y) : cplx(f(y), 0.0);
  };

  DecompositionTrace trace;
  if (freq) trace.u = *freq;
  DecompositionRow acc;
  cplx next_value = value_at(0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double a = grid.coarse_time(k - 1), b = grid.coarse_time(k);
    const cplx start = next_value;

    cplx fine = 0.0;
    cplx left = start;
    for (std::size_t j = (k - 1) * m + 1; j <= k * m; ++j) {
      const cplx right = value_at(j);
      fine += half_fine * (left + right);
      left = right;
    }
    next_value = left;

    cplx cond_integral, endpoint;
    if (freq) {
      cond_integral = start * integrate_gl(
          [&](double r) { return char_function(*freq, spec, a, r); }, a, b, time_nodes);
      endpoint = 0.5 * delta * start * (char_function(*freq, spec, a, b) - 1.0);
      const FWeights w = f_weights(*freq, spec, a, b, time_nodes);
      acc.drift_part += start * w.f1;
      acc.diffusion_part += start * w.f2;
    } else {
      const auto y = shifted(path.state((k - 1) * m), xi);
      cond_integral = integrate_gl(
          [&](double r) { return conditional_real(f, spec, y, a, r, hermite_nodes); }, a, b,
          time_nodes);
      endpoint = 0.5 * delta * (conditional_real(f, spec, y, a, b, hermite_nodes) - start.real());
      acc.drift_part = acc.diffusion_part = cplx(nan, nan);
    }

    acc.k = k;
    acc.t = b;
    acc.martingale += fine - cond_integral;
    acc.drift += cond_integral - delta * start;
    acc.endpoint += endpoint;
    acc.realized_error += fine - delta * start;
    trace.rows.push_back(acc);
  }
  return trace;
}

GProbeTable g_decay_probe(std::span<const double> u_list,
                          std::span<const std::size_t> n_list,
                          std::shared_ptr<const ProcessSpec> spec,
                          const GProbeSettings& settings) {
  require_gaussian(*spec);
  if (settings.paths < 2) throw ArgumentError("g probe needs at least two paths");
  const auto d = static_cast<std::size_t>(spec->dim());

  GProbeTable table;
  std::vector<std::vector<double>> per_u(u_list.size());
  for (std::size_t n : n_list) {
    const TimeGrid grid(settings.horizon, n, 1);
    const double delta = grid.coarse_step();

    // Path-independent interval weights per frequency.
    std::vector<std::vector<double>> freqs(u_list.size(), std::vector<double>(d, 0.0));
    std::vector<std::vector<FWeights>> weights(u_list.size());
    for (std::size_t i = 0; i < u_list.size(); ++i) {
      freqs[i][0] = u_list[i];
      for (std::size_t k = 1; k <= n; ++k) {
        weights[i].push_back(
            f_weights(freqs[i], *spec, grid.coarse_time(k - 1), grid.coarse_time(k),
                      settings.time_nodes));
      }
    }

    // sup_k (|F1|^2 + |F2|^2), one slot per (path, frequency).
    std::vector<double> sups(settings.paths * u_list.size());
    parallel_for(settings.paths, settings.threads, [&](std::size_t p) {
      const Path path = simulate_path(spec, grid, settings.seed, p, false);
      const auto xi = path.shift();
      for (std::size_t i = 0; i < u_list.size(); ++i) {
        cplx f1 = 0.0, f2 = 0.0;
        double sup = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
          const cplx wave = plane_wave(freqs[i], path.state(k - 1), xi);
          f1 += wave * weights[i][k - 1].f1;
          f2 += wave * weights[i][k - 1].f2;
          sup = std::max(sup, std::norm(f1) + std::norm(f2));
        }
        sups[p * u_list.size() + i] = sup;
      }
    });

    for (std::size_t i = 0; i < u_list.size(); ++i) {
      std::vector<double> column(settings.paths);
      for (std::size_t p = 0; p < settings.paths; ++p) column[p] = sups[p * u_list.size() + i];
      const auto est = stats::mean(column);
      const double norm = 1.0 / (delta * delta * std::pow(1.0 + u_list[i] * u_list[i],
                                                          settings.smoothness));
      GProbeRow row{u_list[i], n, est.value * norm, est.std_error * norm};
      table.bounded = table.bounded && std::isfinite(row.g_hat);
      table.sup_g = std::max(table.sup_g, row.g_hat);
      per_u[i].push_back(row.g_hat);
      table.rows.push_back(row);
    }
  }

  std::vector<double> ns(n_list.begin(), n_list.end());
  for (std::size_t i = 0; i < u_list.size(); ++i) {
    GTrend trend{u_list[i]};
    if (ns.size() >= 3) {
      const auto kt = stats::kendall_tau(ns, per_u[i]);
      trend.kendall_tau = kt.tau;
      trend.p_value = kt.p_value;
      trend.decreasing = kt.tau < 0.0 && kt.p_value < 0.05;
    }
    table.trends.push_back(trend);
  }
  return table;
}

}  // namespace occutime
