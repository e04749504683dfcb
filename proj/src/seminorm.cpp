#include "occutime/seminorm.hpp"

#include <fftw3.h>

#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>

#include "occutime/errors.hpp"
#include "occutime/quadrature.hpp"

namespace occutime {

namespace {

using Profile = std::function<double(double)>;  // u >= 0 -> integrand

struct HalfLineIntegral {
  double body = 0.0;                // int_0^{u_max}
  std::vector<double> octaves;      // octave masses, top octave first
};

// Integrates g over [0, u_max]: geometric panels towards u = 0 (where |u|^q
// may be singular), then uniform panels of width `panel` up to u_max.
HalfLineIntegral integrate_profile(const Profile& g, double panel,
                                   const SeminormSettings& st) {
  const double u_max = st.u_max;
  panel = std::min(panel, u_max);
  auto gl = [&](double a, double b) { return integrate_gl(g, a, b, st.panel_nodes); };

  HalfLineIntegral out;
  out.octaves.assign(st.tail_octaves, 0.0);
  double lo = panel * std::exp2(-40);
  out.body += gl(0.0, lo);
  while (lo < panel) {
    out.body += gl(lo, 2.0 * lo);
    lo *= 2.0;
  }

  // Panels never straddle an octave edge u_max 2^{-k}.
  std::vector<double> edges;
  for (int k = st.tail_octaves; k >= 0; --k) edges.push_back(u_max * std::exp2(-k));
  double a = panel;
  for (std::size_t e = 0; e <= edges.size(); ++e) {
    const double stop = e < edges.size() ? edges[e] : u_max;
    if (stop <= a) continue;
    const int count = static_cast<int>(std::ceil((stop - a) / panel));
    const double w = (stop - a) / count;
    double mass = 0.0;
    for (int i = 0; i < count; ++i) mass += gl(a + i * w, a + (i + 1) * w);
    out.body += mass;
    // Edge e closes octave index (tail_octaves - e) counted from the top.
    const int octave = st.tail_octaves - static_cast<int>(e);
    if (e > 0 && octave >= 0 && octave < st.tail_octaves) out.octaves[octave] += mass;
    a = stop;
  }
  return out;
}

struct Tail {
  bool divergent = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double extra = 0.0;
};

Tail analyse_tail(const HalfLineIntegral& h, const SeminormSettings& st) {
  Tail t;
  const double top = h.octaves.front();
  if (!(top > 1e-13 * std::max(h.body, std::numeric_limits<double>::min()))) return t;
  // Least squares of log(octave mass) on log(octave centre).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (int k = 0; k < static_cast<int>(h.octaves.size()); ++k) {
    if (!(h.octaves[k] > 0.0)) continue;
    const double x = -k * std::numbers::ln2;
    const double y = std::log(h.octaves[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 3) {
    t.divergent = true;
    return t;
  }
  t.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (t.slope > -st.divergence_eps) {
    t.divergent = true;
    return t;
  }
  t.extra = top / (std::exp2(-t.slope) - 1.0);
  return t;
}

// |F f(u_k)| on u_k = 2 pi k / (N h), k = 0..N/2, from midpoint samples on
// [-L, L] with L = 8 * support radius. Nyquist is at least 4 u_max.
struct Spectrum {
  double du = 0.0;
  std::vector<double> modulus;
};

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

Spectrum discrete_spectrum(const TestFunction& f, const SeminormSettings& st) {
  const double radius = f.support_radius().value();
  const double half = std::max(8.0 * radius, 16.0);
  const double h_target = std::numbers::pi / (4.0 * st.u_max);
  std::size_t n = 1;
  while (static_cast<double>(n) * h_target < 2.0 * half) n <<= 1;
  const double h = 2.0 * half / static_cast<double>(n);

  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < n; ++j) {
    in[j] = f(-half + (static_cast<double>(j) + 0.5) * h);
  }
  fftw_execute(plan);

  Spectrum s;
  s.du = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  s.modulus.resize(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) s.modulus[k] = h * std::hypot(out[k][0], out[k][1]);
  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

// Trapezoid sums over the spectrum samples, split into the same octaves.
HalfLineIntegral integrate_samples(const Spectrum& s, double p, double q,
                                   const SeminormSettings& st) {
  HalfLineIntegral out;
  out.octaves.assign(st.tail_octaves, 0.0);
  for (std::size_t k = 0; k + 1 < s.modulus.size(); ++k) {
    const double a = k * s.du;
    const double b = a + s.du;
    if (b > st.u_max) break;
    auto g = [&](std::size_t i, double u) {
      return std::pow(s.modulus[i], p) * (u == 0.0 ? (q == 0.0 ? 1.0 : 0.0) : std::pow(u, q));
    };
    const double mass = 0.5 * s.du * (g(k, a) + g(k + 1, b));
    out.body += mass;
    const double mid = 0.5 * (a + b);
    const int octave = static_cast<int>(std::floor(std::log2(st.u_max / mid)));
    if (octave >= 0 && octave < st.tail_octaves) out.octaves[octave] += mass;
  }
  return out;
}

struct Component {
  double value = 0.0;  // integral over the real line (both half-lines)
  Tail tail;
  std::string method;
};

// int_R |F f(u)|^p |u|^q du for a one-dimensional f.
Component integrate_1d(const TestFunction& f, double p, double q,
                       const SeminormSettings& st) {
  Component c;
  HalfLineIntegral h;
  if (f.has_fourier()) {
    c.method = "closed_form";
    const double radius = f.support_radius().value_or(1.0);
    const double panel = 1.0 / std::max(1.0, radius);
    Profile g = [&](double u) {
      const double m = std::abs(f.fourier(u));
      if (m == 0.0) return 0.0;
      return std::pow(m, p) * (q == 0.0 ? 1.0 : std::pow(u, q));
    };
    h = integrate_profile(g, panel, st);
    // Real f: |F f(-u)| = |F f(u)|. Complex-valued f are rejected upstream.
  } else if (f.support_radius()) {
    c.method = "discrete_transform";
    h = integrate_samples(discrete_spectrum(f, st), p, q, st);
  } else {
    throw CapabilityError(f.name() + " has no Fourier transform and is not integrable");
  }
  c.tail = analyse_tail(h, st);
  c.value = 2.0 * (h.body + c.tail.extra);
  return c;
}

SeminormResult seminorm(const TestFunction& f, double s, bool sobolev,
                        const SeminormSettings& st) {
  if (!(s >= 0.0)) throw ArgumentError("seminorm order s must be >= 0");
  if (!(st.u_max > 0.0) || st.tail_octaves < 3) throw ArgumentError("bad seminorm settings");
  if (f.is_complex()) throw CapabilityError(f.name() + " is complex-valued");
  const double p = sobolev ? 2.0 : 1.0;
  const double q = sobolev ? 2.0 * s : s;

  SeminormResult r;
  auto finish = [&](double integral) {
    r.value = sobolev ? std::sqrt(std::max(integral, 0.0)) : integral;
  };

  const auto* factors = f.model().tensor_factors();
  if (f.dim() == 1) {
    const Component c = integrate_1d(f, p, q, st);
    r.divergent = c.tail.divergent;
    r.tail_slope = c.tail.slope;
    r.tail_estimate = 2.0 * c.tail.extra;
    r.method = c.method;
    finish(c.value);
    return r;
  }
  if (!factors) {
    throw CapabilityError("seminorms in d >= 2 need a tensor-product function");
  }

  // |u|^q <= max(1, d^{q/2 - 1}) sum_i |u_i|^q, with equality for q in {0, 2}.
  const std::size_t d = factors->size();
  std::vector<Component> plain, weighted;
  for (const auto& g : *factors) {
    plain.push_back(integrate_1d(g, p, 0.0, st));
    if (q != 0.0) weighted.push_back(integrate_1d(g, p, q, st));
  }
  r.method = plain.front().method;
  double integral = 0.0;
  if (q == 0.0) {
    integral = 1.0;
    for (const auto& c : plain) {
      integral *= c.value;
      r.divergent = r.divergent || c.tail.divergent;
    }
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      double term = weighted[i].value;
      r.divergent = r.divergent || weighted[i].tail.divergent;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        term *= plain[j].value;
        r.divergent = r.divergent || plain[j].tail.divergent;
      }
      integral += term;
    }
    const double factor = std::max(1.0, std::pow(static_cast<double>(d), 0.5 * q - 1.0));
    r.exact = q == 2.0;
    integral *= factor;
  }
  r.tail_slope = std::numeric_limits<double>::quiet_NaN();
  finish(integral);
  return r;
}

}  // namespace

SeminormResult sobolev_seminorm(const TestFunction& f, double s,
                                const SeminormSettings& settings) {
  return seminorm(f, s, true, settings);
}

SeminormResult fourier_lebesgue_seminorm(const TestFunction& f, double s,
                                         const SeminormSettings& settings) {
  return seminorm(f, s, false, settings);
}

}  // namespace occutime
