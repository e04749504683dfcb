#include "occutime/process.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "occutime/errors.hpp"
#include "occutime/quadrature.hpp"

namespace occutime {

// --- TimeFunction -----------------------------------------------------------

TimeFunction TimeFunction::constant(double c) {
  TimeFunction f;
  f.kind_ = Kind::kConstant;
  f.a_ = c;
  return f;
}

TimeFunction TimeFunction::linear(double a, double b) {
  TimeFunction f;
  f.kind_ = Kind::kLinear;
  f.a_ = a;
  f.b_ = b;
  return f;
}

TimeFunction TimeFunction::sine(double a, double c, double omega) {
  TimeFunction f;
  f.kind_ = Kind::kSine;
  f.a_ = a;
  f.b_ = c;
  f.omega_ = omega;
  return f;
}

TimeFunction TimeFunction::custom(std::function<double(double)> fn,
                                  std::string label) {
  TimeFunction f;
  f.kind_ = Kind::kCustom;
  f.custom_ = std::move(fn);
  f.label_ = std::move(label);
  return f;
}

double TimeFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::kConstant: return a_;
    case Kind::kLinear: return a_ + b_ * t;
    case Kind::kSine: return a_ + b_ * std::sin(omega_ * t);
    case Kind::kCustom: return custom_(t);
  }
  return 0.0;
}

bool TimeFunction::is_constant() const {
  return kind_ == Kind::kConstant || (kind_ == Kind::kLinear && b_ == 0.0) ||
         (kind_ == Kind::kSine && (b_ == 0.0 || omega_ == 0.0));
}

double TimeFunction::integral(double s, double t) const {
  const double h = t - s;
  switch (kind_) {
    case Kind::kConstant: return a_ * h;
    case Kind::kLinear: return 0.5 * h * ((*this)(s) + (*this)(t));
    case Kind::kSine: {
      if (omega_ == 0.0) return a_ * h;
      const double sin_part =
          2.0 * std::sin(0.5 * omega_ * (t + s)) * std::sin(0.5 * omega_ * h) / omega_;
      return a_ * h + b_ * sin_part;
    }
    case Kind::kCustom:
      return integrate_gl([&](double r) { return custom_(r); }, s, t, 16);
  }
  return 0.0;
}

double TimeFunction::integral_of_square(double s, double t) const {
  const double h = t - s;
  switch (kind_) {
    case Kind::kConstant: return a_ * a_ * h;
    case Kind::kLinear: {
      const double fs = (*this)(s), ft = (*this)(t);
      return h * (fs * fs + fs * ft + ft * ft) / 3.0;
    }
    case Kind::kSine: {
      if (omega_ == 0.0) return a_ * a_ * h;
      const double sin_int =
          2.0 * std::sin(0.5 * omega_ * (t + s)) * std::sin(0.5 * omega_ * h) / omega_;
      const double sin2_int =
          0.5 * h - std::cos(omega_ * (t + s)) * std::sin(omega_ * h) / (2.0 * omega_);
      return a_ * a_ * h + 2.0 * a_ * b_ * sin_int + b_ * b_ * sin2_int;
    }
    case Kind::kCustom:
      return integrate_gl([&](double r) { return custom_(r) * custom_(r); }, s, t, 16);
  }
  return 0.0;
}

std::string TimeFunction::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::kConstant: out << "constant(" << a_ << ")"; break;
    case Kind::kLinear: out << "linear(" << a_ << ", " << b_ << ")"; break;
    case Kind::kSine: out << "sine(" << a_ << ", " << b_ << ", " << omega_ << ")"; break;
    case Kind::kCustom: out << "custom:" << label_; break;
  }
  return out.str();
}

// --- ProcessSpec ------------------------------------------------------------

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::kBrownian: return "brownian";
    case ProcessKind::kDeterministicGaussian: return "deterministic_gaussian";
    case ProcessKind::kStochVol: return "stochvol";
  }
  return "unknown";
}

namespace {

std::vector<double> identity(int d) {
  std::vector<double> a(static_cast<std::size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i * d + i)] = 1.0;
  return a;
}

double min_eigenvalue_aat(const std::vector<double>& a, int d) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      mat(a.data(), d, d);
  const Eigen::MatrixXd aat = mat * mat.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(aat, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

ProcessSpec::ProcessSpec(int dim, InitialLaw initial, Coefficients coefficients,
                         std::optional<ShiftLaw> shift, double validation_horizon)
    : dim_(dim),
      initial_(std::move(initial)),
      coefficients_(std::move(coefficients)),
      shift_(shift) {
  if (dim < 1) throw ArgumentError("process dimension must be >= 1");
  if (auto* fixed = std::get_if<FixedPoint>(&initial_)) {
    if (fixed->x0.size() == 1 && dim > 1) fixed->x0.assign(dim, fixed->x0[0]);
    if (fixed->x0.empty()) fixed->x0.assign(dim, 0.0);
    if (static_cast<int>(fixed->x0.size()) != dim) {
      throw ArgumentError("initial point has wrong dimension");
    }
  }
  if (auto* box = std::get_if<UniformBox>(&initial_)) {
    if (!(box->high > box->low)) throw ArgumentError("uniform initial law needs low < high");
  }
  if (auto* gauss = std::get_if<GaussianLaw>(&initial_)) {
    if (!(gauss->sd > 0.0)) throw ArgumentError("gaussian initial law needs sd > 0");
  }
  if (shift_ && !(shift_->half_width > 0.0)) {
    throw ArgumentError("shift half width must be positive");
  }

  mixing_ = identity(dim);
  if (auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    if (!dg->mixing.empty()) {
      if (dg->mixing.size() != static_cast<std::size_t>(dim * dim)) {
        throw ArgumentError("diffusion matrix must have d*d entries");
      }
      mixing_ = dg->mixing;
    }
  }
  mixing_min_eig_ = min_eigenvalue_aat(mixing_, dim);
  validate(validation_horizon);
}

ProcessSpec ProcessSpec::brownian(int dim, InitialLaw initial,
                                  std::optional<ShiftLaw> shift) {
  return ProcessSpec(dim, std::move(initial), BrownianMotion{}, shift);
}

ProcessKind ProcessSpec::kind() const {
  switch (coefficients_.index()) {
    case 0: return ProcessKind::kBrownian;
    case 1: return ProcessKind::kDeterministicGaussian;
    default: return ProcessKind::kStochVol;
  }
}

void ProcessSpec::validate(double horizon) const {
  if (const auto* sv = std::get_if<StochVol>(&coefficients_)) {
    if (!(sv->alpha > 0.0 && sv->alpha <= 1.0) || !(sv->beta > 0.0 && sv->beta <= 1.0)) {
      throw ArgumentError("regularity exponents alpha, beta must lie in (0, 1]");
    }
    if (!(std::abs(sv->eta) < 1.0) || !(sv->sigma0 > 0.0)) {
      throw ArgumentError("stochvol needs sigma0 > 0 and |eta| < 1");
    }
    return;
  }
  const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_);
  if (dg == nullptr || dg->allow_degenerate) return;
  constexpr int kMesh = 1024;
  for (int i = 0; i <= kMesh; ++i) {
    const double t = horizon * i / kMesh;
    const double level = dg->diffusion(t);
    if (!(level * level * mixing_min_eig_ > 1e-12)) {
      std::ostringstream msg;
      msg << "degenerate diffusion: sigma sigma^T is singular at t = " << t;
      throw ArgumentError(msg.str());
    }
  }
}

double ProcessSpec::diffusion_level(double t) const {
  if (const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    return dg->diffusion(t);
  }
  return 1.0;
}

double ProcessSpec::drift_level(double t) const {
  if (const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    return dg->drift(t);
  }
  return 0.0;
}

double ProcessSpec::drift_integral(double s, double t) const {
  if (const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    return dg->drift.integral(s, t);
  }
  if (kind() == ProcessKind::kStochVol) {
    throw CapabilityError("drift integral requires a Gaussian process spec");
  }
  return 0.0;
}

double ProcessSpec::diffusion_square_integral(double s, double t) const {
  if (const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    return dg->diffusion.integral_of_square(s, t);
  }
  if (kind() == ProcessKind::kStochVol) {
    throw CapabilityError("diffusion integral requires a Gaussian process spec");
  }
  return t - s;
}

double ProcessSpec::mixed_norm_squared(std::span<const double> u) const {
  double total = 0.0;
  for (int j = 0; j < dim_; ++j) {
    double component = 0.0;  // (A^T u)_j
    for (int i = 0; i < dim_; ++i) {
      component += mixing_[static_cast<std::size_t>(i * dim_ + j)] * u[static_cast<std::size_t>(i)];
    }
    total += component * component;
  }
  return total;
}

double ProcessSpec::min_diffusion_eigenvalue(double horizon) const {
  switch (kind()) {
    case ProcessKind::kBrownian: return 1.0;
    case ProcessKind::kStochVol: {
      const auto& sv = std::get<StochVol>(coefficients_);
      const double low = sv.sigma0 * (1.0 - std::abs(sv.eta));
      return low * low;
    }
    case ProcessKind::kDeterministicGaussian: {
      const auto& dg = std::get<DeterministicGaussian>(coefficients_);
      constexpr int kMesh = 1024;
      double lowest = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= kMesh; ++i) {
        const double level = dg.diffusion(horizon * i / kMesh);
        lowest = std::min(lowest, level * level);
      }
      return lowest * mixing_min_eig_;
    }
  }
  return 0.0;
}

std::map<std::string, std::string> ProcessSpec::to_config() const {
  std::map<std::string, std::string> out;
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  out["kind"] = to_string(kind());
  out["dim"] = std::to_string(dim_);
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, FixedPoint>) {
          std::string list;
          for (std::size_t i = 0; i < law.x0.size(); ++i) {
            list += (i ? ", " : "") + num(law.x0[i]);
          }
          out["initial"] = "point(" + list + ")";
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          out["initial"] = "uniform(" + num(law.low) + ", " + num(law.high) + ")";
        } else {
          out["initial"] = "gaussian(" + num(law.mean) + ", " + num(law.sd) + ")";
        }
      },
      initial_);
  out["shift"] = shift_ ? "uniform(" + num(shift_->half_width) + ")" : "none";
  if (const auto* dg = std::get_if<DeterministicGaussian>(&coefficients_)) {
    out["drift"] = dg->drift.describe();
    out["diffusion"] = dg->diffusion.describe();
    if (!dg->mixing.empty()) {
      std::string list;
      for (std::size_t i = 0; i < dg->mixing.size(); ++i) {
        list += (i ? ", " : "") + num(dg->mixing[i]);
      }
      out["diffusion_matrix"] = list;
    }
    out["allow_degenerate"] = dg->allow_degenerate ? "true" : "false";
  }
  if (const auto* sv = std::get_if<StochVol>(&coefficients_)) {
    out["sigma0"] = num(sv->sigma0);
    out["eta"] = num(sv->eta);
    out["kappa"] = num(sv->kappa);
    out["alpha"] = num(sv->alpha);
    out["beta"] = num(sv->beta);
  }
  return out;
}

}  // namespace occutime
