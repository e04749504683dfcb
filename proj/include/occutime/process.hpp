#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace occutime {

// Scalar coefficient t -> f(t) for deterministic drift and diffusion. The
// registered families carry closed-form primitives of f and f^2; custom
// functions fall back to 16-point Gauss-Legendre over the requested interval.
class TimeFunction {
 public:
  static TimeFunction constant(double c);
  // a + b t
  static TimeFunction linear(double a, double b);
  // a + c sin(omega t)
  static TimeFunction sine(double a, double c, double omega);
  static TimeFunction custom(std::function<double(double)> f, std::string label);

  double operator()(double t) const;
  double integral(double s, double t) const;
  double integral_of_square(double s, double t) const;
  bool has_closed_form() const { return kind_ != Kind::kCustom; }
  bool is_constant() const;

  // Round-trippable text form, e.g. "sine(1, 0.5, 6.28)".
  std::string describe() const;

 private:
  enum class Kind { kConstant, kLinear, kSine, kCustom };
  TimeFunction() = default;

  Kind kind_ = Kind::kConstant;
  double a_ = 0.0, b_ = 0.0, omega_ = 0.0;
  std::function<double(double)> custom_;
  std::string label_;
};

struct FixedPoint {
  std::vector<double> x0;  // one entry per coordinate
};
struct UniformBox {
  double low = -0.5;
  double high = 0.5;
};
struct GaussianLaw {
  double mean = 0.0;
  double sd = 1.0;
};
using InitialLaw = std::variant<FixedPoint, UniformBox, GaussianLaw>;

// Independent shift xi ~ Uniform[-h, h]^d.
struct ShiftLaw {
  double half_width = 0.5;
};

struct BrownianMotion {};

// b(t) = drift(t) * (1, ..., 1), sigma(t) = diffusion(t) * A.
struct DeterministicGaussian {
  TimeFunction drift = TimeFunction::constant(0.0);
  TimeFunction diffusion = TimeFunction::constant(1.0);
  std::vector<double> mixing;  // row-major d x d matrix A; empty = identity
  bool allow_degenerate = false;
};

// sigma_t = sigma0 (1 + eta sin W'_t) I with an independent Brownian W',
// b(t, x) = -kappa x. Simulated by Euler-Maruyama on the fine grid.
struct StochVol {
  double sigma0 = 1.0;
  double eta = 0.5;
  double kappa = 0.5;
  double alpha = 0.5;
  double beta = 0.5;
};

using Coefficients = std::variant<BrownianMotion, DeterministicGaussian, StochVol>;

enum class ProcessKind { kBrownian, kDeterministicGaussian, kStochVol };

std::string to_string(ProcessKind kind);

// Law of X_t = X_0 + int b dr + int sigma dW. Immutable after construction.
class ProcessSpec {
 public:
  // `validation_horizon` bounds the time mesh on which the diffusion of a
  // deterministic Gaussian spec is checked for non-degeneracy.
  ProcessSpec(int dim, InitialLaw initial, Coefficients coefficients,
              std::optional<ShiftLaw> shift = std::nullopt,
              double validation_horizon = 1.0);

  static ProcessSpec brownian(int dim = 1, InitialLaw initial = FixedPoint{{0.0}},
                              std::optional<ShiftLaw> shift = std::nullopt);

  int dim() const { return dim_; }
  ProcessKind kind() const;
  bool is_gaussian() const { return kind() != ProcessKind::kStochVol; }
  const InitialLaw& initial() const { return initial_; }
  const Coefficients& coefficients() const { return coefficients_; }
  const std::optional<ShiftLaw>& shift() const { return shift_; }

  // Diffusion matrix at unit scale: A for deterministic Gaussian, I otherwise.
  const std::vector<double>& mixing() const { return mixing_; }
  // Smallest eigenvalue of A A^T.
  double mixing_min_eigenvalue() const { return mixing_min_eig_; }

  // Scalar diffusion level for Gaussian specs (sigma(t) = level * A).
  double diffusion_level(double t) const;
  double drift_level(double t) const;

  // Closed-form integrals for Gaussian specs.
  double drift_integral(double s, double t) const;             // int_s^t drift(r) dr
  double diffusion_square_integral(double s, double t) const;  // int_s^t level(r)^2 dr

  // |A^T u|^2.
  double mixed_norm_squared(std::span<const double> u) const;

  // inf over the mesh of the smallest eigenvalue of sigma sigma^T; for
  // StochVol the lower bound (sigma0 (1 - |eta|))^2.
  double min_diffusion_eigenvalue(double horizon) const;

  // Key/value form used by the experiment config file.
  std::map<std::string, std::string> to_config() const;

 private:
  void validate(double horizon) const;

  int dim_;
  InitialLaw initial_;
  Coefficients coefficients_;
  std::optional<ShiftLaw> shift_;
  std::vector<double> mixing_;
  double mixing_min_eig_ = 1.0;
};

}  // namespace occutime
