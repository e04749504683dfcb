#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace occutime {

enum class Locality { kGlobalSobolev, kLocalSobolev, kFourierLebesgue };

// Declared smoothness: the function lies in H^s (or H^s_loc / FL^s) for
// every s strictly below `sobolev_s`; infinity for smooth members.
struct Smoothness {
  double sobolev_s = std::numeric_limits<double>::infinity();
  Locality locality = Locality::kGlobalSobolev;
};

class TestFunction;

// Implementation interface for a test function family. Implementations are
// immutable and safe for concurrent use.
class FunctionModel {
 public:
  virtual ~FunctionModel() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual Smoothness smoothness() const = 0;

  virtual bool is_complex() const { return false; }
  virtual double value(std::span<const double> x) const = 0;
  virtual std::complex<double> complex_value(std::span<const double> x) const {
    return value(x);
  }

  virtual bool has_gradient() const { return false; }
  virtual void gradient(std::span<const double> x, std::span<double> out) const;
  virtual void complex_gradient(std::span<const double> x,
                                std::span<std::complex<double>> out) const;

  // Closed-form F f(u) = int f(x) e^{i<u,x>} dx.
  virtual bool has_fourier() const { return false; }
  virtual std::complex<double> fourier(std::span<const double> u) const;

  // E[f(mean + sd Z)] with Z ~ N(0, I) when a closed form is known.
  virtual std::optional<double> gaussian_expectation(std::span<const double> mean,
                                                     double sd) const;

  // Radius outside which |f| is negligible (below 1e-14); empty if f is not
  // integrable.
  virtual std::optional<double> support_radius() const { return std::nullopt; }

  // Smallest length scale of f, used for finite-difference steps.
  virtual double length_scale() const { return 1.0; }

  // Non-null for tensor products f(x) = prod_i f_i(x_i).
  virtual const std::vector<TestFunction>* tensor_factors() const { return nullptr; }

  // Non-null for f(x) = exp(i <u, x>): the frequency u.
  virtual const std::vector<double>* exponential_frequency() const { return nullptr; }
};

// Value handle over a shared immutable FunctionModel.
class TestFunction {
 public:
  explicit TestFunction(std::shared_ptr<const FunctionModel> model);

  int dim() const { return model_->dim(); }
  std::string name() const { return model_->name(); }
  Smoothness smoothness() const { return model_->smoothness(); }
  bool is_complex() const { return model_->is_complex(); }
  bool has_gradient() const { return model_->has_gradient(); }
  bool has_fourier() const { return model_->has_fourier(); }
  std::optional<double> support_radius() const { return model_->support_radius(); }
  double length_scale() const { return model_->length_scale(); }
  const FunctionModel& model() const { return *model_; }

  // Real value; throws CapabilityError for complex-valued functions.
  double operator()(std::span<const double> x) const;
  double operator()(double x) const;
  std::complex<double> complex_value(std::span<const double> x) const;

  // Throws CapabilityError when the family has no gradient.
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;
  void complex_gradient(std::span<const double> x,
                        std::span<std::complex<double>> out) const;

  // Throws CapabilityError when no closed-form transform is registered.
  std::complex<double> fourier(std::span<const double> u) const;
  std::complex<double> fourier(double u) const;

  // E[f(mean + sd Z)], Z ~ N(0, I_d): closed form when the family has one
  // and `allow_closed_form` is set, else tensor Gauss-Hermite with
  // `hermite_nodes` per coordinate (one-dimensional rules per factor for
  // tensor products).
  double gaussian_expectation(std::span<const double> mean, double sd,
                              int hermite_nodes = 32,
                              bool allow_closed_form = true) const;

 private:
  std::shared_ptr<const FunctionModel> model_;
};

// Registered families (d = 1 unless stated).
TestFunction gaussian_bump();
TestFunction hat();
TestFunction indicator(double a, double b);
// |x|^{-alpha} w(x), w(x) = exp(-x^2 / (2 width^2)), f(0) = 0.
TestFunction power_singularity(double alpha, double width = 1.0);
// w(x) sum_{j=1}^{J} 2^{-j s} cos(2^j x), w(x) = exp(-x^2 / (2 width^2)).
TestFunction lacunary_series(double s_target, int terms = 12, double width = 2.0);
// e^{i<u,x>}, d = u.size().
TestFunction complex_exponential(std::vector<double> u);
TestFunction identity_function();
TestFunction quadratic_function();
TestFunction constant_function(double c, int dim = 1);

TestFunction scaled(double c, const TestFunction& f);
TestFunction sum(const TestFunction& f, const TestFunction& g);
// f(x) = prod_i factors[i](x_i); each factor must be one-dimensional.
TestFunction tensor_product(std::vector<TestFunction> factors);

}  // namespace occutime
