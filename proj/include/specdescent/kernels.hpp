#pragma once

// Kernel Gram matrices over data clouds: the radial (Gaussian) kernel
// exp(-|x - x'|^2 / (2 sigma^2)) and dot-product kernels f(<x, x'> / d), plus
// the linear-equivalent approximation of a dot-product kernel matrix,
//   K_lin = f(0) 11^T + f'(0) (1/d) X X^T + (f(1) - f(0) - f'(0)) I,
// which holds for isotropic unit-variance clouds in high dimension.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specdescent/randmat.hpp"

namespace specdescent {

class ScalarFunction {
 public:
  enum class Kind { linear, affine, exponential_scaled, custom, table };

  static ScalarFunction linear();
  // intercept + slope * t
  static ScalarFunction affine(double intercept, double slope);
  static ScalarFunction constant(double value) { return affine(value, 0.0); }
  // scale * exp(rate * t)
  static ScalarFunction exponential_scaled(double scale, double rate);
  // f'(0) comes from a central difference when `smooth`, otherwise it is unavailable.
  static ScalarFunction custom(std::function<double(double)> fn, bool smooth, std::string name = "custom");
  // Piecewise-linear interpolation through (knots, values), extended linearly past the ends.
  // Has no derivative.
  static ScalarFunction table(std::vector<double> knots, std::vector<double> values);

  double operator()(double t) const;
  std::optional<double> derivative_at_zero() const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  ScalarFunction(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  double a_ = 0.0;
  double b_ = 0.0;
  bool smooth_ = false;
  std::function<double(double)> fn_;
  std::vector<double> knots_;
  std::vector<double> values_;
};

enum class KernelFamily { radial, dot_product };

struct KernelSpec {
  KernelFamily family = KernelFamily::radial;
  double sigma = 1.0;
  ScalarFunction fn = ScalarFunction::linear();

  static KernelSpec radial(double sigma);
  static KernelSpec dot_product(ScalarFunction fn);

  // Radial: sigma > 0. Dot product: f(0), f(1) and (when defined) f'(0) finite.
  // Throws DomainError.
  void validate() const;
};

struct LinearizedKernel {
  double c_ones = 0.0;
  double c_gram = 0.0;
  double c_id = 0.0;
};

// Symmetric n x n matrix with unit diagonal. Throws DomainError for sigma <= 0.
Matrix radial_kernel_matrix(const DataCloud& cloud, double sigma);

// K[i][j] = f(<x_i, x_j> / d). Throws NumericalError when f returns a non-finite value.
Matrix dot_kernel_matrix(const DataCloud& cloud, const KernelSpec& spec);

// Dispatches on spec.family.
Matrix kernel_matrix(const DataCloud& cloud, const KernelSpec& spec);

// Throws DomainError for radial specs, CapabilityError when f'(0) is unavailable.
LinearizedKernel el_karoui_linearize(const KernelSpec& spec);

Matrix linearized_kernel_matrix(const DataCloud& cloud, const LinearizedKernel& lin);

}  // namespace specdescent
