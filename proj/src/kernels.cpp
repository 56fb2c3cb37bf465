#include "specdescent/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "specdescent/errors.hpp"

namespace specdescent {
namespace {

constexpr double kDifferenceStep = 1e-6;

// Exactly symmetric X X^T / d.
Matrix normalized_gram(const DataCloud& cloud) {
  const Matrix& x = cloud.points();
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

}  // namespace

ScalarFunction ScalarFunction::linear() { return ScalarFunction(Kind::linear, "linear"); }

ScalarFunction ScalarFunction::affine(double intercept, double slope) {
  ScalarFunction f(Kind::affine, "affine");
  f.a_ = intercept;
  f.b_ = slope;
  return f;
}

ScalarFunction ScalarFunction::exponential_scaled(double scale, double rate) {
  ScalarFunction f(Kind::exponential_scaled, "exponential");
  f.a_ = scale;
  f.b_ = rate;
  return f;
}

ScalarFunction ScalarFunction::custom(std::function<double(double)> fn, bool smooth,
                                      std::string name) {
  if (!fn) {
    throw DomainError("custom scalar function is empty");
  }
  ScalarFunction f(Kind::custom, std::move(name));
  f.fn_ = std::move(fn);
  f.smooth_ = smooth;
  return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw DomainError("table needs at least two knots and one value per knot");
  }
  if (std::adjacent_find(knots.begin(), knots.end(), std::greater_equal<>()) != knots.end()) {
    throw DomainError("table knots must be strictly increasing");
  }
  ScalarFunction f(Kind::table, "table");
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  return f;
}

double ScalarFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::linear:
      return t;
    case Kind::affine:
      return a_ + b_ * t;
    case Kind::exponential_scaled:
      return a_ * std::exp(b_ * t);
    case Kind::custom:
      return fn_(t);
    case Kind::table: {
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), t);
      hi = std::clamp(hi, std::next(knots_.begin()), std::prev(knots_.end()));
      const auto i = static_cast<std::size_t>(std::distance(knots_.begin(), hi));
      const double w = (t - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
      return values_[i - 1] + w * (values_[i] - values_[i - 1]);
    }
  }
  return std::nan("");
}

std::optional<double> ScalarFunction::derivative_at_zero() const {
  switch (kind_) {
    case Kind::linear:
      return 1.0;
    case Kind::affine:
      return b_;
    case Kind::exponential_scaled:
      return a_ * b_;
    case Kind::custom:
      if (!smooth_) {
        return std::nullopt;
      }
      return (fn_(kDifferenceStep) - fn_(-kDifferenceStep)) / (2.0 * kDifferenceStep);
    case Kind::table:
      return std::nullopt;
  }
  return std::nullopt;
}

KernelSpec KernelSpec::radial(double sigma) {
  KernelSpec spec;
  spec.family = KernelFamily::radial;
  spec.sigma = sigma;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::dot_product(ScalarFunction fn) {
  KernelSpec spec;
  spec.family = KernelFamily::dot_product;
  spec.fn = std::move(fn);
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (family == KernelFamily::radial) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw DomainError("radial kernel bandwidth must be positive and finite");
    }
    return;
  }
  const auto derivative = fn.derivative_at_zero();
  if (!std::isfinite(fn(0.0)) || !std::isfinite(fn(1.0)) ||
      (derivative && !std::isfinite(*derivative))) {
    throw DomainError("scalar function '" + fn.name() + "' must be finite at 0 and 1");
  }
}

Matrix radial_kernel_matrix(const DataCloud& cloud, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("radial kernel bandwidth must be positive and finite");
  }
  const Matrix& x = cloud.points();
  const Eigen::Index n = x.rows();
  const Vector sq = x.rowwise().squaredNorm();
  Matrix inner = Matrix::Zero(n, n);
  inner.selfadjointView<Eigen::Lower>().rankUpdate(x);
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double dist2 = std::max(sq(i) + sq(j) - 2.0 * inner(i, j), 0.0);
      k(i, j) = std::exp(scale * dist2);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Matrix dot_kernel_matrix(const DataCloud& cloud, const KernelSpec& spec) {
  if (spec.family != KernelFamily::dot_product) {
    throw DomainError("dot_kernel_matrix needs a dot-product kernel spec");
  }
  Matrix k = normalized_gram(cloud);
  const Eigen::Index n = k.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double value = spec.fn(k(i, j));
      if (!std::isfinite(value)) {
        throw NumericalError("scalar function '" + spec.fn.name() +
                             "' produced a non-finite kernel entry");
      }
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

Matrix kernel_matrix(const DataCloud& cloud, const KernelSpec& spec) {
  return spec.family == KernelFamily::radial ? radial_kernel_matrix(cloud, spec.sigma)
                                             : dot_kernel_matrix(cloud, spec);
}

LinearizedKernel el_karoui_linearize(const KernelSpec& spec) {
  if (spec.family != KernelFamily::dot_product) {
    throw DomainError("only dot-product kernels have a linear-equivalent form");
  }
  const auto derivative = spec.fn.derivative_at_zero();
  if (!derivative) {
    throw CapabilityError("f'(0) is unavailable for scalar function '" + spec.fn.name() + "'");
  }
  const double f0 = spec.fn(0.0);
  const double f1 = spec.fn(1.0);
  if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(*derivative)) {
    throw DomainError("scalar function '" + spec.fn.name() + "' must be finite at 0 and 1");
  }
  return {f0, *derivative, f1 - f0 - *derivative};
}

Matrix linearized_kernel_matrix(const DataCloud& cloud, const LinearizedKernel& lin) {
  Matrix k = normalized_gram(cloud);
  const Eigen::Index n = k.rows();
  k = (lin.c_ones * Matrix::Ones(n, n) + lin.c_gram * k).eval();
  k.diagonal().array() += lin.c_id;
  return k;
}

}  // namespace specdescent
