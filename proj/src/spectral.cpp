#include "specdescent/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Householder>
#include <Eigen/Jacobi>
#include <Eigen/QR>

#include "specdescent/errors.hpp"

namespace specdescent {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const Matrix& a) {
  if (a.size() == 0) {
    throw DomainError("matrix must have at least one row and one column");
  }
  if (!a.allFinite()) {
    throw DomainError("matrix entries must be finite");
  }
}

// Rotates column pairs of w until every pair is orthogonal to within
// tol * |w_i| |w_j|. Rotations are accumulated into v when it is non-null.
// Squared column norms are carried through each rotation exactly
// (alpha - t gamma, beta + t gamma) and recomputed at the start of every sweep.
void orthogonalize_columns(Matrix& w, Matrix* v, std::size_t max_sweeps) {
  const Eigen::Index k = w.cols();
  const double tol = kEps * static_cast<double>(std::max<Eigen::Index>(w.rows(), 1));
  Vector norms2(k);
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    norms2 = w.colwise().squaredNorm().transpose();
    std::size_t rotations = 0;
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        const double alpha = norms2(i);
        const double beta = norms2(j);
        if (alpha == 0.0 || beta == 0.0) {
          continue;
        }
        const double gamma = w.col(i).dot(w.col(j));
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Eigen::JacobiRotation<double> rotation(c, c * t);
        w.applyOnTheRight(i, j, rotation);
        if (v != nullptr) {
          v->applyOnTheRight(i, j, rotation);
        }
        norms2(i) = std::max(alpha - t * gamma, 0.0);
        norms2(j) = beta + t * gamma;
        ++rotations;
      }
    }
    if (rotations == 0) {
      return;
    }
  }
  throw NumericalError("Jacobi SVD did not converge after " + std::to_string(max_sweeps) +
                           " sweeps",
                       max_sweeps);
}

std::vector<Eigen::Index> descending_order(const Vector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return order;
}

// Replaces the columns flagged in `missing` by unit vectors orthogonal to every
// other column, so U keeps orthonormal columns when some sigma are exactly zero.
void complete_orthonormal_columns(Matrix& u, const std::vector<bool>& missing) {
  const Eigen::Index rows = u.rows();
  Eigen::Index candidate = 0;
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    if (!missing[static_cast<std::size_t>(c)]) {
      continue;
    }
    bool placed = false;
    while (!placed && candidate < rows) {
      Vector e = Vector::Unit(rows, candidate++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index o = 0; o < u.cols(); ++o) {
          if (o == c) {
            continue;
          }
          e -= u.col(o).dot(e) * u.col(o);
        }
      }
      const double norm = e.norm();
      if (norm > 0.5) {
        u.col(c) = e / norm;
        placed = true;
      }
    }
    if (!placed) {
      throw NumericalError("could not complete an orthonormal basis");
    }
  }
}

struct TallFactors {
  Matrix w;  // R^T after Jacobi; columns are sigma_k * u_k of R^T
  Matrix rotations;
  Matrix q;
  Eigen::ColPivHouseholderQR<Matrix>::PermutationType permutation;
};

// Requires a.rows() >= a.cols().
TallFactors factor_tall(const Matrix& a, bool with_vectors, std::size_t max_sweeps) {
  const Eigen::Index n = a.cols();
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  TallFactors f;
  f.w = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().transpose();
  if (with_vectors) {
    f.rotations = Matrix::Identity(n, n);
    orthogonalize_columns(f.w, &f.rotations, max_sweeps);
    // Full-length reflector sequence; Eigen's householderQ() truncates at the
    // detected rank, which would drop the tiny trailing rows of R.
    const Eigen::HouseholderSequence<Matrix, Vector> householder(qr.matrixQR(), qr.hCoeffs());
    f.q = householder * Matrix::Identity(a.rows(), n);
    f.permutation = qr.colsPermutation();
  } else {
    orthogonalize_columns(f.w, nullptr, max_sweeps);
  }
  return f;
}

SpectralDecomposition svd_tall(const Matrix& a, std::size_t max_sweeps) {
  const Eigen::Index n = a.cols();
  TallFactors f = factor_tall(a, true, max_sweeps);
  const Vector norms = f.w.colwise().norm().transpose();
  const auto order = descending_order(norms);

  SpectralDecomposition out;
  out.singular_values.resize(n);
  Matrix u_w(n, n);
  Matrix rot_sorted(n, n);
  std::vector<bool> missing(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const double sigma = norms(src);
    out.singular_values(k) = sigma;
    rot_sorted.col(k) = f.rotations.col(src);
    if (sigma > 0.0 && std::isfinite(1.0 / sigma)) {
      u_w.col(k) = f.w.col(src) / sigma;
    } else {
      u_w.col(k).setZero();
      missing[static_cast<std::size_t>(k)] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    complete_orthonormal_columns(u_w, missing);
  }
  // A P = Q R, R = W^T and W V_J = U_W S, hence A = (Q V_J) S (P U_W)^T.
  out.U = f.q * rot_sorted;
  out.V = f.permutation * u_w;
  return out;
}

}  // namespace

SpectralDecomposition svd(const Matrix& a, SvdOptions options) {
  require_finite(a);
  if (a.rows() >= a.cols()) {
    return svd_tall(a, options.max_sweeps);
  }
  SpectralDecomposition t = svd_tall(a.transpose(), options.max_sweeps);
  std::swap(t.U, t.V);
  return t;
}

Vector singular_values(const Matrix& a, SvdOptions options) {
  require_finite(a);
  TallFactors f = a.rows() >= a.cols() ? factor_tall(a, false, options.max_sweeps)
                                       : factor_tall(a.transpose(), false, options.max_sweeps);
  Vector values = f.w.colwise().norm().transpose();
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double operator_norm(const Matrix& a) { return singular_values(a)(0); }

double rank_threshold(const Vector& sv, Eigen::Index n, Eigen::Index d, RankTolerance rank_tol) {
  if (rank_tol && !(*rank_tol >= 0.0)) {
    throw DomainError("rank tolerance must be non-negative");
  }
  const double relative =
      rank_tol.value_or(static_cast<double>(std::max(n, d)) * kEps);
  return sv.size() == 0 ? 0.0 : relative * sv(0);
}

double condition_number_from_values(const Vector& sv, Eigen::Index n, Eigen::Index d,
                                    RankTolerance rank_tol) {
  const double threshold = rank_threshold(sv, n, d, rank_tol);
  const double smallest = sv(sv.size() - 1);
  if (sv(0) == 0.0 || smallest <= threshold) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / smallest;
}

double condition_number(const Matrix& a, RankTolerance rank_tol) {
  return condition_number_from_values(singular_values(a), a.rows(), a.cols(), rank_tol);
}

Matrix pseudoinverse(const SpectralDecomposition& s, double threshold) {
  Vector inv = Vector::Zero(s.singular_values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (s.singular_values(i) > threshold) {
      inv(i) = 1.0 / s.singular_values(i);
    }
  }
  return s.V * inv.asDiagonal() * s.U.transpose();
}

Matrix pseudoinverse(const Matrix& a, RankTolerance rank_tol) {
  const SpectralDecomposition s = svd(a);
  return pseudoinverse(s, rank_threshold(s.singular_values, a.rows(), a.cols(), rank_tol));
}

SolveResult min_norm_solve(const Matrix& a, const Vector& b, RankTolerance rank_tol) {
  if (b.size() != a.rows()) {
    throw DomainError("right-hand side has length " + std::to_string(b.size()) +
                      ", expected " + std::to_string(a.rows()));
  }
  if (!b.allFinite()) {
    throw DomainError("right-hand side must be finite");
  }
  const SpectralDecomposition s = svd(a);
  const double threshold = rank_threshold(s.singular_values, a.rows(), a.cols(), rank_tol);
  Vector coeffs = s.U.transpose() * b;
  SolveResult result;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    if (s.singular_values(i) > threshold) {
      coeffs(i) /= s.singular_values(i);
      ++result.effective_rank;
    } else {
      coeffs(i) = 0.0;
    }
  }
  result.x = s.V * coeffs;
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace specdescent
