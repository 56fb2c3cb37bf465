#pragma once

// Singular value decomposition and the quantities derived from it.
//
// The SVD is a one-sided Jacobi method preconditioned by a column-pivoted
// Householder QR: for a tall A (rows >= cols) we factor A P = Q R and then
// orthogonalize the columns of R^T. Wide inputs are handled through A^T.
// Jacobi keeps small singular values accurate to high relative precision,
// which is what matters for condition numbers near the square case.

#include <cstddef>
#include <optional>

#include "specdescent/randmat.hpp"

namespace specdescent {

// r = min(n, d). U is n x r, V is d x r, singular values sorted descending.
struct SpectralDecomposition {
  Matrix U;
  Vector singular_values;
  Matrix V;
};

struct SolveResult {
  Vector x;
  double residual_norm = 0.0;
  Eigen::Index effective_rank = 0;
};

struct SvdOptions {
  // A sweep visits every column pair once.
  std::size_t max_sweeps = 60;
};

// Relative rank tolerance: sigma_i counts as zero when sigma_i <= tol * sigma_max.
// std::nullopt selects max(n, d) * machine epsilon. Negative values throw DomainError.
using RankTolerance = std::optional<double>;

SpectralDecomposition svd(const Matrix& a, SvdOptions options = {});

// Values only; skips accumulation of both singular vector sets.
Vector singular_values(const Matrix& a, SvdOptions options = {});

double operator_norm(const Matrix& a);

// Absolute cutoff below which a singular value of an n x d matrix is dropped.
double rank_threshold(const Vector& singular_values, Eigen::Index n, Eigen::Index d,
                      RankTolerance rank_tol = std::nullopt);

// sigma_max / sigma_min over the min(n, d) singular values; +infinity when
// sigma_min falls at or below the rank threshold.
double condition_number(const Matrix& a, RankTolerance rank_tol = std::nullopt);
double condition_number_from_values(const Vector& singular_values, Eigen::Index n,
                                    Eigen::Index d, RankTolerance rank_tol = std::nullopt);

Matrix pseudoinverse(const Matrix& a, RankTolerance rank_tol = std::nullopt);
Matrix pseudoinverse(const SpectralDecomposition& decomposition, double threshold);

// x = A^+ b, the least-squares minimizer of smallest norm.
SolveResult min_norm_solve(const Matrix& a, const Vector& b,
                           RankTolerance rank_tol = std::nullopt);

}  // namespace specdescent
