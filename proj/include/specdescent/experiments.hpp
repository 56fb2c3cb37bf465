#pragma once

// Monte Carlo sweeps of the condition number over the aspect ratio n / d.
//
// Each (grid point, trial) pair owns a substream derived from the master seed,
// so records are identical whatever the thread count or execution order.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specdescent/kernels.hpp"
#include "specdescent/randmat.hpp"
#include "specdescent/spectral.hpp"

namespace specdescent {

enum class EnsembleKind {
  gaussian,
  rademacher,
  identity_test,  // deterministic rectangular identity, for smoke checks
  radial_kernel,  // n x n RBF Gram matrix of an n-point cloud in R^d
  dot_kernel,     // n x n dot-product kernel matrix of an n-point cloud in R^d
};

struct Ensemble {
  EnsembleKind kind = EnsembleKind::gaussian;
  KernelSpec kernel;  // used by the kernel ensembles only

  static Ensemble gaussian() { return {EnsembleKind::gaussian, {}}; }
  static Ensemble rademacher() { return {EnsembleKind::rademacher, {}}; }
  static Ensemble identity_test() { return {EnsembleKind::identity_test, {}}; }
  static Ensemble radial_kernel(double sigma) {
    return {EnsembleKind::radial_kernel, KernelSpec::radial(sigma)};
  }
  static Ensemble dot_kernel(ScalarFunction fn) {
    return {EnsembleKind::dot_kernel, KernelSpec::dot_product(std::move(fn))};
  }

  bool is_kernel() const {
    return kind == EnsembleKind::radial_kernel || kind == EnsembleKind::dot_kernel;
  }
};

std::string ensemble_name(EnsembleKind kind);

// Matrix for one trial: n x d for matrix ensembles, n x n for kernel ensembles
// (d is then the cloud dimension).
Matrix sample_matrix(const Ensemble& ensemble, Eigen::Index n, Eigen::Index d, Seed seed);

struct SweepConfig {
  Eigen::Index n = 200;
  std::vector<Eigen::Index> d_grid;
  std::size_t trials = 1;
  Ensemble ensemble;
  Seed master_seed{0};
  RankTolerance rank_tol;
  // 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 1;

  // Throws DomainError when invalid; returns non-fatal warnings (e.g. d = n missing).
  std::vector<std::string> validate() const;
};

struct SweepRecord {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  double gamma = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = 0.0;  // +infinity when sigma_min is below the rank threshold
  double kappa_mp = 0.0;
  double wall_time_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct AggregateRow {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  double gamma = 0.0;
  std::size_t trials = 0;
  double kappa_median = 0.0;
  double kappa_q25 = 0.0;
  double kappa_q75 = 0.0;
  double kappa_mp = 0.0;
  // Median extreme eigenvalues of the Gram matrix normalized by max(n, d).
  double edge_lower_emp = 0.0;
  double edge_upper_emp = 0.0;
  std::size_t inf_count = 0;
  std::size_t failed_count = 0;
};

// Exactly d_grid.size() * trials records, ordered by (grid index, trial).
// Per-record failures are flagged in the record instead of being thrown.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

// One row per (n, d), sorted by (n, d). Quartiles use linear interpolation
// between order statistics and ignore infinite kappas, which are counted in
// inf_count. Rows with no finite kappa report +infinity quantiles.
std::vector<AggregateRow> aggregate(const std::vector<SweepRecord>& records,
                                    std::vector<std::string>* warnings = nullptr);

struct Peak {
  Eigen::Index d = 0;
  double kappa = 0.0;
};

// Grid point with the largest kappa_median, ties going to the smallest d.
// Rows whose median is +infinity win; among those the one with the most
// infinite trials is returned.
Peak detect_peak(const std::vector<AggregateRow>& rows);

// `points` log-spaced integers in [d_min, d_max] with n inserted, deduplicated and sorted.
std::vector<Eigen::Index> log_spaced_grid(Eigen::Index n, Eigen::Index d_min, Eigen::Index d_max,
                                          std::size_t points);

struct EdgeCheckResult {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  double emp_lower = 0.0;
  double emp_upper = 0.0;
  double theory_lower = 0.0;
  double theory_upper = 0.0;
  bool small_size_warning = false;
};

// Extreme eigenvalues of (1/d) A A^T (gamma <= 1) or (1/n) A^T A (gamma > 1)
// for d = round(n / gamma), medianed over config.trials, next to mp_edges(gamma).
// Uses config.n, trials, master_seed and threads. Requires a gaussian or
// rademacher ensemble and |gamma - 1| >= 0.1.
EdgeCheckResult edge_check(const SweepConfig& config, double gamma);

struct AmplificationReport {
  double max_ratio = 0.0;
  double kappa = 0.0;
  std::size_t trials = 0;
  bool rhs_projected = false;  // b had a component outside range(A) that was removed
};

// (|x' - x| / |x|) / (|delta_b| / |b|) for x = A^+ b, x' = A^+ (b + delta_b).
double amplification_ratio(const Matrix& a, const Vector& b, const Vector& delta_b,
                           RankTolerance rank_tol = std::nullopt);

// Random perturbations of relative size delta_scale, projected onto range(A).
// Throws DegenerateInputError when A^+ b = 0.
AmplificationReport error_amplification(const Matrix& a, const Vector& b, double delta_scale,
                                        std::size_t trials, Seed seed,
                                        RankTolerance rank_tol = std::nullopt);

}  // namespace specdescent
