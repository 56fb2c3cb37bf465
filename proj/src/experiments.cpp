#include "specdescent/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>
#include <utility>

#include "specdescent/errors.hpp"
#include "specdescent/mp_theory.hpp"

namespace specdescent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear interpolation between order statistics of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) {
    return kInf;
  }
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile(values, 0.5);
}

std::size_t resolve_threads(std::size_t requested, std::size_t tasks) {
  std::size_t threads = requested == 0 ? std::thread::hardware_concurrency() : requested;
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(tasks, 1));
}

// Runs task(i) for i in [0, count) on a pool of worker threads.
template <typename Task>
void parallel_for(std::size_t count, std::size_t threads, Task&& task) {
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      task(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        task(i);
      }
    });
  }
}

SweepRecord measure(const SweepConfig& config, std::size_t grid_index, std::size_t trial) {
  SweepRecord r;
  r.n = config.n;
  r.d = config.d_grid[grid_index];
  r.gamma = static_cast<double>(r.n) / static_cast<double>(r.d);
  r.trial = trial;
  const Seed seed = config.master_seed.derive(
      {grid_index, trial, config.ensemble.is_kernel() ? StreamPurpose::cloud : StreamPurpose::matrix});
  r.seed = seed.master();
  r.kappa_mp = predicted_condition_number(r.gamma);
  const auto start = std::chrono::steady_clock::now();
  try {
    const Matrix a = sample_matrix(config.ensemble, r.n, r.d, seed);
    const Vector sv = singular_values(a);
    r.sigma_max = sv(0);
    r.sigma_min = sv(sv.size() - 1);
    r.kappa = condition_number_from_values(sv, a.rows(), a.cols(), config.rank_tol);
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
    r.sigma_max = r.sigma_min = r.kappa = std::nan("");
  }
  r.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::string ensemble_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::gaussian:
      return "gaussian";
    case EnsembleKind::rademacher:
      return "rademacher";
    case EnsembleKind::identity_test:
      return "identity-test";
    case EnsembleKind::radial_kernel:
      return "rbf";
    case EnsembleKind::dot_kernel:
      return "dot";
  }
  return "unknown";
}

Matrix sample_matrix(const Ensemble& ensemble, Eigen::Index n, Eigen::Index d, Seed seed) {
  switch (ensemble.kind) {
    case EnsembleKind::gaussian:
      return gaussian_matrix(n, d, seed);
    case EnsembleKind::rademacher:
      return rademacher_matrix(n, d, seed);
    case EnsembleKind::identity_test:
      if (n < 1 || d < 1) {
        throw DomainError("matrix dimensions must be positive");
      }
      return Matrix::Identity(n, d);
    case EnsembleKind::radial_kernel:
    case EnsembleKind::dot_kernel:
      return kernel_matrix(gaussian_cloud(n, d, seed), ensemble.kernel);
  }
  throw DomainError("unknown ensemble");
}

std::vector<std::string> SweepConfig::validate() const {
  if (n < 1) {
    throw DomainError("n must be positive");
  }
  if (d_grid.empty()) {
    throw DomainError("d grid must not be empty");
  }
  if (trials < 1) {
    throw DomainError("trials must be at least 1");
  }
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    if (d_grid[i] < 1) {
      throw DomainError("d grid entries must be positive");
    }
    if (i > 0 && d_grid[i] <= d_grid[i - 1]) {
      throw DomainError("d grid must be strictly increasing");
    }
  }
  if (rank_tol && !(*rank_tol >= 0.0)) {
    throw DomainError("rank tolerance must be non-negative");
  }
  if (ensemble.is_kernel()) {
    ensemble.kernel.validate();
  }
  std::vector<std::string> warnings;
  if (std::find(d_grid.begin(), d_grid.end(), n) == d_grid.end()) {
    warnings.push_back("d grid does not contain d = n = " + std::to_string(n) +
                       "; the peak cannot be located exactly");
  }
  return warnings;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  config.validate();
  const std::size_t count = config.d_grid.size() * config.trials;
  std::vector<SweepRecord> records(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    records[i] = measure(config, i / config.trials, i % config.trials);
  });
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRecord>& records,
                                    std::vector<std::string>* warnings) {
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.n, r.d}].push_back(&r);
  }
  std::vector<AggregateRow> rows;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const SweepRecord* a, const SweepRecord* b) { return a->trial < b->trial; });
    AggregateRow row;
    row.n = key.first;
    row.d = key.second;
    row.gamma = static_cast<double>(row.n) / static_cast<double>(row.d);
    row.trials = group.size();
    row.kappa_mp = group.front()->kappa_mp;
    std::vector<double> finite;
    std::vector<double> lower;
    std::vector<double> upper;
    const double scale = static_cast<double>(std::max(row.n, row.d));
    for (const SweepRecord* r : group) {
      if (r->failed) {
        ++row.failed_count;
        continue;
      }
      if (std::isinf(r->kappa)) {
        ++row.inf_count;
      } else {
        finite.push_back(r->kappa);
      }
      lower.push_back(r->sigma_min * r->sigma_min / scale);
      upper.push_back(r->sigma_max * r->sigma_max / scale);
    }
    if (row.failed_count == row.trials) {
      if (warnings != nullptr) {
        warnings->push_back("no successful trials at n=" + std::to_string(row.n) +
                            ", d=" + std::to_string(row.d) + "; row skipped");
      }
      continue;
    }
    std::sort(finite.begin(), finite.end());
    row.kappa_q25 = quantile(finite, 0.25);
    row.kappa_median = quantile(finite, 0.5);
    row.kappa_q75 = quantile(finite, 0.75);
    row.edge_lower_emp = median(lower);
    row.edge_upper_emp = median(upper);
    rows.push_back(row);
  }
  return rows;
}

Peak detect_peak(const std::vector<AggregateRow>& rows) {
  if (rows.empty()) {
    throw DomainError("detect_peak needs at least one row");
  }
  const AggregateRow* best = nullptr;
  const auto better = [](const AggregateRow& cand, const AggregateRow& cur) {
    const bool cand_inf = std::isinf(cand.kappa_median);
    const bool cur_inf = std::isinf(cur.kappa_median);
    if (cand_inf != cur_inf) {
      return cand_inf;
    }
    if (cand_inf) {
      return cand.inf_count > cur.inf_count || (cand.inf_count == cur.inf_count && cand.d < cur.d);
    }
    return cand.kappa_median > cur.kappa_median ||
           (cand.kappa_median == cur.kappa_median && cand.d < cur.d);
  };
  for (const auto& row : rows) {
    if (best == nullptr || better(row, *best)) {
      best = &row;
    }
  }
  return {best->d, best->kappa_median};
}

std::vector<Eigen::Index> log_spaced_grid(Eigen::Index n, Eigen::Index d_min, Eigen::Index d_max,
                                          std::size_t points) {
  if (d_min < 1 || d_max < d_min || points < 1) {
    throw DomainError("log grid needs 1 <= d_min <= d_max and at least one point");
  }
  std::vector<Eigen::Index> grid;
  const double lo = std::log(static_cast<double>(d_min));
  const double hi = std::log(static_cast<double>(d_max));
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(static_cast<Eigen::Index>(std::llround(std::exp(lo + t * (hi - lo)))));
  }
  if (n >= 1) {
    grid.push_back(n);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

EdgeCheckResult edge_check(const SweepConfig& config, double gamma) {
  if (config.ensemble.kind != EnsembleKind::gaussian &&
      config.ensemble.kind != EnsembleKind::rademacher) {
    throw DomainError("edge_check needs an i.i.d. matrix ensemble");
  }
  if (!(std::abs(gamma - 1.0) >= 0.1)) {
    throw DomainError("edge_check needs |gamma - 1| >= 0.1");
  }
  if (config.n < 1 || config.trials < 1) {
    throw DomainError("edge_check needs n >= 1 and trials >= 1");
  }
  const MPEdges theory = mp_edges(gamma);
  EdgeCheckResult out;
  out.n = config.n;
  out.d = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(static_cast<double>(config.n) / gamma)));
  out.theory_lower = theory.lower;
  out.theory_upper = theory.upper;
  out.small_size_warning = std::min(out.n, out.d) < 50;

  const double scale = static_cast<double>(std::max(out.n, out.d));
  std::vector<double> lower(config.trials);
  std::vector<double> upper(config.trials);
  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    const Seed seed = config.master_seed.derive({0, t, StreamPurpose::matrix});
    const Vector sv = singular_values(sample_matrix(config.ensemble, out.n, out.d, seed));
    lower[t] = sv(sv.size() - 1) * sv(sv.size() - 1) / scale;
    upper[t] = sv(0) * sv(0) / scale;
  });
  out.emp_lower = median(lower);
  out.emp_upper = median(upper);
  return out;
}

double amplification_ratio(const Matrix& a, const Vector& b, const Vector& delta_b,
                           RankTolerance rank_tol) {
  if (delta_b.size() != b.size()) {
    throw DomainError("perturbation and right-hand side differ in length");
  }
  const Vector x = min_norm_solve(a, b, rank_tol).x;
  const Vector x_perturbed = min_norm_solve(a, b + delta_b, rank_tol).x;
  if (x.norm() == 0.0) {
    throw DegenerateInputError("minimum-norm solution is zero");
  }
  return ((x_perturbed - x).norm() / x.norm()) / (delta_b.norm() / b.norm());
}

AmplificationReport error_amplification(const Matrix& a, const Vector& b, double delta_scale,
                                        std::size_t trials, Seed seed, RankTolerance rank_tol) {
  if (!(delta_scale > 0.0)) {
    throw DomainError("delta_scale must be positive");
  }
  if (b.size() != a.rows()) {
    throw DomainError("right-hand side length does not match the matrix");
  }
  if (trials < 1) {
    throw DomainError("trials must be at least 1");
  }
  const SpectralDecomposition s = svd(a);
  const double threshold = rank_threshold(s.singular_values, a.rows(), a.cols(), rank_tol);
  Eigen::Index rank = 0;
  while (rank < s.singular_values.size() && s.singular_values(rank) > threshold) {
    ++rank;
  }
  const Matrix range = s.U.leftCols(rank);
  const Matrix pinv = pseudoinverse(s, threshold);

  AmplificationReport report;
  report.trials = trials;
  report.kappa = condition_number_from_values(s.singular_values, a.rows(), a.cols(), rank_tol);

  const Vector b_range = range * (range.transpose() * b);
  report.rhs_projected = (b - b_range).norm() > 1e-12 * std::max(b.norm(), 1.0);
  const Vector x = pinv * b_range;
  if (x.norm() == 0.0) {
    throw DegenerateInputError("minimum-norm solution is zero; the ratio is undefined");
  }
  const double b_norm = b_range.norm();

  for (std::size_t t = 0; t < trials; ++t) {
    SampleStream stream(seed.derive({0, t, StreamPurpose::perturbation}));
    Vector g(a.rows());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      g(i) = stream.normal();
    }
    Vector delta = range * (range.transpose() * g);
    const double norm = delta.norm();
    if (norm == 0.0) {
      continue;
    }
    delta *= delta_scale * b_norm / norm;
    const Vector dx = pinv * delta;
    const double ratio = (dx.norm() / x.norm()) / (delta.norm() / b_norm);
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  return report;
}

}  // namespace specdescent
