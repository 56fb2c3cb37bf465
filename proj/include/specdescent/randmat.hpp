#pragma once

// Seedable random matrices and data clouds.
//
// Every generator owns its engine for the duration of one call, so calls with
// distinct seeds can run concurrently. Reproducibility is per release: the
// engine is std::mt19937_64 (fully specified by the standard) and normals are
// drawn with the Marsaglia polar method implemented here, not with
// std::normal_distribution whose algorithm varies between standard libraries.

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace specdescent {

// Dense real matrix. Storage is Eigen's column-major layout; row-major order
// only matters at I/O boundaries, where rows are written one per line.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class StreamPurpose : std::uint64_t {
  matrix = 1,
  cloud = 2,
  perturbation = 3,
  rhs = 4,
};

struct StreamLabel {
  std::uint64_t grid_index = 0;
  std::uint64_t trial = 0;
  StreamPurpose purpose = StreamPurpose::matrix;
};

class Seed {
 public:
  constexpr explicit Seed(std::uint64_t master) : master_(master) {}

  constexpr std::uint64_t master() const { return master_; }

  // Substream seed: a splitmix64-style hash of (master, grid index, trial, purpose).
  Seed derive(const StreamLabel& label) const;

  friend constexpr bool operator==(Seed, Seed) = default;

 private:
  std::uint64_t master_;
};

// Draws i.i.d. samples from one seeded stream.
class SampleStream {
 public:
  explicit SampleStream(Seed seed);

  // Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  // Standard normal via the Marsaglia polar method; the second variate of each
  // accepted pair is cached and returned by the next call.
  double normal();
  // +1 or -1 with equal probability.
  double rademacher();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

struct GeneratorLimits {
  // 2e8 doubles is roughly 1.6 GB.
  std::size_t max_elements = 200'000'000;
};

class DataCloud {
 public:
  // Rows of `points` are the samples. Throws DomainError on empty or non-finite input.
  explicit DataCloud(Matrix points);

  Eigen::Index count() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }

 private:
  Matrix points_;
};

Matrix gaussian_matrix(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits = {});
Matrix rademacher_matrix(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits = {});
// n points with i.i.d. N(0, I_d) coordinates.
DataCloud gaussian_cloud(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits = {});

}  // namespace specdescent
