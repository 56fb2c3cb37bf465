#include "specdescent/randmat.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "specdescent/errors.hpp"

namespace specdescent {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_shape(Eigen::Index n, Eigen::Index d, const GeneratorLimits& limits) {
  if (n < 1 || d < 1) {
    throw DomainError("matrix dimensions must be positive, got " + std::to_string(n) + "x" +
                      std::to_string(d));
  }
  const auto rows = static_cast<std::size_t>(n);
  const auto cols = static_cast<std::size_t>(d);
  if (rows > limits.max_elements / cols) {
    throw SizeError(std::to_string(n) + "x" + std::to_string(d) + " exceeds the cap of " +
                    std::to_string(limits.max_elements) + " elements");
  }
}

// Entries are drawn in row-major order so the stream prefix fills row 0 first.
template <typename Draw>
Matrix fill_row_major(Eigen::Index n, Eigen::Index d, Draw&& draw) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m(i, j) = draw();
    }
  }
  return m;
}

}  // namespace

Seed Seed::derive(const StreamLabel& label) const {
  std::uint64_t h = splitmix64(master_);
  h = splitmix64(h ^ label.grid_index);
  h = splitmix64(h ^ label.trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(label.purpose));
  return Seed(h);
}

SampleStream::SampleStream(Seed seed) : engine_(seed.master()) {}

double SampleStream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double SampleStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * factor;
  has_cached_ = true;
  return u * factor;
}

double SampleStream::rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

DataCloud::DataCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw DomainError("data cloud needs at least one point of positive dimension");
  }
  if (!points_.allFinite()) {
    throw DomainError("data cloud coordinates must be finite");
  }
}

Matrix gaussian_matrix(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits) {
  check_shape(n, d, limits);
  SampleStream stream(seed);
  return fill_row_major(n, d, [&] { return stream.normal(); });
}

Matrix rademacher_matrix(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits) {
  check_shape(n, d, limits);
  SampleStream stream(seed);
  return fill_row_major(n, d, [&] { return stream.rademacher(); });
}

DataCloud gaussian_cloud(Eigen::Index n, Eigen::Index d, Seed seed, GeneratorLimits limits) {
  return DataCloud(gaussian_matrix(n, d, seed, limits));
}

}  // namespace specdescent
