#include "specdescent/mp_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specdescent/errors.hpp"

namespace specdescent {
namespace {

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("aspect ratio gamma must be positive and finite, got " +
                      std::to_string(gamma));
  }
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::wide:
      return "wide";
    case Regime::square:
      return "square";
    case Regime::tall:
      return "tall";
  }
  return "unknown";
}

MPEdges mp_edges(double gamma) {
  require_positive_gamma(gamma);
  if (gamma <= 1.0) {
    const double root = std::sqrt(gamma);
    return {(1.0 - root) * (1.0 - root), (1.0 + root) * (1.0 + root)};
  }
  const double root = std::sqrt(1.0 / gamma);
  return {(1.0 - root) * (1.0 - root), (1.0 + root) * (1.0 + root)};
}

double predicted_condition_number(double gamma) {
  require_positive_gamma(gamma);
  if (gamma == 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double root = std::sqrt(std::min(gamma, 1.0 / gamma));
  return (1.0 + root) / (1.0 - root);
}

MPPrediction predict(double gamma) {
  const MPEdges edges = mp_edges(gamma);
  MPPrediction p;
  p.gamma = gamma;
  p.lower_edge = edges.lower;
  p.upper_edge = edges.upper;
  p.predicted_kappa = predicted_condition_number(gamma);
  p.regime = gamma < 1.0 ? Regime::wide : (gamma > 1.0 ? Regime::tall : Regime::square);
  return p;
}

double square_case_min_sv(long long n, long long d) {
  if (n < 1 || d < 1) {
    throw DomainError("square_case_min_sv needs positive n and d");
  }
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  // sqrt(a) - sqrt(b) written as (a - b) / (sqrt(a) + sqrt(b)) to avoid cancellation.
  const auto root_gap = [](double a, double b) { return (a - b) / (std::sqrt(a) + std::sqrt(b)); };
  const double gap = std::max(root_gap(nn, dd - 1.0), root_gap(dd, nn - 1.0));
  return std::min(1.0 / nn, 1.0 / dd) * gap * gap;
}

}  // namespace specdescent
