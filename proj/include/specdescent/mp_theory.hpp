#pragma once

// Marchenko-Pastur predictions for i.i.d. mean-zero, unit-variance n x d
// matrices in the limit n -> infinity with n / d -> gamma.
//
// Edges are reported for the normalized Gram matrix: (1/d) A A^T when
// gamma <= 1 and (1/n) A^T A when gamma > 1. They are eigenvalue edges, so the
// singular-value condition number is the square root of their ratio.

#include <string_view>

namespace specdescent {

enum class Regime { wide, square, tall };

std::string_view to_string(Regime regime);

struct MPEdges {
  double lower = 0.0;
  double upper = 0.0;
};

struct MPPrediction {
  double gamma = 0.0;
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  double predicted_kappa = 0.0;  // +infinity when lower_edge == 0
  Regime regime = Regime::square;
};

// Throws DomainError unless gamma > 0 and finite.
MPEdges mp_edges(double gamma);

// (1 + sqrt(g)) / (1 - sqrt(g)) with g = min(gamma, 1/gamma); +infinity at gamma == 1.
double predicted_condition_number(double gamma);

MPPrediction predict(double gamma);

// min(1/n, 1/d) * max(sqrt(n) - sqrt(d - 1), sqrt(d) - sqrt(n - 1))^2, the
// finite-size scale of the smallest Gram eigenvalue near the square case.
double square_case_min_sv(long long n, long long d);

}  // namespace specdescent
