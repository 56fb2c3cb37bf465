#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "specdescent/errors.hpp"
#include "specdescent/kernels.hpp"

using namespace specdescent;

namespace {

DataCloud cloud_from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const double v : row) {
      m(i, j++) = v;
    }
    ++i;
  }
  return DataCloud(m);
}

}  // namespace

TEST_CASE("radial kernel entries") {
  SUBCASE("unit diagonal and symmetry") {
    const Matrix k = radial_kernel_matrix(gaussian_cloud(30, 7, Seed(1)), 2.0);
    CHECK((k.diagonal().array() == 1.0).all());
    CHECK(k == k.transpose());
    CHECK((k.array() > 0.0).all());
    CHECK((k.array() <= 1.0).all());
  }
  SUBCASE("two points five apart with sigma 5") {
    const Matrix k = radial_kernel_matrix(cloud_from_rows({{0.0}, {5.0}}), 5.0);
    CHECK(k(0, 1) == doctest::Approx(0.60653065971263342).epsilon(1e-14));
  }
  SUBCASE("squared distance 2 sigma^2 gives 1/e") {
    // |(3, 4)|^2 = 25 = 2 sigma^2 with sigma^2 = 12.5.
    const Matrix k = radial_kernel_matrix(cloud_from_rows({{0.0, 0.0}, {3.0, 4.0}}), std::sqrt(12.5));
    CHECK(k(1, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
  }
  SUBCASE("bandwidth must be positive") {
    const DataCloud c = gaussian_cloud(3, 2, Seed(2));
    CHECK_THROWS_AS(radial_kernel_matrix(c, 0.0), DomainError);
    CHECK_THROWS_AS(radial_kernel_matrix(c, -1.0), DomainError);
    CHECK_THROWS_AS(KernelSpec::radial(0.0), DomainError);
  }
}

TEST_CASE("radial kernel matrices are positive semidefinite") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Matrix km = radial_kernel_matrix(gaussian_cloud(40, 1 + static_cast<Eigen::Index>(k), Seed(k)), 5.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(km, Eigen::EigenvaluesOnly);
    const double op = eig.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * op);
  }
}

TEST_CASE("dot-product kernel entries") {
  SUBCASE("linear f is the normalized Gram matrix") {
    const DataCloud c = gaussian_cloud(25, 9, Seed(3));
    const Matrix expected = c.points() * c.points().transpose() / 9.0;
    const Matrix k = dot_kernel_matrix(c, KernelSpec::dot_product(ScalarFunction::linear()));
    CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(k == k.transpose());
  }
  SUBCASE("constant f") {
    const Matrix k = dot_kernel_matrix(gaussian_cloud(5, 3, Seed(4)),
                                       KernelSpec::dot_product(ScalarFunction::constant(0.7)));
    CHECK((k.array() == 0.7).all());
  }
  SUBCASE("f(t) = 1 + t on two points") {
    // d = 2: <x1,x1> = 5, <x1,x2> = 1, <x2,x2> = 10.
    const Matrix k = dot_kernel_matrix(cloud_from_rows({{1, 2}, {3, -1}}),
                                       KernelSpec::dot_product(ScalarFunction::affine(1, 1)));
    CHECK(k(0, 0) == doctest::Approx(3.5));
    CHECK(k(0, 1) == doctest::Approx(1.5));
    CHECK(k(1, 0) == doctest::Approx(1.5));
    CHECK(k(1, 1) == doctest::Approx(6.0));
  }
  SUBCASE("overflow is a numerical error") {
    const DataCloud c = cloud_from_rows({{30.0}, {-30.0}});
    CHECK_THROWS_AS(dot_kernel_matrix(c, KernelSpec::dot_product(ScalarFunction::exponential_scaled(1, 1))),
                    NumericalError);
  }
  SUBCASE("radial spec is rejected") {
    CHECK_THROWS_AS(dot_kernel_matrix(gaussian_cloud(2, 2, Seed(1)), KernelSpec::radial(1.0)), DomainError);
  }
}

TEST_CASE("scalar functions") {
  CHECK(ScalarFunction::linear()(0.3) == 0.3);
  CHECK(ScalarFunction::affine(1, 2)(0.5) == 2.0);
  CHECK(ScalarFunction::exponential_scaled(2, 3)(0.0) == 2.0);
  CHECK(*ScalarFunction::exponential_scaled(2, 3).derivative_at_zero() == 6.0);

  const auto table = ScalarFunction::table({0.0, 1.0, 2.0}, {1.0, 3.0, 4.0});
  CHECK(table(0.5) == doctest::Approx(2.0));
  CHECK(table(1.5) == doctest::Approx(3.5));
  CHECK(table(-1.0) == doctest::Approx(-1.0));  // extended from the first segment
  CHECK(table(3.0) == doctest::Approx(5.0));
  CHECK_FALSE(table.derivative_at_zero().has_value());
  CHECK_THROWS_AS(ScalarFunction::table({0.0, 0.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(ScalarFunction::table({0.0}, {1.0}), DomainError);

  const auto smooth = ScalarFunction::custom([](double t) { return std::sin(t); }, true, "sin");
  CHECK(*smooth.derivative_at_zero() == doctest::Approx(1.0).epsilon(1e-9));
  const auto rough = ScalarFunction::custom([](double t) { return std::abs(t); }, false, "abs");
  CHECK_FALSE(rough.derivative_at_zero().has_value());

  const auto blows_up = ScalarFunction::custom([](double t) { return 1.0 / (1.0 - t); }, true);
  CHECK_THROWS_AS(KernelSpec::dot_product(blows_up), DomainError);
}

TEST_CASE("linearization coefficients") {
  const auto coeffs = [](ScalarFunction f) { return el_karoui_linearize(KernelSpec::dot_product(std::move(f))); };
  SUBCASE("linear fixed point") {
    const auto l = coeffs(ScalarFunction::linear());
    CHECK(l.c_ones == 0.0);
    CHECK(l.c_gram == 1.0);
    CHECK(l.c_id == 0.0);
  }
  SUBCASE("constant") {
    const auto l = coeffs(ScalarFunction::constant(2.5));
    CHECK(l.c_ones == 2.5);
    CHECK(l.c_gram == 0.0);
    CHECK(l.c_id == 0.0);
  }
  SUBCASE("affine 1 + t") {
    const auto l = coeffs(ScalarFunction::affine(1, 1));
    CHECK(l.c_ones == 1.0);
    CHECK(l.c_gram == 1.0);
    CHECK(l.c_id == 0.0);
  }
  SUBCASE("exponential") {
    const auto l = coeffs(ScalarFunction::exponential_scaled(1, 1));
    CHECK(l.c_ones == 1.0);
    CHECK(l.c_gram == 1.0);
    CHECK(l.c_id == doctest::Approx(std::exp(1.0) - 2.0));
  }
  SUBCASE("custom smooth uses a central difference") {
    const auto l = coeffs(ScalarFunction::custom([](double t) { return std::cos(t) + 2 * t; }, true));
    CHECK(l.c_gram == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("no derivative available") {
    CHECK_THROWS_AS(coeffs(ScalarFunction::table({-1, 1}, {0, 1})), CapabilityError);
    CHECK_THROWS_AS(coeffs(ScalarFunction::custom([](double t) { return t; }, false)), CapabilityError);
  }
  SUBCASE("radial kernels have no linearization") {
    CHECK_THROWS_AS(el_karoui_linearize(KernelSpec::radial(5.0)), DomainError);
  }
}

TEST_CASE("linearized matrix assembly") {
  const DataCloud c = gaussian_cloud(20, 40, Seed(12));
  const Matrix gram = c.points() * c.points().transpose() / 40.0;
  const Matrix k = linearized_kernel_matrix(c, {0.5, 2.0, 0.25});
  const Matrix expected = 0.5 * Matrix::Ones(20, 20) + 2.0 * gram + 0.25 * Matrix::Identity(20, 20);
  CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-12);

  // Affine f is its own linearization.
  const auto spec = KernelSpec::dot_product(ScalarFunction::affine(1, 1));
  CHECK((dot_kernel_matrix(c, spec) - linearized_kernel_matrix(c, el_karoui_linearize(spec)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("linearization gap shrinks with dimension for a curved f") {
  // exp(t): the gap between K and K_lin falls as d grows at fixed n/d = 0.5.
  const auto spec = KernelSpec::dot_product(ScalarFunction::exponential_scaled(1, 1));
  const auto lin = el_karoui_linearize(spec);
  const auto gap = [&](Eigen::Index d, std::uint64_t seed) {
    const DataCloud c = gaussian_cloud(d / 2, d, Seed(seed));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(dot_kernel_matrix(c, spec) - linearized_kernel_matrix(c, lin),
                                              Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  };
  CHECK(gap(400, 1) < gap(100, 1));
}
