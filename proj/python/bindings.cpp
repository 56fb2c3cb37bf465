#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specdescent/cli.hpp"
#include "specdescent/errors.hpp"
#include "specdescent/experiments.hpp"
#include "specdescent/kernels.hpp"
#include "specdescent/mp_theory.hpp"
#include "specdescent/randmat.hpp"
#include "specdescent/spectral.hpp"

namespace py = pybind11;
using namespace specdescent;

namespace {

Ensemble make_ensemble(const std::string& name, double sigma, const std::string& kernel_fn) {
  if (name == "gaussian") return Ensemble::gaussian();
  if (name == "rademacher") return Ensemble::rademacher();
  if (name == "identity-test") return Ensemble::identity_test();
  if (name == "rbf") return Ensemble::radial_kernel(sigma);
  if (name == "dot") return Ensemble::dot_kernel(parse_scalar_function(kernel_fn));
  throw DomainError("unknown ensemble '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Condition numbers of random and kernel matrices, Marchenko-Pastur predictions and "
            "double-descent sweeps.";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<SizeError>(m, "SizeError", error);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<NumericalError>(m, "NumericalError", error);
  py::register_exception<CapabilityError>(m, "CapabilityError", error);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", error);

  m.attr("__version__") = std::string(kVersion);

  // randmat
  m.def("gaussian_matrix", [](Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    return gaussian_matrix(n, d, Seed(seed));
  }, py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def("rademacher_matrix", [](Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    return rademacher_matrix(n, d, Seed(seed));
  }, py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def("gaussian_cloud", [](Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    return gaussian_cloud(n, d, Seed(seed)).points();
  }, py::arg("n"), py::arg("d"), py::arg("seed"), "Rows are the points.");

  // spectral
  m.def("svd", [](const Matrix& a) {
    auto s = svd(a);
    return std::make_tuple(std::move(s.U), std::move(s.singular_values), std::move(s.V));
  }, py::arg("a"), "Returns (U, singular_values, V) with A = U diag(s) V^T.");
  m.def("singular_values", [](const Matrix& a) { return singular_values(a); }, py::arg("a"));
  m.def("operator_norm", &operator_norm, py::arg("a"));
  m.def("condition_number", [](const Matrix& a, RankTolerance tol) { return condition_number(a, tol); },
        py::arg("a"), py::arg("rank_tol") = py::none());
  m.def("pseudoinverse", [](const Matrix& a, RankTolerance tol) { return pseudoinverse(a, tol); },
        py::arg("a"), py::arg("rank_tol") = py::none());
  m.def("min_norm_solve", [](const Matrix& a, const Vector& b, RankTolerance tol) {
    const auto r = min_norm_solve(a, b, tol);
    py::dict out;
    out["x"] = r.x;
    out["residual_norm"] = r.residual_norm;
    out["effective_rank"] = r.effective_rank;
    return out;
  }, py::arg("a"), py::arg("b"), py::arg("rank_tol") = py::none());

  // mp_theory
  m.def("mp_edges", [](double gamma) {
    const auto e = mp_edges(gamma);
    return std::make_pair(e.lower, e.upper);
  }, py::arg("gamma"));
  m.def("predicted_condition_number", &predicted_condition_number, py::arg("gamma"));
  m.def("square_case_min_sv", &square_case_min_sv, py::arg("n"), py::arg("d"));

  // kernels
  m.def("radial_kernel_matrix", [](const Matrix& points, double sigma) {
    return radial_kernel_matrix(DataCloud(points), sigma);
  }, py::arg("points"), py::arg("sigma"));
  m.def("dot_kernel_matrix", [](const Matrix& points, const std::string& fn) {
    return dot_kernel_matrix(DataCloud(points), KernelSpec::dot_product(parse_scalar_function(fn)));
  }, py::arg("points"), py::arg("fn") = "linear",
     "fn is 'linear', 'const:c', 'affine:a,b' or 'exp:scale,rate'.");
  m.def("el_karoui_linearize", [](const std::string& fn) {
    const auto l = el_karoui_linearize(KernelSpec::dot_product(parse_scalar_function(fn)));
    return std::make_tuple(l.c_ones, l.c_gram, l.c_id);
  }, py::arg("fn"), "Returns (c_ones, c_gram, c_id).");
  m.def("linearized_kernel_matrix", [](const Matrix& points, double c_ones, double c_gram, double c_id) {
    return linearized_kernel_matrix(DataCloud(points), {c_ones, c_gram, c_id});
  }, py::arg("points"), py::arg("c_ones"), py::arg("c_gram"), py::arg("c_id"));

  // experiments
  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("n", &SweepRecord::n)
      .def_readonly("d", &SweepRecord::d)
      .def_readonly("gamma", &SweepRecord::gamma)
      .def_readonly("trial", &SweepRecord::trial)
      .def_readonly("seed", &SweepRecord::seed)
      .def_readonly("sigma_max", &SweepRecord::sigma_max)
      .def_readonly("sigma_min", &SweepRecord::sigma_min)
      .def_readonly("kappa", &SweepRecord::kappa)
      .def_readonly("kappa_mp", &SweepRecord::kappa_mp)
      .def_readonly("wall_time_ms", &SweepRecord::wall_time_ms)
      .def_readonly("failed", &SweepRecord::failed)
      .def_readonly("error", &SweepRecord::error);

  py::class_<AggregateRow>(m, "AggregateRow")
      .def_readonly("n", &AggregateRow::n)
      .def_readonly("d", &AggregateRow::d)
      .def_readonly("gamma", &AggregateRow::gamma)
      .def_readonly("trials", &AggregateRow::trials)
      .def_readonly("kappa_median", &AggregateRow::kappa_median)
      .def_readonly("kappa_q25", &AggregateRow::kappa_q25)
      .def_readonly("kappa_q75", &AggregateRow::kappa_q75)
      .def_readonly("kappa_mp", &AggregateRow::kappa_mp)
      .def_readonly("edge_lower_emp", &AggregateRow::edge_lower_emp)
      .def_readonly("edge_upper_emp", &AggregateRow::edge_upper_emp)
      .def_readonly("inf_count", &AggregateRow::inf_count)
      .def_readonly("failed_count", &AggregateRow::failed_count);

  m.def("run_sweep", [](Eigen::Index n, std::vector<Eigen::Index> d_grid, std::size_t trials,
                        const std::string& ensemble, std::uint64_t seed, double sigma,
                        const std::string& kernel_fn, RankTolerance rank_tol, std::size_t threads) {
    SweepConfig config;
    config.n = n;
    config.d_grid = std::move(d_grid);
    config.trials = trials;
    config.ensemble = make_ensemble(ensemble, sigma, kernel_fn);
    config.master_seed = Seed(seed);
    config.rank_tol = rank_tol;
    config.threads = threads;
    py::gil_scoped_release release;
    return run_sweep(config);
  }, py::arg("n"), py::arg("d_grid"), py::arg("trials"), py::arg("ensemble") = "gaussian",
     py::arg("seed") = 0, py::arg("sigma") = 5.0, py::arg("kernel_fn") = "linear",
     py::arg("rank_tol") = py::none(), py::arg("threads") = 1);
  m.def("aggregate", [](const std::vector<SweepRecord>& records) { return aggregate(records); },
        py::arg("records"));
  m.def("detect_peak", [](const std::vector<AggregateRow>& rows) {
    const Peak p = detect_peak(rows);
    return std::make_pair(p.d, p.kappa);
  }, py::arg("rows"), "Returns (d_at_peak, kappa_at_peak).");
  m.def("log_spaced_grid", &log_spaced_grid, py::arg("n"), py::arg("d_min"), py::arg("d_max"),
        py::arg("points"));
  m.def("error_amplification", [](const Matrix& a, const Vector& b, double delta_scale,
                                  std::size_t trials, std::uint64_t seed) {
    const auto r = error_amplification(a, b, delta_scale, trials, Seed(seed));
    py::dict out;
    out["max_ratio"] = r.max_ratio;
    out["kappa"] = r.kappa;
    out["trials"] = r.trials;
    out["rhs_projected"] = r.rhs_projected;
    return out;
  }, py::arg("a"), py::arg("b"), py::arg("delta_scale"), py::arg("trials"), py::arg("seed"));
}
