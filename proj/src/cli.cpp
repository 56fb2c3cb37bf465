#include "specdescent/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specdescent/errors.hpp"
#include "specdescent/experiments.hpp"
#include "specdescent/io.hpp"
#include "specdescent/mp_theory.hpp"
#include "specdescent/spectral.hpp"

namespace specdescent {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

json real_to_json(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  if (std::isnan(value)) {
    return "nan";
  }
  return value;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("SPECDESCENT_THREADS"); env != nullptr && *env != '\0') {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      throw DomainError(std::string("SPECDESCENT_THREADS is not a non-negative integer: ") + env);
    }
  }
  return 0;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string_view::npos ? comma : comma - start);
    try {
      values.push_back(parse_real(field));
    } catch (const std::invalid_argument& e) {
      throw DomainError(e.what());
    }
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return values;
}

struct EnsembleOptions {
  std::string name = "gaussian";
  double sigma = 5.0;
  std::string kernel_fn = "linear";
};

Ensemble build_ensemble(const EnsembleOptions& o) {
  if (o.name == "gaussian") return Ensemble::gaussian();
  if (o.name == "rademacher") return Ensemble::rademacher();
  if (o.name == "identity-test") return Ensemble::identity_test();
  if (o.name == "rbf") return Ensemble::radial_kernel(o.sigma);
  if (o.name == "dot") return Ensemble::dot_kernel(parse_scalar_function(o.kernel_fn));
  throw DomainError("unknown ensemble '" + o.name +
                    "' (expected gaussian, rademacher, identity-test, rbf or dot)");
}

void add_ensemble_flags(CLI::App& cmd, EnsembleOptions& o) {
  cmd.add_option("--ensemble", o.name, "gaussian | rademacher | identity-test | rbf | dot")
      ->capture_default_str();
  cmd.add_option("--sigma", o.sigma, "RBF bandwidth")->capture_default_str();
  cmd.add_option("--kernel-fn", o.kernel_fn,
                 "dot-product scalar function: linear | const:c | affine:a,b | exp:scale,rate")
      ->capture_default_str();
}

// Everything needed to reproduce a sweep.
struct SweepParams {
  long long n = 200;
  std::string d_grid;  // explicit comma list; empty selects the log grid
  long long d_min = 20;
  long long d_max = 2000;
  std::size_t points = 13;
  std::size_t trials = 20;
  EnsembleOptions ensemble;
  std::uint64_t seed = 0;
  std::optional<double> rank_tol;
  bool timing = false;
};

json to_json(const SweepParams& p) {
  json j = {{"n", p.n},           {"d_grid", p.d_grid},
            {"d_min", p.d_min},   {"d_max", p.d_max},
            {"points", p.points}, {"trials", p.trials},
            {"ensemble", p.ensemble.name}, {"sigma", p.ensemble.sigma},
            {"kernel_fn", p.ensemble.kernel_fn}, {"seed", p.seed},
            {"timing", p.timing}};
  j["rank_tol"] = p.rank_tol ? json(*p.rank_tol) : json(nullptr);
  return j;
}

SweepParams sweep_params_from_json(const json& j) {
  SweepParams p;
  p.n = j.at("n").get<long long>();
  p.d_grid = j.at("d_grid").get<std::string>();
  p.d_min = j.at("d_min").get<long long>();
  p.d_max = j.at("d_max").get<long long>();
  p.points = j.at("points").get<std::size_t>();
  p.trials = j.at("trials").get<std::size_t>();
  p.ensemble.name = j.at("ensemble").get<std::string>();
  p.ensemble.sigma = j.at("sigma").get<double>();
  p.ensemble.kernel_fn = j.at("kernel_fn").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.timing = j.at("timing").get<bool>();
  if (!j.at("rank_tol").is_null()) {
    p.rank_tol = j.at("rank_tol").get<double>();
  }
  return p;
}

SweepConfig build_config(const SweepParams& p, std::size_t threads) {
  SweepConfig c;
  c.n = p.n;
  c.trials = p.trials;
  c.ensemble = build_ensemble(p.ensemble);
  c.master_seed = Seed(p.seed);
  c.rank_tol = p.rank_tol;
  c.threads = threads;
  if (p.d_grid.empty()) {
    c.d_grid = log_spaced_grid(p.n, p.d_min, p.d_max, p.points);
  } else {
    for (const double d : parse_number_list(p.d_grid)) {
      if (d != std::floor(d) || d < 1) {
        throw DomainError("d grid entries must be positive integers");
      }
      c.d_grid.push_back(static_cast<Eigen::Index>(d));
    }
  }
  return c;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  file << contents;
  if (!file.flush()) {
    throw IoError("failed writing " + path.string());
  }
}

int execute_sweep(const SweepParams& params, const std::string& out_dir, std::size_t threads,
                  std::ostream& out, std::ostream& err) {
  const std::string started = utc_timestamp();
  const SweepConfig config = build_config(params, threads);
  for (const auto& w : config.validate()) {
    err << "warning: " << w << '\n';
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir);
  }

  const auto records = run_sweep(config);
  std::vector<std::string> warnings;
  const auto rows = aggregate(records, &warnings);
  for (const auto& w : warnings) {
    err << "warning: " << w << '\n';
  }
  for (const auto& r : records) {
    if (r.failed) {
      err << "warning: trial " << r.trial << " at d=" << r.d << " failed: " << r.error << '\n';
    }
  }
  for (const auto& row : rows) {
    err << "n=" << row.n << " d=" << row.d << " gamma=" << format_real(row.gamma)
        << " kappa_median=" << format_real(row.kappa_median)
        << " kappa_mp=" << format_real(row.kappa_mp) << " inf=" << row.inf_count << '\n';
  }

  std::ostringstream records_csv;
  write_records_csv(records_csv, records, params.timing);
  std::ostringstream aggregate_csv;
  write_aggregate_csv(aggregate_csv, rows);
  write_file(fs::path(out_dir) / "records.csv", records_csv.str());
  write_file(fs::path(out_dir) / "aggregate.csv", aggregate_csv.str());

  json manifest = {{"tool", "specdescent"},
                   {"version", std::string(kVersion)},
                   {"subcommand", "sweep"},
                   {"parameters", to_json(params)},
                   {"master_seed", params.seed},
                   {"threads", threads},
                   {"started_at", started},
                   {"finished_at", utc_timestamp()}};
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");

  if (!rows.empty()) {
    const Peak peak = detect_peak(rows);
    out << json{{"out", out_dir},
                {"records", records.size()},
                {"peak_d", peak.d},
                {"peak_kappa", real_to_json(peak.kappa)}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return in;
}

}  // namespace

ScalarFunction parse_scalar_function(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::vector<double> args =
      colon == std::string_view::npos ? std::vector<double>{} : parse_number_list(text.substr(colon + 1));
  const auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw DomainError("scalar function '" + std::string(name) + "' takes " +
                        std::to_string(count) + " parameter(s)");
    }
  };
  if (name == "linear") {
    expect(0);
    return ScalarFunction::linear();
  }
  if (name == "const") {
    expect(1);
    return ScalarFunction::constant(args[0]);
  }
  if (name == "affine") {
    expect(2);
    return ScalarFunction::affine(args[0], args[1]);
  }
  if (name == "exp") {
    expect(2);
    return ScalarFunction::exponential_scaled(args[0], args[1]);
  }
  throw DomainError("unknown scalar function '" + std::string(text) + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Condition numbers of random and kernel matrices across the aspect ratio n/d",
               "specdescent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  double gamma = 0.0;
  auto* predict_cmd = app.add_subcommand("predict", "Marchenko-Pastur edges and condition number");
  predict_cmd->add_option("--gamma", gamma, "aspect ratio n/d")->required();

  long long cond_n = 0;
  long long cond_d = 0;
  std::uint64_t cond_seed = 0;
  std::optional<double> cond_rank_tol;
  EnsembleOptions cond_ensemble;
  auto* cond_cmd = app.add_subcommand("cond", "condition number of one sampled matrix");
  cond_cmd->add_option("--n", cond_n, "rows (kernel ensembles: points)")->required();
  cond_cmd->add_option("--d", cond_d, "columns (kernel ensembles: cloud dimension)")->required();
  cond_cmd->add_option("--seed", cond_seed)->capture_default_str();
  cond_cmd->add_option("--rank-tol", cond_rank_tol, "relative rank tolerance");
  add_ensemble_flags(*cond_cmd, cond_ensemble);

  SweepParams sweep;
  std::string sweep_out;
  std::size_t threads = 0;
  bool threads_given = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep of kappa over a d grid");
  sweep_cmd->add_option("--n", sweep.n, "fixed row count")->capture_default_str();
  sweep_cmd->add_option("--d-grid", sweep.d_grid, "comma-separated increasing d values");
  sweep_cmd->add_option("--d-min", sweep.d_min, "log grid lower end")->capture_default_str();
  sweep_cmd->add_option("--d-max", sweep.d_max, "log grid upper end")->capture_default_str();
  sweep_cmd->add_option("--points", sweep.points, "log grid size before inserting d = n")
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--rank-tol", sweep.rank_tol, "relative rank tolerance");
  sweep_cmd->add_flag("--timing", sweep.timing, "write measured wall_time_ms instead of 0");
  sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
  add_ensemble_flags(*sweep_cmd, sweep.ensemble);
  auto* threads_opt = sweep_cmd->add_option("--threads", threads, "worker threads (0: all cores)");

  std::string manifest_path;
  std::string rerun_out;
  auto* rerun_cmd = app.add_subcommand("rerun", "repeat a sweep from its manifest.json");
  rerun_cmd->add_option("manifest", manifest_path)->required();
  rerun_cmd->add_option("--out", rerun_out, "output directory")->required();
  auto* rerun_threads_opt = rerun_cmd->add_option("--threads", threads);

  std::string matrix_path;
  std::string rhs_path;
  std::optional<double> solve_rank_tol;
  auto* solve_cmd = app.add_subcommand("solve", "minimum-norm solution x = A^+ b");
  solve_cmd->add_option("--matrix", matrix_path, "CSV, one row per line")->required();
  solve_cmd->add_option("--rhs", rhs_path, "CSV of the n right-hand-side values")->required();
  solve_cmd->add_option("--rank-tol", solve_rank_tol, "relative rank tolerance");

  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  threads_given = threads_opt->count() > 0 || rerun_threads_opt->count() > 0;

  try {
    if (*predict_cmd) {
      const MPPrediction p = predict(gamma);
      out << json{{"lower", p.lower_edge},
                  {"upper", p.upper_edge},
                  {"kappa", real_to_json(p.predicted_kappa)}}
                 .dump()
          << '\n';
      return kExitOk;
    }
    if (*cond_cmd) {
      const Matrix a = sample_matrix(build_ensemble(cond_ensemble), cond_n, cond_d, Seed(cond_seed));
      out << real_to_json(condition_number(a, cond_rank_tol)).dump() << '\n';
      return kExitOk;
    }
    if (*sweep_cmd) {
      return execute_sweep(sweep, sweep_out, threads_given ? threads : default_threads(), out, err);
    }
    if (*rerun_cmd) {
      auto in = open_input(manifest_path);
      json manifest;
      try {
        manifest = json::parse(in);
        if (manifest.at("subcommand") != "sweep") {
          throw DomainError("manifest does not describe a sweep");
        }
        if (manifest.at("version") != kVersion) {
          err << "warning: manifest written by version " << manifest.at("version").dump()
              << "; outputs may differ\n";
        }
        sweep = sweep_params_from_json(manifest.at("parameters"));
      } catch (const json::exception& e) {
        throw DomainError(std::string("malformed manifest: ") + e.what());
      }
      return execute_sweep(sweep, rerun_out, threads_given ? threads : default_threads(), out, err);
    }
    if (*solve_cmd) {
      auto matrix_in = open_input(matrix_path);
      auto rhs_in = open_input(rhs_path);
      const Matrix a = read_matrix_csv(matrix_in);
      const Vector b = read_vector_csv(rhs_in);
      if (b.size() != a.rows()) {
        throw DomainError("matrix has " + std::to_string(a.rows()) + " rows but rhs has " +
                          std::to_string(b.size()) + " values");
      }
      const SolveResult r = min_norm_solve(a, b, solve_rank_tol);
      out << json{{"x", std::vector<double>(r.x.begin(), r.x.end())},
                  {"residual", r.residual_norm},
                  {"effective_rank", r.effective_rank}}
                 .dump()
          << '\n';
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace specdescent
