#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "specdescent/cli.hpp"
#include "specdescent/io.hpp"

using namespace specdescent;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "specdescent");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("specdescent_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool same_real(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::size_t data_rows(const std::string& csv) {
  return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
}

}  // namespace

TEST_CASE("real formatting round-trips") {
  SampleStream stream(Seed(1));
  for (int i = 0; i < 2000; ++i) {
    const double x = stream.normal() * std::pow(10.0, 40.0 * (stream.uniform() - 0.5));
    REQUIRE(parse_real(format_real(x)) == x);
  }
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(parse_real("inf")));
  CHECK(std::isnan(parse_real("nan")));
  CHECK(format_real(0.25) == "0.25");
  CHECK_THROWS_AS(parse_real("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real(""), std::invalid_argument);
}

TEST_CASE("records CSV round-trips field by field") {
  SweepConfig c;
  c.n = 6;
  c.d_grid = {3, 6, 12};
  c.trials = 4;
  c.master_seed = Seed(5);
  auto records = run_sweep(c);
  records[1].kappa = std::numeric_limits<double>::infinity();
  records[2].failed = true;
  records[2].sigma_max = records[2].sigma_min = records[2].kappa = std::nan("");

  std::stringstream buffer;
  write_records_csv(buffer, records, true);
  CHECK(buffer.str().rfind(std::string(kRecordsHeader) + "\n", 0) == 0);
  const auto parsed = read_records_csv(buffer);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = parsed[i];
    CAPTURE(i);
    CHECK(a.n == b.n);
    CHECK(a.d == b.d);
    CHECK(a.gamma == b.gamma);
    CHECK(a.trial == b.trial);
    CHECK(a.seed == b.seed);
    CHECK(same_real(a.sigma_max, b.sigma_max));
    CHECK(same_real(a.sigma_min, b.sigma_min));
    CHECK(same_real(a.kappa, b.kappa));
    CHECK(same_real(a.kappa_mp, b.kappa_mp));
    CHECK(a.wall_time_ms == b.wall_time_ms);
    CHECK(a.failed == b.failed);
  }

  const auto rows = aggregate(records);
  std::stringstream agg;
  write_aggregate_csv(agg, rows);
  const auto parsed_rows = read_aggregate_csv(agg);
  REQUIRE(parsed_rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed_rows[i].d == rows[i].d);
    CHECK(same_real(parsed_rows[i].kappa_median, rows[i].kappa_median));
    CHECK(same_real(parsed_rows[i].kappa_mp, rows[i].kappa_mp));
    CHECK(parsed_rows[i].inf_count == rows[i].inf_count);
  }
}

TEST_CASE("CSV readers report line numbers") {
  std::istringstream bad_header("n,d\n1,2\n");
  CHECK_THROWS_AS(read_aggregate_csv(bad_header), ParseError);

  std::istringstream ragged("1,2\n3,4\n5\n");
  try {
    read_matrix_csv(ragged);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream junk("1,2\n3,x\n");
  try {
    read_matrix_csv(junk);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(read_matrix_csv(empty), ParseError);

  std::istringstream column("1\n2\n3\n");
  CHECK(read_vector_csv(column).size() == 3);
  std::istringstream row("1, 2, 3\n");
  CHECK(read_vector_csv(row).size() == 3);
}

TEST_CASE("predict") {
  auto r = cli({"predict", "--gamma", "0.25"});
  CHECK(r.code == 0);
  CHECK(r.out == "{\"lower\":0.25,\"upper\":2.25,\"kappa\":3.0}\n");
  r = cli({"predict", "--gamma", "1"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["kappa"] == "inf");
  CHECK(cli({"predict", "--gamma", "-1"}).code == 2);
  CHECK(cli({"predict"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
}

TEST_CASE("cond") {
  auto r = cli({"cond", "--n", "4", "--d", "4", "--ensemble", "identity-test"});
  CHECK(r.code == 0);
  CHECK(r.out == "1.0\n");

  const auto first = cli({"cond", "--n", "30", "--d", "60", "--seed", "7"});
  const auto second = cli({"cond", "--n", "30", "--d", "60", "--seed", "7"});
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  CHECK(cli({"cond", "--n", "30", "--d", "60", "--seed", "8"}).out != first.out);

  r = cli({"cond", "--n", "1000", "--d", "4000", "--ensemble", "gaussian", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 3.0) <= 0.15 * 3.0);

  CHECK(cli({"cond", "--n", "3", "--d", "3", "--ensemble", "nope"}).code == 2);
  CHECK(cli({"cond", "--n", "0", "--d", "3"}).code == 2);
  r = cli({"cond", "--n", "10", "--d", "5", "--ensemble", "dot", "--kernel-fn", "linear"});
  CHECK(r.code == 0);
  CHECK(r.out == "\"inf\"\n");
}

TEST_CASE("sweep writes reproducible outputs") {
  const fs::path dir = scratch_dir("sweep");
  const std::vector<std::string> args = {"sweep", "--n", "50", "--d-grid", "10,25,50,100,250", "--trials", "5",
                                         "--ensemble", "gaussian", "--seed", "1", "--threads", "2"};
  auto with_out = [&](const fs::path& out) {
    auto a = args;
    a.push_back("--out");
    a.push_back(out.string());
    return a;
  };
  const auto r1 = cli(with_out(dir / "a"));
  REQUIRE(r1.code == 0);
  const auto r2 = cli(with_out(dir / "b"));
  REQUIRE(r2.code == 0);

  const std::string records = slurp(dir / "a" / "records.csv");
  CHECK(data_rows(records) == 25);
  CHECK(records == slurp(dir / "b" / "records.csv"));
  CHECK(slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv"));
  CHECK(data_rows(slurp(dir / "a" / "aggregate.csv")) == 5);
  CHECK(nlohmann::json::parse(r1.out)["peak_d"] == 50);

  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["subcommand"] == "sweep");
  CHECK(manifest["version"] == std::string(kVersion));
  CHECK(manifest["master_seed"] == 1);
  CHECK(manifest.contains("started_at"));
  CHECK(manifest.contains("finished_at"));
  CHECK(manifest["parameters"]["d_grid"] == "10,25,50,100,250");

  SUBCASE("rerun from the manifest") {
    const auto r3 = cli({"rerun", (dir / "a" / "manifest.json").string(), "--out", (dir / "c").string(),
                         "--threads", "1"});
    REQUIRE(r3.code == 0);
    CHECK(slurp(dir / "c" / "records.csv") == records);
    CHECK(slurp(dir / "c" / "aggregate.csv") == slurp(dir / "a" / "aggregate.csv"));
  }
  SUBCASE("timing is opt-in") {
    auto a = with_out(dir / "t");
    a.push_back("--timing");
    REQUIRE(cli(a).code == 0);
    CHECK(read_records_csv(*std::make_unique<std::ifstream>(dir / "t" / "records.csv")).front().wall_time_ms >= 0.0);
  }
}

TEST_CASE("sweep with the default log grid and kernel ensembles") {
  const fs::path dir = scratch_dir("sweep_grid");
  auto r = cli({"sweep", "--n", "20", "--d-min", "5", "--d-max", "80", "--points", "4", "--trials", "2",
                "--ensemble", "rbf", "--sigma", "5", "--threads", "1", "--out", (dir / "rbf").string()});
  CHECK(r.code == 0);
  const auto rows = [&] {
    std::ifstream in(dir / "rbf" / "aggregate.csv");
    return read_aggregate_csv(in);
  }();
  CHECK(std::any_of(rows.begin(), rows.end(), [](const AggregateRow& a) { return a.d == 20; }));

  r = cli({"sweep", "--n", "20", "--d-grid", "10,20", "--trials", "1", "--ensemble", "dot", "--kernel-fn",
           "exp:1,1", "--out", (dir / "dot").string()});
  CHECK(r.code == 0);
  r = cli({"sweep", "--n", "20", "--d-grid", "10,20", "--ensemble", "dot", "--kernel-fn", "wavy",
           "--out", (dir / "bad").string()});
  CHECK(r.code == 2);
  r = cli({"sweep", "--n", "20", "--d-grid", "20,10", "--out", (dir / "bad").string()});
  CHECK(r.code == 2);
}

TEST_CASE("sweep output errors") {
  const fs::path dir = scratch_dir("sweep_io");
  write(dir / "plain_file", "x");
  const auto r = cli({"sweep", "--n", "5", "--d-grid", "5", "--trials", "1", "--out", (dir / "plain_file" / "sub").string()});
  CHECK(r.code == 4);
  CHECK(cli({"rerun", (dir / "missing.json").string(), "--out", (dir / "o").string()}).code == 4);
  write(dir / "broken.json", "{\"subcommand\": \"sweep\"}");
  CHECK(cli({"rerun", (dir / "broken.json").string(), "--out", (dir / "o").string()}).code == 2);
}

TEST_CASE("thread count falls back to SPECDESCENT_THREADS") {
  const fs::path dir = scratch_dir("threads");
  ::setenv("SPECDESCENT_THREADS", "3", 1);
  auto r = cli({"sweep", "--n", "10", "--d-grid", "5,10", "--trials", "2", "--out", (dir / "a").string()});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "a" / "manifest.json"))["threads"] == 3);
  ::setenv("SPECDESCENT_THREADS", "lots", 1);
  r = cli({"sweep", "--n", "10", "--d-grid", "5,10", "--trials", "2", "--out", (dir / "b").string()});
  CHECK(r.code == 2);
  ::unsetenv("SPECDESCENT_THREADS");
}

TEST_CASE("solve") {
  const fs::path dir = scratch_dir("solve");
  write(dir / "a.csv", "1,1\n");
  write(dir / "b.csv", "2\n");
  auto r = cli({"solve", "--matrix", (dir / "a.csv").string(), "--rhs", (dir / "b.csv").string()});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["x"][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["x"][1].get<double>() == doctest::Approx(1.0));
  CHECK(j["residual"].get<double>() <= 1e-14);
  CHECK(j["effective_rank"] == 1);

  write(dir / "eye.csv", "1,0,0\n0,1,0\n0,0,1\n");
  write(dir / "rhs3.csv", "4\n-5\n6.5\n");
  r = cli({"solve", "--matrix", (dir / "eye.csv").string(), "--rhs", (dir / "rhs3.csv").string()});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["x"][0].get<double>() == 4.0);
  CHECK(j["x"][1].get<double>() == -5.0);
  CHECK(j["x"][2].get<double>() == 6.5);

  write(dir / "empty.csv", "");
  CHECK(cli({"solve", "--matrix", (dir / "empty.csv").string(), "--rhs", (dir / "b.csv").string()}).code == 2);
  CHECK(cli({"solve", "--matrix", (dir / "eye.csv").string(), "--rhs", (dir / "b.csv").string()}).code == 2);
  write(dir / "junk.csv", "1,0\n0,oops\n");
  r = cli({"solve", "--matrix", (dir / "junk.csv").string(), "--rhs", (dir / "b.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(cli({"solve", "--matrix", (dir / "nope.csv").string(), "--rhs", (dir / "b.csv").string()}).code == 4);
}

TEST_CASE("scalar function parsing") {
  CHECK(parse_scalar_function("linear").kind() == ScalarFunction::Kind::linear);
  CHECK(parse_scalar_function("affine:1,1")(2.0) == 3.0);
  CHECK(parse_scalar_function("const:4")(9.0) == 4.0);
  CHECK(parse_scalar_function("exp:2,0")(5.0) == 2.0);
  CHECK_THROWS_AS(parse_scalar_function("affine:1"), DomainError);
  CHECK_THROWS_AS(parse_scalar_function("sin"), DomainError);
}
