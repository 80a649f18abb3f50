#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "phifd/experiments.hpp"

using namespace phifd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "phifd_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PHIFD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Data rows with the timing columns cut off.
std::vector<std::string> untimed_rows(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& l : split_lines(slurp(p))) {
    if (l.empty() || l[0] == '#' || l[0] == 'N') continue;
    std::string kept;
    int commas = 0;
    for (char c : l) {
      if (c == ',' && ++commas == 8) break;
      kept += c;
    }
    out.push_back(kept);
  }
  return out;
}

} // namespace

TEST(Toml, ScalarsArraysAndTables) {
  const auto t = parse_toml_string(R"(
# comment
case = "circle2d"   # trailing
n = [10, 20, 40]
gamma = 1.5e0
kappa = true
seed = 1_000

[multigrid]
n0 = 400
)");
  EXPECT_EQ(std::get<std::string>(std::get<TomlScalar>(t.at("case"))), "circle2d");
  EXPECT_EQ(std::get<std::vector<TomlScalar>>(t.at("n")).size(), 3u);
  EXPECT_EQ(std::get<double>(std::get<TomlScalar>(t.at("gamma"))), 1.5);
  EXPECT_EQ(std::get<bool>(std::get<TomlScalar>(t.at("kappa"))), true);
  EXPECT_EQ(std::get<long long>(std::get<TomlScalar>(t.at("seed"))), 1000);
  EXPECT_EQ(std::get<long long>(std::get<TomlScalar>(t.at("multigrid.n0"))), 400);
}

TEST(Toml, Errors) {
  EXPECT_THROW(parse_toml_string("a = 1\na = 2"), ConfigError);
  EXPECT_THROW(parse_toml_string("a = [1, 2"), ConfigError);
  EXPECT_THROW(parse_toml_string("just words"), ConfigError);
  EXPECT_THROW(parse_toml_string("a = \"open"), ConfigError);
  EXPECT_THROW(parse_toml_string("a = 12abc"), ConfigError);
  EXPECT_THROW(parse_toml_file("/nonexistent/x.toml"), ConfigError);
}

TEST(RunConfig, ApplyTomlAndValidate) {
  RunConfig cfg;
  apply_toml(parse_toml_string("scheme = \"phifd2\"\nn = 20\nsolver = \"bicgstab\"\n"
                               "[multigrid]\nspline_degree = 1\n"),
             cfg);
  EXPECT_EQ(cfg.scheme, Scheme::PhiFD2);
  EXPECT_EQ(cfg.n_list, std::vector<int>{20});
  EXPECT_EQ(cfg.solver, SolverKind::Bicgstab);
  EXPECT_EQ(cfg.spline_degree, 1);
  EXPECT_EQ(cfg.params().gamma, 10.0);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(apply_toml(parse_toml_string("colour = 1"), cfg), ConfigError);
  EXPECT_THROW(apply_toml(parse_toml_string("n = \"ten\""), cfg), ConfigError);
  cfg.gamma_list = {1.0};
  cfg.sigma_list = {1.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RunConfig, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.params().gamma, 1.0);
  EXPECT_EQ(cfg.params().sigma, 0.01);
  EXPECT_EQ(cfg.tol, 1e-4);
}

TEST(Export, ConstantFieldN2) {
  const auto g = make_unit_grid(2, 2);
  const std::vector<double> u(9, 0.75);
  const auto stem = scratch("const").string();
  export_field(u, g, stem);
  const auto vtk = split_lines(slurp(stem + ".vtk"));
  int values = 0;
  bool data = false;
  for (const auto& l : vtk) {
    if (data) {
      EXPECT_EQ(l, "0.75");
      ++values;
    }
    if (l == "LOOKUP_TABLE default") data = true;
  }
  EXPECT_EQ(values, 9);
  EXPECT_EQ(read_field_csv(stem + ".csv"), u);
}

TEST(Export, RoundTripIsBitwiseAndDeterministic) {
  const auto tc = builtin_case("circle2d", 2);
  const auto sys = assemble(tc, 40, default_params(Scheme::PhiFD));
  const auto u = direct_solve(sys.matrix, sys.rhs).solution;
  const auto a = scratch("sol_a").string();
  const auto b = scratch("sol_b").string();
  export_field(u, sys.grid(), a);
  export_field(u, sys.grid(), b);
  const auto back = read_field_csv(a + ".csv");
  ASSERT_EQ(back.size(), 41u * 41u);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(back[k], u[k]);
  EXPECT_EQ(slurp(a + ".vtk"), slurp(b + ".vtk"));
  EXPECT_EQ(slurp(a + ".csv"), slurp(b + ".csv"));
}

TEST(Export, UnwritablePath) {
  const auto g = make_unit_grid(2, 2);
  EXPECT_THROW(export_field(std::vector<double>(9), g, "/nonexistent/dir/x"), IoError);
}

TEST(Cli, SingleShortleyWellerRun) {
  const auto out = scratch("sw.csv");
  ASSERT_EQ(run_cli("convergence --scheme shortley_weller --n 10 --out " + out.string()), 0);
  EXPECT_EQ(untimed_rows(out).size(), 1u);
  const auto text = slurp(out);
  EXPECT_NE(text.find("scheme=shortley_weller"), std::string::npos);
  EXPECT_NE(text.find("h_plot=sqrt(2)*hx"), std::string::npos);
  EXPECT_EQ(text.find("nan"), std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  const auto a = scratch("det_a.csv"), b = scratch("det_b.csv");
  const std::string args = "convergence --n 10,20,40 --kappa --seed 7 --out ";
  ASSERT_EQ(run_cli(args + a.string()), 0);
  ASSERT_EQ(run_cli(args + b.string()), 0);
  const auto ra = untimed_rows(a);
  EXPECT_EQ(ra.size(), 3u);
  EXPECT_EQ(ra, untimed_rows(b));
}

TEST(Cli, ConfigFileWithOverride) {
  const auto cfg = scratch("run.toml");
  std::ofstream(cfg) << "scheme = \"phifd2\"\nn = [10, 20]\n";
  const auto out = scratch("cfg.csv");
  ASSERT_EQ(run_cli("convergence --config " + cfg.string() + " --n 12 --out " + out.string()), 0);
  const auto rows = untimed_rows(out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].substr(0, 3), "12,");
  EXPECT_NE(slurp(out).find("scheme=phifd2 gamma=10"), std::string::npos);
}

TEST(Cli, OtherSubcommands) {
  EXPECT_EQ(run_cli("solve --n 20 --vtk " + scratch("s").string()), 0);
  EXPECT_TRUE(fs::exists(scratch("s.vtk")));
  EXPECT_EQ(run_cli("sweep --sigma-list 0.01,1 --n 10 --no-kappa"), 0);
  EXPECT_EQ(run_cli("conditioning --n 10,20"), 0);
  EXPECT_EQ(run_cli("multigrid --n0 10 --nobj 40 --cold-baseline --out " +
                    scratch("mg.csv").string()),
            0);
  EXPECT_EQ(untimed_rows(scratch("mg.csv")).size(), 1u);
  EXPECT_EQ(run_cli("solve --case sphere3d --n 12 --solver bicgstab"), 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("solve --scheme fem"), 2);
  EXPECT_EQ(run_cli("solve --bogus"), 2);
  EXPECT_EQ(run_cli("solve --n 1"), 2);
  EXPECT_EQ(run_cli("solve --gamma -1"), 2);
  EXPECT_EQ(run_cli("solve --case circle2d --dim 3"), 2);
  EXPECT_EQ(run_cli("sweep --gamma-list 1 --sigma-list 1"), 2);
  EXPECT_EQ(run_cli("sweep --n 10"), 2);
  EXPECT_EQ(run_cli("solve --config /nonexistent.toml"), 2);
  EXPECT_EQ(run_cli("solve --n 10 --out /nonexistent/dir/x.csv"), 2);
  EXPECT_EQ(run_cli("multigrid --n0 2 --nobj 10"), 2);
}

TEST(Cli, SolverFailureExitsThree) {
  EXPECT_EQ(run_cli("solve --n 40 --solver bicgstab --maxiter 2 --tol 1e-12"), 3);
  EXPECT_EQ(run_cli("multigrid --n0 10 --nobj 40 --maxiter 1 --tol 1e-12"), 3);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli("--help"), 0); }
