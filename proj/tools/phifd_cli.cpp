// Command-line driver: solve, convergence, sweep, conditioning, multigrid.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phifd/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Flags {
  std::string config;
  std::string case_name;
  std::string scheme;
  int dim = 0;
  std::vector<int> n;
  std::optional<double> gamma, sigma, tol;
  std::vector<double> gamma_list, sigma_list;
  std::string solver;
  std::optional<int> maxiter, n0, n_obj, spline_degree;
  std::optional<std::uint64_t> seed;
  std::string out, vtk;
  bool kappa = false;
  bool cold_baseline = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "TOML file; flags given here override it");
  sub->add_option("--case", f.case_name, "circle2d or sphere3d");
  sub->add_option("--scheme", f.scheme, "phifd, phifd2 or shortley_weller");
  sub->add_option("--dim", f.dim, "2 or 3 (default: the case's own)");
  sub->add_option("--n,--n-list", f.n, "grid resolution(s) N")->delimiter(',');
  sub->add_option("--gamma", f.gamma, "penalty weight");
  sub->add_option("--sigma", f.sigma, "stabilisation weight");
  sub->add_option("--solver", f.solver, "direct or bicgstab");
  sub->add_option("--tol", f.tol, "relative residual tolerance for bicgstab");
  sub->add_option("--maxiter", f.maxiter, "bicgstab iteration cap");
  sub->add_option("--seed", f.seed, "seed of the condition estimator");
  sub->add_option("--out", f.out, "CSV output path");
}

phifd::RunConfig build_config(const Flags& f) {
  phifd::RunConfig cfg;
  if (!f.config.empty()) phifd::apply_toml(phifd::parse_toml_file(f.config), cfg);
  if (!f.case_name.empty()) cfg.case_name = f.case_name;
  if (!f.scheme.empty()) cfg.scheme = phifd::parse_scheme(f.scheme);
  if (f.dim != 0) cfg.dim = f.dim;
  if (!f.n.empty()) cfg.n_list = f.n;
  if (f.gamma) cfg.gamma = f.gamma;
  if (f.sigma) cfg.sigma = f.sigma;
  if (!f.gamma_list.empty()) cfg.gamma_list = f.gamma_list;
  if (!f.sigma_list.empty()) cfg.sigma_list = f.sigma_list;
  if (!f.solver.empty()) cfg.solver = phifd::parse_solver(f.solver);
  if (f.tol) cfg.tol = *f.tol;
  if (f.maxiter) cfg.maxiter = *f.maxiter;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.vtk.empty()) cfg.vtk = f.vtk;
  if (f.kappa) cfg.kappa = true;
  if (f.n0) cfg.n0 = *f.n0;
  if (f.n_obj) cfg.n_obj = *f.n_obj;
  if (f.cold_baseline) cfg.cold_baseline = true;
  if (f.spline_degree) cfg.spline_degree = *f.spline_degree;
  return cfg;
}

void print_table(const phifd::ConvergenceTable& t) {
  std::printf("%6s %12s %12s %12s %12s %12s\n", "N", "h_plot", "err_l2", "err_linf", "err_h1",
              "kappa");
  for (const auto& r : t.rows)
    std::printf("%6d %12.5g %12.5g %12.5g %12.5g %12s\n", r.n, r.h_plot, r.errors.l2,
                r.errors.linf, r.errors.h1,
                r.kappa ? std::to_string(*r.kappa).c_str() : "-");
  if (t.rows.size() >= 2)
    std::printf("orders (least squares): l2 %.3f  linf %.3f  h1 %.3f\n", t.orders.l2,
                t.orders.linf, t.orders.h1);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalised finite differences for the Poisson problem on level-set domains"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "one solve at the first N");
  add_common(solve, f);
  solve->add_flag("--kappa", f.kappa, "also estimate the condition number");
  solve->add_option("--vtk", f.vtk, "export the solution as <stem>.vtk and <stem>.csv");

  auto* conv = app.add_subcommand("convergence", "errors and orders over an N list");
  add_common(conv, f);
  conv->add_flag("--kappa", f.kappa, "also estimate condition numbers");

  auto* sweep = app.add_subcommand("sweep", "errors and condition numbers over gamma or sigma");
  add_common(sweep, f);
  sweep->add_option("--gamma-list", f.gamma_list, "penalty values")->delimiter(',');
  sweep->add_option("--sigma-list", f.sigma_list, "stabilisation values")->delimiter(',');
  sweep->add_flag("--kappa,!--no-kappa", f.kappa, "estimate condition numbers (default on)");

  auto* cond = app.add_subcommand("conditioning", "condition number against N");
  add_common(cond, f);

  auto* mg = app.add_subcommand("multigrid", "coarse direct solve, spline transfer, BiCGSTAB");
  add_common(mg, f);
  mg->add_option("--n0", f.n0, "coarse resolution (several via --n)");
  mg->add_option("--nobj", f.n_obj, "fine resolution");
  mg->add_option("--spline-degree", f.spline_degree, "transfer spline degree, 1 or 2");
  mg->add_flag("--cold-baseline", f.cold_baseline, "also solve from a zero initial guess");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep && f.n.empty() && f.config.empty()) f.n = {10, 20, 40, 80};
    if (*sweep && !sweep->count("--no-kappa") && !sweep->count("--kappa")) f.kappa = true;
    if (*cond && f.n.empty() && f.config.empty()) f.n = {10, 20, 40, 80};
    phifd::RunConfig cfg = build_config(f);
    // coarse resolutions: --n when given, otherwise the single n0
    if (*mg && f.n.empty()) cfg.n_list = {cfg.n0};

    if (*solve) {
      const auto row = phifd::run_solve(cfg);
      phifd::ConvergenceTable t;
      t.rows.push_back(row);
      print_table(t);
    } else if (*conv) {
      print_table(phifd::run_convergence(cfg));
    } else if (*sweep) {
      const auto rows = phifd::run_sweep(cfg);
      std::printf("%8s %12s %6s %12s %12s\n", "param", "value", "N", "err_l2", "kappa");
      for (const auto& r : rows)
        std::printf("%8s %12.5g %6d %12.5g %12s\n", r.parameter.c_str(), r.value, r.row.n,
                    r.row.errors.l2, r.row.kappa ? std::to_string(*r.row.kappa).c_str() : "-");
    } else if (*cond) {
      const auto res = phifd::run_conditioning(cfg);
      for (std::size_t i = 0; i < res.n.size(); ++i)
        std::printf("N=%-6d kappa=%.6g\n", res.n[i], res.kappa[i]);
      if (res.n.size() >= 2) std::printf("slope log kappa / log h = %.3f\n", res.slope);
    } else if (*mg) {
      const auto reps = phifd::run_multigrid(cfg);
      for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto& r = reps[i];
        std::printf("N0=%d N_obj=%d l2=%.5g linf=%.5g h1=%.5g iters=%d converged=%d "
                    "t_coarse=%.3f t_interp=%.3f t_fine=%.3f\n",
                    cfg.n_list[i], cfg.n_obj, r.errors.l2, r.errors.linf, r.errors.h1,
                    r.fine.iterations, r.fine.converged ? 1 : 0, r.t_coarse, r.t_interp,
                    r.t_fine);
        if (r.cold)
          std::printf("  cold start: l2=%.5g iters=%d t=%.3f\n", r.cold_errors->l2,
                      r.cold->iterations, r.cold->wall_time);
        if (!r.fine.converged) {
          std::fprintf(stderr, "error: fine solve did not converge\n");
          return kExitSolver;
        }
      }
    }
  } catch (const phifd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const phifd::GeometryError& e) {
    std::fprintf(stderr, "geometry error: %s\n", e.what());
    return kExitConfig;
  } catch (const phifd::AssemblyError& e) {
    std::fprintf(stderr, "assembly error: %s\n", e.what());
    return kExitConfig;
  } catch (const phifd::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const phifd::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
