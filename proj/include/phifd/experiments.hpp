#pragma once

/// Experiment drivers behind the command-line tool: single solves,
/// convergence studies, parameter sweeps, conditioning curves and the
/// coarse-to-fine comparison. Each writes a CSV with a '#' metadata header.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "phifd/analysis.hpp"
#include "phifd/assembly.hpp"
#include "phifd/bicgstab.hpp"
#include "phifd/condition.hpp"
#include "phifd/config.hpp"
#include "phifd/direct.hpp"
#include "phifd/io.hpp"
#include "phifd/multigrid.hpp"
#include "phifd/reduce.hpp"

namespace phifd {

inline constexpr const char* kVersion = "1.0.0";

/// Resolved case for a config: explicit dim or the case's own.
inline TestCase case_for(const RunConfig& cfg) {
  const int dim = cfg.dim != 0 ? cfg.dim : default_dimension(cfg.case_name);
  return builtin_case(cfg.case_name, dim);
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// One solve of the case at resolution n with the config's solver.
struct SolveOutcome {
  SparseSystem system;
  SolveReport report;
  double t_assemble = 0.0;
};

inline SolveOutcome solve_case(const TestCase& tc, int n, const SchemeParams& params,
                               const RunConfig& cfg) {
  SolveOutcome out;
  auto t0 = Clock::now();
  out.system = assemble(tc, n, params);
  out.t_assemble = seconds_since(t0);
  if (cfg.solver == SolverKind::Direct) {
    out.report = direct_solve(out.system.matrix, out.system.rhs);
  } else {
    const ReducedSystem red = reduce_identity_rows(out.system.matrix, out.system.rhs);
    const std::vector<double> x0(red.active.size(), 0.0);
    out.report = bicgstab(red.matrix, red.rhs, x0, BicgstabOptions{cfg.tol, cfg.maxiter});
    out.report.solution = red.prolong_field(out.report.solution);
    out.report.relative_residual =
        relative_residual(out.system.matrix, out.report.solution, out.system.rhs);
    if (!out.report.converged)
      throw SolverError("bicgstab did not reach tol " + fmt(cfg.tol) + " in " +
                        std::to_string(cfg.maxiter) + " iterations at N=" + std::to_string(n));
  }
  return out;
}

inline ConvergenceRow row_for(const SolveOutcome& s, const TestCase& tc, bool with_kappa,
                              std::uint64_t seed) {
  ConvergenceRow row;
  const CartesianGrid& g = s.system.grid();
  row.n = g.intervals();
  row.hx = g.spacing();
  row.h_plot = plotted_mesh_size(g.spacing());
  row.errors = relative_errors(s.report.solution, tc, s.system.classification);
  if (with_kappa) {
    ConditionOptions opt;
    opt.seed = seed;
    row.kappa = condition_estimate(s.system.matrix, opt).kappa;
  }
  row.iterations = s.report.iterations;
  row.t_assemble = s.t_assemble;
  row.t_solve = s.report.wall_time;
  return row;
}

} // namespace detail

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

/// Metadata header shared by every CSV.
inline std::string csv_metadata(const RunConfig& cfg, const std::string& command) {
  const SchemeParams p = cfg.params();
  const TestCase tc = case_for(cfg);
  std::ostringstream s;
  s << "# phifd " << kVersion << " command=" << command << " eigen=" << EIGEN_WORLD_VERSION << '.'
    << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << " umfpack=" << UMFPACK_MAIN_VERSION
    << '.' << UMFPACK_SUB_VERSION << '.' << UMFPACK_SUBSUB_VERSION << '\n'
    << "# case=" << tc.name << " dim=" << tc.dim << " scheme=" << to_string(p.scheme)
    << " gamma=" << detail::fmt(p.gamma) << " sigma=" << detail::fmt(p.sigma) << '\n'
    << "# solver=" << to_string(cfg.solver) << " tol=" << detail::fmt(cfg.tol)
    << " maxiter=" << cfg.maxiter << " seed=" << cfg.seed << '\n'
    << "# h_plot=sqrt(2)*hx; errors relative over inside nodes; timings in seconds\n";
  return s.str();
}

inline constexpr const char* kConvergenceColumns =
    "N,hx,h_plot,err_l2,err_linf,err_h1,kappa,iters,t_assemble,t_solve";

inline std::string csv_row(const ConvergenceRow& r) {
  std::ostringstream s;
  s << r.n << ',' << detail::fmt(r.hx) << ',' << detail::fmt(r.h_plot) << ','
    << detail::fmt(r.errors.l2) << ',' << detail::fmt(r.errors.linf) << ','
    << detail::fmt(r.errors.h1) << ',' << (r.kappa ? detail::fmt(*r.kappa) : "") << ','
    << r.iterations << ',' << detail::fmt(r.t_assemble) << ',' << detail::fmt(r.t_solve);
  return s.str();
}

/// Appends lines to a file as they are produced so that a failure midway
/// leaves the finished rows on disk. A blank path discards output.
class CsvSink {
public:
  explicit CsvSink(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw IoError("cannot open " + path + " for writing");
  }
  void line(const std::string& text) {
    lines_.push_back(text);
    if (out_.is_open()) {
      out_ << text << '\n';
      out_.flush();
    }
  }
  const std::vector<std::string>& lines() const { return lines_; }

private:
  std::ofstream out_;
  std::vector<std::string> lines_;
};

/// Single solve at the first N of the list. Optionally exports the field.
inline ConvergenceRow run_solve(const RunConfig& cfg) {
  cfg.validate();
  const TestCase tc = case_for(cfg);
  const int n = cfg.n_list.front();
  const auto s = detail::solve_case(tc, n, cfg.params(), cfg);
  const ConvergenceRow row = detail::row_for(s, tc, cfg.kappa, cfg.seed);
  CsvSink sink(cfg.out);
  for (const auto& l : split_lines(csv_metadata(cfg, "solve"))) sink.line(l);
  sink.line(kConvergenceColumns);
  sink.line(csv_row(row));
  if (!cfg.vtk.empty()) export_field(s.report.solution, s.system.grid(), cfg.vtk);
  return row;
}

/// Solves for every N in the list and fits orders. Rows are written as they
/// complete; fitted orders follow as comment lines.
inline ConvergenceTable run_convergence(const RunConfig& cfg) {
  cfg.validate();
  const TestCase tc = case_for(cfg);
  std::vector<int> ns = cfg.n_list;
  std::sort(ns.begin(), ns.end());
  CsvSink sink(cfg.out);
  for (const auto& l : split_lines(csv_metadata(cfg, "convergence"))) sink.line(l);
  sink.line(kConvergenceColumns);
  ConvergenceTable table;
  for (int n : ns) {
    const auto s = detail::solve_case(tc, n, cfg.params(), cfg);
    table.rows.push_back(detail::row_for(s, tc, cfg.kappa, cfg.seed));
    sink.line(csv_row(table.rows.back()));
  }
  table.fit_orders();
  if (table.rows.size() >= 2) {
    sink.line("# order_fit l2=" + detail::fmt(table.orders.l2) +
              " linf=" + detail::fmt(table.orders.linf) + " h1=" + detail::fmt(table.orders.h1));
    const auto& last = table.pairwise.back();
    sink.line("# order_last_pair l2=" + detail::fmt(last.l2) + " linf=" + detail::fmt(last.linf) +
              " h1=" + detail::fmt(last.h1));
  }
  return table;
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  ConvergenceRow row;
};

/// Sweeps gamma or sigma over its list at every N (default {10, 20, 40, 80}).
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.gamma_list.empty() == cfg.sigma_list.empty())
    throw ConfigError("sweep needs exactly one of a gamma list or a sigma list");
  const bool over_gamma = !cfg.gamma_list.empty();
  const std::vector<double>& values = over_gamma ? cfg.gamma_list : cfg.sigma_list;
  const TestCase tc = case_for(cfg);
  CsvSink sink(cfg.out);
  for (const auto& l : split_lines(csv_metadata(cfg, "sweep"))) sink.line(l);
  sink.line(std::string("parameter,value,") + kConvergenceColumns);
  std::vector<SweepRow> rows;
  for (double v : values) {
    SchemeParams p = cfg.params();
    (over_gamma ? p.gamma : p.sigma) = v;
    p.validate();
    for (int n : cfg.n_list) {
      const auto s = detail::solve_case(tc, n, p, cfg);
      SweepRow r{over_gamma ? "gamma" : "sigma", v,
                 detail::row_for(s, tc, cfg.kappa, cfg.seed)};
      sink.line(r.parameter + "," + detail::fmt(v) + "," + csv_row(r.row));
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

struct ConditioningResult {
  std::vector<int> n;
  std::vector<double> hx;
  std::vector<double> kappa;
  /// Least-squares slope of log kappa against log hx.
  double slope = 0.0;
};

inline ConditioningResult run_conditioning(const RunConfig& cfg) {
  cfg.validate();
  const TestCase tc = case_for(cfg);
  std::vector<int> ns = cfg.n_list;
  std::sort(ns.begin(), ns.end());
  CsvSink sink(cfg.out);
  for (const auto& l : split_lines(csv_metadata(cfg, "conditioning"))) sink.line(l);
  sink.line("N,hx,h_plot,kappa,sigma_max,sigma_min,converged");
  ConditioningResult res;
  std::vector<std::pair<double, double>> pts;
  for (int n : ns) {
    const SparseSystem sys = assemble(tc, n, cfg.params());
    ConditionOptions opt;
    opt.seed = cfg.seed;
    const ConditionEstimate est = condition_estimate(sys.matrix, opt);
    const double h = sys.grid().spacing();
    res.n.push_back(n);
    res.hx.push_back(h);
    res.kappa.push_back(est.kappa);
    pts.emplace_back(h, est.kappa);
    sink.line(std::to_string(n) + "," + detail::fmt(h) + "," + detail::fmt(plotted_mesh_size(h)) +
              "," + detail::fmt(est.kappa) + "," + detail::fmt(est.sigma_max) + "," +
              detail::fmt(est.sigma_min) + "," + (est.converged ? "1" : "0"));
  }
  if (pts.size() >= 2) {
    res.slope = fit_order(pts);
    sink.line("# slope_log_kappa_vs_log_h=" + detail::fmt(res.slope));
  }
  return res;
}

inline constexpr const char* kMultigridColumns =
    "N0,N_obj,err_l2,err_linf,err_h1,iters_warm,iters_cold,t_coarse,t_interp,t_fine";

/// One coarse-to-fine run per coarse resolution in the N list.
inline std::vector<MultigridReport> run_multigrid(const RunConfig& cfg) {
  cfg.validate();
  const TestCase tc = case_for(cfg);
  CsvSink sink(cfg.out);
  for (const auto& l : split_lines(csv_metadata(cfg, "multigrid"))) sink.line(l);
  sink.line(kMultigridColumns);
  std::vector<MultigridReport> reports;
  for (int n0 : cfg.n_list) {
    MultigridPlan plan;
    plan.n0 = n0;
    plan.n_obj = cfg.n_obj;
    plan.tol = cfg.tol;
    plan.maxiter = cfg.maxiter;
    plan.params = cfg.params();
    plan.cold_baseline = cfg.cold_baseline;
    plan.spline_degree = cfg.spline_degree;
    MultigridReport rep = multigrid_solve(tc, plan);
    std::ostringstream s;
    s << n0 << ',' << cfg.n_obj << ',' << detail::fmt(rep.errors.l2) << ','
      << detail::fmt(rep.errors.linf) << ',' << detail::fmt(rep.errors.h1) << ','
      << rep.fine.iterations << ',' << (rep.cold ? std::to_string(rep.cold->iterations) : "")
      << ',' << detail::fmt(rep.t_coarse) << ',' << detail::fmt(rep.t_interp) << ','
      << detail::fmt(rep.t_fine);
    sink.line(s.str());
    reports.push_back(std::move(rep));
  }
  return reports;
}

} // namespace phifd
