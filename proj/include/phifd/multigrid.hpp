#pragma once

/// Coarse-to-fine warm start: direct solve on a coarse grid, quadratic spline
/// transfer to the fine grid, BiCGSTAB on the fine grid from that guess.

#include <chrono>
#include <optional>
#include <vector>

#include "phifd/analysis.hpp"
#include "phifd/assembly.hpp"
#include "phifd/bicgstab.hpp"
#include "phifd/direct.hpp"
#include "phifd/reduce.hpp"
#include "phifd/spline.hpp"

namespace phifd {

struct MultigridPlan {
  int n0 = 100;
  int n_obj = 400;
  double tol = 1e-4;
  int maxiter = 100000;
  SchemeParams params = default_params(Scheme::PhiFD);
  /// Also run BiCGSTAB on the fine grid from x0 = 0 for comparison.
  bool cold_baseline = false;
  /// Degree of the transfer spline (1 or 2).
  int spline_degree = 2;

  void validate() const {
    if (spline_degree != 1 && spline_degree != 2)
      throw ConfigError("multigrid: spline degree must be 1 or 2");
    if (n0 < 1 + spline_degree)
      throw ConfigError("multigrid: coarse resolution too small for the spline degree");
    if (n_obj <= n0) throw ConfigError("multigrid: fine resolution must exceed coarse");
    if (!(tol > 0.0)) throw ConfigError("multigrid: tol must be positive");
    if (params.scheme == Scheme::ShortleyWeller)
      throw ConfigError("multigrid: penalised schemes only");
    params.validate();
  }
};

struct MultigridReport {
  /// Final fine-grid solve (warm start).
  SolveReport fine;
  ErrorTriple errors;
  /// Errors of the interpolated initial guess on the fine grid.
  ErrorTriple initial_errors;
  std::optional<SolveReport> cold;
  std::optional<ErrorTriple> cold_errors;
  double t_coarse = 0.0;
  double t_interp = 0.0;
  double t_fine = 0.0;
  double t_total() const { return t_coarse + t_interp + t_fine; }
};

/// Runs the three steps. Timings cover only the solves and the interpolation;
/// assembly on either grid is excluded.
inline MultigridReport multigrid_solve(const TestCase& tc, const MultigridPlan& plan) {
  plan.validate();
  using clock = std::chrono::steady_clock;
  MultigridReport rep;

  const SparseSystem coarse = assemble(tc, plan.n0, plan.params);
  const SparseSystem fine = assemble(tc, plan.n_obj, plan.params);
  const ReducedSystem fine_red = reduce_identity_rows(fine.matrix, fine.rhs);

  auto t0 = clock::now();
  const SolveReport u0 = direct_solve(coarse.matrix, coarse.rhs);
  rep.t_coarse = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  const std::vector<double> u1 = spline_interpolate(u0.solution, coarse.grid(), fine.grid(), plan.spline_degree);
  rep.t_interp = std::chrono::duration<double>(clock::now() - t0).count();

  const std::vector<double> exact = fine.grid().sample(tc.exact_u);
  rep.initial_errors = relative_errors(u1, exact, fine.classification);

  const BicgstabOptions opt{plan.tol, plan.maxiter};
  t0 = clock::now();
  SolveReport warm = bicgstab(fine_red.matrix, fine_red.rhs, fine_red.restrict_field(u1), opt);
  rep.t_fine = std::chrono::duration<double>(clock::now() - t0).count();
  warm.solution = fine_red.prolong_field(warm.solution);
  warm.relative_residual = relative_residual(fine.matrix, warm.solution, fine.rhs);
  rep.errors = relative_errors(warm.solution, exact, fine.classification);
  rep.fine = std::move(warm);

  if (plan.cold_baseline) {
    const std::vector<double> zero(fine_red.active.size(), 0.0);
    SolveReport cold = bicgstab(fine_red.matrix, fine_red.rhs, zero, opt);
    cold.solution = fine_red.prolong_field(cold.solution);
    cold.relative_residual = relative_residual(fine.matrix, cold.solution, fine.rhs);
    rep.cold_errors = relative_errors(cold.solution, exact, fine.classification);
    rep.cold = std::move(cold);
  }
  return rep;
}

} // namespace phifd
