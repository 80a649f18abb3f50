#pragma once

/// Unpreconditioned BiCGSTAB.

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "phifd/csr.hpp"
#include "phifd/errors.hpp"
#include "phifd/solve_report.hpp"

namespace phifd {

struct BicgstabOptions {
  double tol = 1e-4;
  int maxiter = 10000;
};

namespace detail {

enum class BicgstabExit { Converged, MaxIter, Breakdown };

/// Runs the recurrence from x in place; stops on ||r|| <= threshold.
inline BicgstabExit bicgstab_sweep(const CsrMatrix& a, std::span<const double> b,
                                   std::vector<double>& x, double threshold, int maxiter,
                                   int& iterations) {
  const std::size_t n = b.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> r = spmv(a, x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const std::vector<double> rtilde = r;
  const double rtilde_norm = norm2(rtilde);
  std::vector<double> p(n), v(n), s(n), t(n);
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  bool first = true;

  while (true) {
    const double rnorm = norm2(r);
    if (rnorm <= threshold) return BicgstabExit::Converged;
    if (iterations >= maxiter) return BicgstabExit::MaxIter;

    const double rho = dot(rtilde, r);
    if (std::abs(rho) <= eps * eps * rtilde_norm * rnorm) return BicgstabExit::Breakdown;
    if (first) {
      p = r;
      first = false;
    } else {
      if (std::abs(omega) <= eps * eps) return BicgstabExit::Breakdown;
      const double beta = (rho / rho_prev) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    spmv(a, p, v);
    const double rv = dot(rtilde, v);
    if (rv == 0.0) return BicgstabExit::Breakdown;
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++iterations;
    if (norm2(s) <= threshold) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      return BicgstabExit::Converged;
    }
    spmv(a, s, t);
    const double tt = dot(t, t);
    if (tt == 0.0) return BicgstabExit::Breakdown;
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    rho_prev = rho;
  }
}

} // namespace detail

/// Solves A x = b from x0. Stops when the recurrence residual satisfies
/// ||r||_2 <= tol ||b||_2 or after maxiter iterations (reported as not
/// converged). A breakdown restarts once from the current iterate; a second
/// breakdown throws BreakdownError.
inline SolveReport bicgstab(const CsrMatrix& a, std::span<const double> b,
                            std::span<const double> x0, const BicgstabOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw ConfigError("bicgstab: tol must be positive");
  if (a.rows != a.cols || b.size() != a.rows || x0.size() != a.rows)
    throw ConfigError("bicgstab: dimension mismatch");
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.method = SolveMethod::Bicgstab;
  rep.solution.assign(x0.begin(), x0.end());
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.solution.assign(b.size(), 0.0);
  } else {
    const double threshold = opt.tol * bnorm;
    int iterations = 0;
    auto exit = detail::bicgstab_sweep(a, b, rep.solution, threshold, opt.maxiter, iterations);
    if (exit == detail::BicgstabExit::Breakdown) {
      rep.restarts = 1;
      exit = detail::bicgstab_sweep(a, b, rep.solution, threshold, opt.maxiter, iterations);
      if (exit == detail::BicgstabExit::Breakdown)
        throw BreakdownError("bicgstab broke down twice after " + std::to_string(iterations) +
                             " iterations");
    }
    rep.iterations = iterations;
    rep.converged = exit == detail::BicgstabExit::Converged;
  }
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.relative_residual = relative_residual(a, rep.solution, b);
  return rep;
}

} // namespace phifd
