#pragma once

/// 2-norm condition number kappa(A) = sigma_max / sigma_min.

#include <cmath>
#include <random>
#include <vector>

#include "phifd/csr.hpp"
#include "phifd/direct.hpp"

namespace phifd {

struct ConditionOptions {
  double tol = 1e-6;
  int maxiter = 10000;
  std::uint64_t seed = 20240611;
};

struct ConditionEstimate {
  double kappa = 0.0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  int iterations_max = 0;
  int iterations_min = 0;
  /// False when either iteration hit maxiter; kappa is then the last estimate.
  bool converged = true;
};

namespace detail {

inline std::vector<double> seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  const double nv = norm2(v);
  for (auto& x : v) x /= nv;
  return v;
}

/// Power iteration on a symmetric positive operator; returns the dominant
/// eigenvalue estimate (Rayleigh quotient with a unit iterate).
template <class Apply>
double power_iteration(std::size_t n, Apply&& apply, const ConditionOptions& opt, int& iters,
                       bool& converged) {
  std::vector<double> v = seeded_unit_vector(n, opt.seed);
  std::vector<double> w(n);
  double lambda = 0.0;
  converged = false;
  for (iters = 1; iters <= opt.maxiter; ++iters) {
    apply(v, w);
    const double next = dot(v, w);
    const double wn = norm2(w);
    if (wn == 0.0) {
      lambda = 0.0;
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (iters > 1 && std::abs(next - lambda) <= opt.tol * std::abs(next)) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (iters > opt.maxiter) iters = opt.maxiter;
  return lambda;
}

} // namespace detail

/// sigma_max from power iteration on A^T A; sigma_min from inverse iteration
/// on A^T A using one LU factorisation of A.
inline ConditionEstimate condition_estimate(const CsrMatrix& a, const ConditionOptions& opt = {}) {
  if (a.rows != a.cols) throw ConfigError("condition_estimate: matrix must be square");
  const std::size_t n = a.rows;
  ConditionEstimate est;
  std::vector<double> tmp(n);

  bool conv_max = false;
  const double lmax = detail::power_iteration(
      n,
      [&](const std::vector<double>& x, std::vector<double>& y) {
        spmv(a, x, tmp);
        spmv_transpose(a, tmp, y);
      },
      opt, est.iterations_max, conv_max);

  const LuFactorization lu(a);
  bool conv_min = false;
  const double linv = detail::power_iteration(
      n,
      [&](const std::vector<double>& x, std::vector<double>& y) {
        // (A^T A)^{-1} x = A^{-1} A^{-T} x
        const std::vector<double> z = lu.solve_transpose(x);
        y = lu.solve(z);
      },
      opt, est.iterations_min, conv_min);

  est.sigma_max = std::sqrt(lmax);
  est.sigma_min = 1.0 / std::sqrt(linv);
  est.kappa = est.sigma_max / est.sigma_min;
  est.converged = conv_max && conv_min;
  return est;
}

} // namespace phifd
