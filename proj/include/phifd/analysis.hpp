#pragma once

/// Discrete norms over the inside nodes, relative errors and convergence orders.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "phifd/classify.hpp"
#include "phifd/errors.hpp"
#include "phifd/geometry.hpp"

namespace phifd {

struct NormTriple {
  double l2 = 0.0;
  double linf = 0.0;
  /// H1 semi-norm.
  double h1 = 0.0;
};

/// Relative errors ||U - u_h|| / ||U|| in each norm.
using ErrorTriple = NormTriple;

/// Norms over Omega_h^int (the inside nodes):
///   l2   = (h^n sum v^2)^(1/2)
///   linf = max |v|
///   h1   = (sum over axis edges with both ends inside of h^n ((v_b - v_a)/h)^2)^(1/2)
inline NormTriple discrete_norms(std::span<const double> v, const Classification& c) {
  const CartesianGrid& g = c.grid;
  if (v.size() != g.node_count()) throw ConfigError("discrete_norms: field size mismatch");
  const double h = g.spacing();
  const double cell = std::pow(h, g.dim());
  double sum2 = 0.0, vmax = 0.0, grad2 = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!c.inside[k]) continue;
    any = true;
    sum2 += v[k] * v[k];
    vmax = std::max(vmax, std::abs(v[k]));
    const MultiIndex a = g.multi_index(k);
    for (int d = 0; d < g.dim(); ++d) {
      if (a[d] == g.intervals()) continue;
      const std::size_t nb = k + g.stride(d);
      if (c.inside[nb]) {
        const double q = (v[nb] - v[k]) / h;
        grad2 += q * q;
      }
    }
  }
  if (!any) throw EmptyDomainError("discrete_norms: no inside node");
  return {std::sqrt(cell * sum2), vmax, std::sqrt(cell * grad2)};
}

inline ErrorTriple relative_errors(std::span<const double> numeric, std::span<const double> exact,
                                   const Classification& c) {
  if (numeric.size() != exact.size()) throw ConfigError("relative_errors: size mismatch");
  std::vector<double> diff(numeric.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = exact[k] - numeric[k];
  const NormTriple ref = discrete_norms(exact, c);
  const NormTriple err = discrete_norms(diff, c);
  if (ref.l2 == 0.0 || ref.linf == 0.0 || ref.h1 == 0.0)
    throw ConfigError("relative_errors: exact solution has zero norm");
  return {err.l2 / ref.l2, err.linf / ref.linf, err.h1 / ref.h1};
}

/// Errors of a node field against the case's exact solution.
inline ErrorTriple relative_errors(std::span<const double> numeric, const TestCase& tc,
                                   const Classification& c) {
  const std::vector<double> exact = c.grid.sample(tc.exact_u);
  return relative_errors(numeric, exact, c);
}

/// Least-squares slope of log(err) against log(h).
inline double fit_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("fit_order needs at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, e] : points) {
    if (!(h > 0.0) || !(e > 0.0)) throw ConfigError("fit_order: values must be positive");
    sx += std::log(h);
    sy += std::log(e);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : points) {
    const double dx = std::log(h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_order: mesh sizes must differ");
  return sxy / sxx;
}

inline double fit_order(const std::vector<std::pair<double, double>>& points) {
  return fit_order(std::span<const std::pair<double, double>>(points));
}

/// Plotted mesh size: sqrt(2) h in every dimension.
inline double plotted_mesh_size(double spacing) { return std::sqrt(2.0) * spacing; }

struct ConvergenceRow {
  int n = 0;
  double hx = 0.0;
  double h_plot = 0.0;
  ErrorTriple errors;
  std::optional<double> kappa;
  int iterations = 0;
  double t_assemble = 0.0;
  double t_solve = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Global least-squares orders (l2, linf, h1); set by fit_orders().
  ErrorTriple orders;
  /// Pairwise orders between consecutive rows; entry i compares rows i-1 and i.
  std::vector<ErrorTriple> pairwise;

  void sort_rows() {
    std::sort(rows.begin(), rows.end(),
              [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.n < b.n; });
  }

  void fit_orders() {
    sort_rows();
    pairwise.assign(rows.size(), ErrorTriple{});
    if (rows.size() < 2) return;
    auto series = [&](auto pick) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : rows) pts.emplace_back(r.h_plot, pick(r.errors));
      return pts;
    };
    auto safe_fit = [](const std::vector<std::pair<double, double>>& pts) {
      for (const auto& p : pts)
        if (!(p.second > 0.0)) return std::nan("");
      return fit_order(pts);
    };
    orders.l2 = safe_fit(series([](const ErrorTriple& e) { return e.l2; }));
    orders.linf = safe_fit(series([](const ErrorTriple& e) { return e.linf; }));
    orders.h1 = safe_fit(series([](const ErrorTriple& e) { return e.h1; }));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& a = rows[i - 1];
      const auto& b = rows[i];
      auto pair_order = [&](double ea, double eb) {
        if (!(ea > 0.0) || !(eb > 0.0)) return std::nan("");
        return std::log(eb / ea) / std::log(b.h_plot / a.h_plot);
      };
      pairwise[i] = {pair_order(a.errors.l2, b.errors.l2),
                     pair_order(a.errors.linf, b.errors.linf),
                     pair_order(a.errors.h1, b.errors.h1)};
    }
  }
};

} // namespace phifd
