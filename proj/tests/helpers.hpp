#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "phifd/assembly.hpp"

namespace testing_helpers {

using namespace phifd;

/// Rectangle |x - 0.5| < 0.25, |y - 0.5| < 0.45. Edges fall between nodes of
/// the N = 10 grid. u = cos(2 pi (x - 0.5)) vanishes on the two long sides only;
/// the tests use the rows, not the solution.
inline TestCase strip_case() {
  TestCase tc;
  tc.name = "strip";
  tc.dim = 2;
  tc.levelset.dim = 2;
  tc.levelset.eval = [](const Point& p) {
    return std::max(std::abs(p[0] - 0.5) - 0.25, std::abs(p[1] - 0.5) - 0.45);
  };
  tc.exact_u = [](const Point& p) { return std::cos(2.0 * M_PI * (p[0] - 0.5)); };
  tc.source_f = [](const Point& p) {
    return 4.0 * M_PI * M_PI * std::cos(2.0 * M_PI * (p[0] - 0.5));
  };
  tc.dirichlet_g = [](const Point&) { return 0.0; };
  return tc;
}

/// Classification skeleton on a unit 2D grid with every node exterior.
inline Classification blank_classification(int n) {
  Classification c;
  c.grid = make_unit_grid(2, n);
  const auto m = c.grid.node_count();
  c.phi.assign(m, 1.0);
  c.inside.assign(m, 0);
  c.in_omega_h.assign(m, 0);
  c.exterior.assign(m, 1);
  return c;
}

inline std::vector<double> random_on(const std::vector<std::uint8_t>& mask, std::mt19937_64& rng,
                                     bool complement = false) {
  std::normal_distribution<double> dist;
  std::vector<double> v(mask.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k)
    if ((mask[k] != 0) != complement) v[k] = dist(rng);
  return v;
}

inline double quad_form(const CsrMatrix& a, const std::vector<double>& v) {
  return dot(v, spmv(a, v));
}

inline bool is_symmetric(const CsrMatrix& a, double tol) {
  for (std::size_t i = 0; i < a.rows; ++i)
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]);
      const double v = a.values[static_cast<std::size_t>(p)];
      if (std::abs(v - a.at(j, i)) > tol * (1.0 + std::abs(v))) return false;
    }
  return true;
}

} // namespace testing_helpers
