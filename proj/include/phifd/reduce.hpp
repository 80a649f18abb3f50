#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phifd/csr.hpp"

namespace phifd {

/// The principal sub-system on rows that are not decoupled identity rows.
/// A decoupled row i has A(i, :) = e_i and A(:, i) = e_i, so x_i = b_i and the
/// remaining unknowns solve the restricted system exactly.
struct ReducedSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  /// active[r] = full-grid index of reduced row r.
  std::vector<std::size_t> active;
  std::vector<double> full_rhs;

  std::vector<double> restrict_field(std::span<const double> full) const {
    std::vector<double> r(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) r[i] = full[active[i]];
    return r;
  }

  std::vector<double> prolong_field(std::span<const double> reduced) const {
    std::vector<double> full = full_rhs;
    for (std::size_t i = 0; i < active.size(); ++i) full[active[i]] = reduced[i];
    return full;
  }
};

inline ReducedSystem reduce_identity_rows(const CsrMatrix& a, std::span<const double> b) {
  const std::size_t n = a.rows;
  std::vector<std::uint8_t> coupled_col(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]);
      if (j != i) coupled_col[j] = 1;
    }
  std::vector<std::int64_t> map(n, -1);
  ReducedSystem red;
  red.full_rhs.assign(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Index len = a.row_offsets[i + 1] - a.row_offsets[i];
    const bool unit_row = len == 1 &&
                          a.column_indices[static_cast<std::size_t>(a.row_offsets[i])] ==
                              static_cast<Index>(i) &&
                          a.values[static_cast<std::size_t>(a.row_offsets[i])] == 1.0;
    if (unit_row && !coupled_col[i]) continue;
    map[i] = static_cast<std::int64_t>(red.active.size());
    red.active.push_back(i);
  }
  const std::size_t m = red.active.size();
  red.matrix.rows = red.matrix.cols = m;
  red.matrix.row_offsets.assign(m + 1, 0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = red.active[r];
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]);
      // columns of reduced-away nodes are empty off the diagonal
      red.matrix.column_indices.push_back(static_cast<Index>(map[j]));
      red.matrix.values.push_back(a.values[static_cast<std::size_t>(p)]);
    }
    red.matrix.row_offsets[r + 1] = static_cast<Index>(red.matrix.values.size());
  }
  red.rhs = red.restrict_field(b);
  return red;
}

} // namespace phifd
