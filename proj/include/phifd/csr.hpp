#pragma once

/// Compressed-row sparse matrices, triplet assembly and MatrixMarket I/O.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phifd/errors.hpp"

namespace phifd {

using Index = std::int32_t;

/// Square or rectangular matrix in compressed-row form.
/// Columns are sorted and unique within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Index> row_offsets{0};
  std::vector<Index> column_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const {
    const auto first = column_indices.begin() + row_offsets[i];
    const auto last = column_indices.begin() + row_offsets[i + 1];
    const auto it = std::lower_bound(first, last, static_cast<Index>(j));
    if (it == last || *it != static_cast<Index>(j)) return 0.0;
    return values[static_cast<std::size_t>(it - column_indices.begin())];
  }

  static CsrMatrix identity(std::size_t n) {
    CsrMatrix m;
    m.rows = m.cols = n;
    m.row_offsets.resize(n + 1);
    m.column_indices.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i <= n; ++i) m.row_offsets[i] = static_cast<Index>(i);
    for (std::size_t i = 0; i < n; ++i) m.column_indices[i] = static_cast<Index>(i);
    return m;
  }
};

/// Coordinate-list accumulator. Duplicate entries are summed when compressed,
/// in insertion order, so the result does not depend on anything but the
/// sequence of add() calls.
class TripletBuilder {
public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows > static_cast<std::size_t>(std::numeric_limits<Index>::max()) ||
        cols > static_cast<std::size_t>(std::numeric_limits<Index>::max()))
      throw ConfigError("matrix dimension exceeds 32-bit index range");
  }

  void reserve(std::size_t n) { entries_.reserve(n); }

  void add(std::size_t i, std::size_t j, double v) {
    entries_.push_back({static_cast<Index>(i), static_cast<Index>(j), v});
  }

  std::size_t size() const { return entries_.size(); }

  CsrMatrix build() const {
    CsrMatrix m;
    m.rows = rows_;
    m.cols = cols_;
    std::vector<Index> count(rows_ + 1, 0);
    for (const auto& e : entries_) ++count[static_cast<std::size_t>(e.row) + 1];
    for (std::size_t i = 0; i < rows_; ++i) count[i + 1] += count[i];
    // bucket by row, stable
    std::vector<Entry> sorted(entries_.size());
    {
      std::vector<Index> cursor(count.begin(), count.end() - 1);
      for (const auto& e : entries_) sorted[static_cast<std::size_t>(cursor[e.row]++)] = e;
    }
    m.row_offsets.assign(rows_ + 1, 0);
    m.column_indices.reserve(entries_.size());
    m.values.reserve(entries_.size());
    for (std::size_t i = 0; i < rows_; ++i) {
      auto first = sorted.begin() + count[i];
      auto last = sorted.begin() + count[i + 1];
      std::stable_sort(first, last, [](const Entry& a, const Entry& b) { return a.col < b.col; });
      for (auto it = first; it != last;) {
        const Index col = it->col;
        double sum = 0.0;
        for (; it != last && it->col == col; ++it) sum += it->value;
        m.column_indices.push_back(col);
        m.values.push_back(sum);
      }
      m.row_offsets[i + 1] = static_cast<Index>(m.values.size());
    }
    return m;
  }

private:
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// y = A x.
inline void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols || y.size() != a.rows)
    throw ConfigError("spmv: dimension mismatch");
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      s += a.values[static_cast<std::size_t>(p)] *
           x[static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)])];
    y[i] = s;
  }
}

inline std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows);
  spmv(a, x, y);
  return y;
}

/// y = A^T x.
inline void spmv_transpose(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.rows || y.size() != a.cols)
    throw ConfigError("spmv_transpose: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      y[static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)])] +=
          a.values[static_cast<std::size_t>(p)] * xi;
  }
}

inline CsrMatrix transpose(const CsrMatrix& a) {
  TripletBuilder b(a.cols, a.rows);
  b.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows; ++i)
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      b.add(static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]), i,
            a.values[static_cast<std::size_t>(p)]);
  return b.build();
}

/// A + B with identical shapes.
inline CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double scale_b = 1.0) {
  if (a.rows != b.rows || a.cols != b.cols) throw ConfigError("add: dimension mismatch");
  TripletBuilder t(a.rows, a.cols);
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      t.add(i, static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]),
            a.values[static_cast<std::size_t>(p)]);
    for (Index p = b.row_offsets[i]; p < b.row_offsets[i + 1]; ++p)
      t.add(i, static_cast<std::size_t>(b.column_indices[static_cast<std::size_t>(p)]),
            scale_b * b.values[static_cast<std::size_t>(p)]);
  }
  return t.build();
}

inline CsrMatrix scaled(CsrMatrix a, double c) {
  for (auto& v : a.values) v *= c;
  return a;
}

/// Max absolute row sum.
inline double norm_inf(const CsrMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
      s += std::abs(a.values[static_cast<std::size_t>(p)]);
    best = std::max(best, s);
  }
  return best;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// ||b - A x||_2 / ||b||_2 (absolute residual when b = 0).
inline double relative_residual(const CsrMatrix& a, std::span<const double> x,
                                std::span<const double> b) {
  std::vector<double> r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double bn = norm2(b);
  const double rn = norm2(r);
  return bn > 0.0 ? rn / bn : rn;
}

/// Writes a MatrixMarket "coordinate real general" file with 1-based indices.
inline void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.rows; ++i)
    for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", a.values[static_cast<std::size_t>(p)]);
      out << (i + 1) << ' ' << (a.column_indices[static_cast<std::size_t>(p)] + 1) << ' '
          << buf << '\n';
    }
}

inline CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
    throw std::runtime_error(path + ": unsupported MatrixMarket header");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream head(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(head >> rows >> cols >> nnz)) throw std::runtime_error(path + ": bad size line");
  TripletBuilder b(rows, cols);
  b.reserve(symmetric ? 2 * nnz : nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error(path + ": truncated entries");
    b.add(i - 1, j - 1, v);
    if (symmetric && i != j) b.add(j - 1, i - 1, v);
  }
  return b.build();
}

} // namespace phifd
