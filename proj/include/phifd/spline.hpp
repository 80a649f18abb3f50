#pragma once

/// Tensor-product spline interpolation (degree 1 or 2) between uniform node grids.
///
/// Along each axis the spline interpolates the m node values exactly. Its
/// knot vector is clamped (p+1 fold knots at both ends). Interior knots sit
/// at the nodes x_1 .. x_{m-2} for p = 1 and at the cell midpoints
/// (x_i + x_{i+1}) / 2, i = 1 .. m-3, for p = 2, which gives exactly m basis
/// functions. Polynomials of degree p are reproduced exactly.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phifd/errors.hpp"
#include "phifd/geometry.hpp"

namespace phifd {

/// One-dimensional interpolating spline of degree 1 or 2 on uniform nodes.
class NodalSpline1D {
public:
  /// Nodes x_i = origin + i * spacing, i = 0 .. m-1, m >= 2p.
  NodalSpline1D(double origin, double spacing, std::size_t m, int degree = 2)
      : origin_(origin), spacing_(spacing), m_(m), p_(static_cast<std::size_t>(degree)) {
    if (degree != 1 && degree != 2) throw ConfigError("spline degree must be 1 or 2");
    if (m < 2 * p_)
      throw ConfigError("degree " + std::to_string(degree) + " spline needs at least " +
                        std::to_string(2 * p_) + " nodes");
    knots_.reserve(m + p_ + 1);
    for (std::size_t r = 0; r <= p_; ++r) knots_.push_back(node(0));
    if (p_ == 1) {
      for (std::size_t i = 1; i + 1 < m; ++i) knots_.push_back(node(i));
    } else {
      for (std::size_t i = 1; i + 2 < m; ++i) knots_.push_back(origin + (i + 0.5) * spacing);
    }
    for (std::size_t r = 0; r <= p_; ++r) knots_.push_back(node(m - 1));
    factorise();
  }

  std::size_t size() const { return m_; }
  int degree() const { return static_cast<int>(p_); }
  const std::vector<double>& knots() const { return knots_; }

  /// Index of the first of the p+1 basis functions that are non-zero at x,
  /// and their values. Unused trailing entries are zero.
  std::size_t basis(double x, std::array<double, 3>& values) const {
    // span mu with t_mu <= x < t_{mu+1}, restricted to p .. m-1
    std::size_t mu = p_;
    if (x >= knots_[m_]) {
      mu = m_ - 1;
    } else if (x > knots_[p_]) {
      const auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p_) + 1,
                                       knots_.begin() + static_cast<std::ptrdiff_t>(m_) + 1, x);
      mu = static_cast<std::size_t>(it - knots_.begin()) - 1;
    }
    // Cox-de Boor
    const double* t = knots_.data();
    double left[3], right[3];
    values = {1.0, 0.0, 0.0};
    for (std::size_t j = 1; j <= p_; ++j) {
      left[j] = x - t[mu + 1 - j];
      right[j] = t[mu + j] - x;
      double saved = 0.0;
      for (std::size_t r = 0; r < j; ++r) {
        const double denom = right[r + 1] + left[j - r];
        const double temp = denom != 0.0 ? values[r] / denom : 0.0;
        values[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      values[j] = saved;
    }
    return mu - p_;
  }

  /// Replaces node values (stride apart in data) by spline coefficients.
  void solve_coefficients(double* data, std::size_t stride) const {
    // tridiagonal: row i couples coefficients i-1, i, i+1
    std::vector<double> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = data[i * stride];
    for (std::size_t i = 1; i < m_; ++i) y[i] -= lower_[i] * y[i - 1];
    y[m_ - 1] /= diag_[m_ - 1];
    for (std::size_t i = m_ - 1; i-- > 0;) y[i] = (y[i] - upper_[i] * y[i + 1]) / diag_[i];
    for (std::size_t i = 0; i < m_; ++i) data[i * stride] = y[i];
  }

  double node(std::size_t i) const { return origin_ + static_cast<double>(i) * spacing_; }

private:
  void factorise() {
    // collocation rows, then Thomas elimination without pivoting
    std::vector<double> sub(m_, 0.0), dia(m_, 0.0), sup(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      std::array<double, 3> v{};
      const std::size_t first = basis(node(i), v);
      for (std::size_t r = 0; r < 3; ++r) {
        const std::size_t col = first + r;
        if (r > p_ || v[r] == 0.0) continue;
        if (col + 1 == i) sub[i] = v[r];
        else if (col == i) dia[i] = v[r];
        else if (col == i + 1) sup[i] = v[r];
        else throw ConfigError("quadratic spline collocation is not tridiagonal");
      }
    }
    lower_.assign(m_, 0.0);
    diag_ = dia;
    upper_ = sup;
    for (std::size_t i = 1; i < m_; ++i) {
      lower_[i] = sub[i] / diag_[i - 1];
      diag_[i] -= lower_[i] * upper_[i - 1];
    }
  }

  double origin_;
  double spacing_;
  std::size_t m_;
  std::size_t p_;
  std::vector<double> knots_;
  std::vector<double> lower_, diag_, upper_;
};

/// Interpolates a node field from one grid onto another covering the same box.
inline std::vector<double> spline_interpolate(std::span<const double> coarse,
                                              const CartesianGrid& coarse_grid,
                                              const CartesianGrid& fine_grid, int degree = 2) {
  const int dim = coarse_grid.dim();
  if (fine_grid.dim() != dim) throw ConfigError("spline_interpolate: dimension mismatch");
  if (coarse.size() != coarse_grid.node_count())
    throw ConfigError("spline_interpolate: field does not match coarse grid");
  if (degree == 2 && coarse_grid.intervals() < 3)
    throw ConfigError("spline_interpolate: coarse grid needs N >= 3 for degree 2");

  const std::size_t mc = static_cast<std::size_t>(coarse_grid.nodes_per_axis());
  const std::size_t mf = static_cast<std::size_t>(fine_grid.nodes_per_axis());
  std::vector<NodalSpline1D> splines;
  for (int d = 0; d < dim; ++d)
    splines.emplace_back(coarse_grid.origin()[d], coarse_grid.spacing(), mc, degree);

  // coefficients: solve along every axis in turn
  std::vector<double> coef(coarse.begin(), coarse.end());
  std::size_t stride = 1;
  for (int d = 0; d < dim; ++d) {
    const std::size_t block = stride * mc;
    for (std::size_t outer = 0; outer < coef.size(); outer += block)
      for (std::size_t inner = 0; inner < stride; ++inner)
        splines[d].solve_coefficients(coef.data() + outer + inner, stride);
    stride *= mc;
  }

  // evaluation: contract one axis at a time, coarse extent -> fine extent
  std::array<std::size_t, 3> extent{1, 1, 1};
  for (int d = 0; d < dim; ++d) extent[d] = mc;
  std::vector<double> cur = std::move(coef);
  for (int d = 0; d < dim; ++d) {
    std::vector<std::size_t> first(mf);
    std::vector<std::array<double, 3>> weights(mf);
    for (std::size_t i = 0; i < mf; ++i)
      first[i] = splines[d].basis(fine_grid.coordinate(d, static_cast<int>(i)), weights[i]);

    std::size_t before = 1, after = 1;
    for (int e = 0; e < d; ++e) before *= extent[e];
    for (int e = d + 1; e < dim; ++e) after *= extent[e];
    std::vector<double> next(before * mf * after);
    for (std::size_t o = 0; o < after; ++o)
      for (std::size_t i = 0; i < mf; ++i) {
        double* dst = next.data() + (o * mf + i) * before;
        const auto& w = weights[i];
        const double* src = cur.data() + (o * mc + first[i]) * before;
        for (std::size_t b = 0; b < before; ++b)
          dst[b] = degree == 1 ? w[0] * src[b] + w[1] * src[b + before]
                               : w[0] * src[b] + w[1] * src[b + before] + w[2] * src[b + 2 * before];
      }
    cur = std::move(next);
    extent[d] = mf;
  }
  return cur;
}

} // namespace phifd
