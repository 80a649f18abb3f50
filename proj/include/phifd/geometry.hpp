#pragma once

/// Level-set geometry, manufactured test cases and the Cartesian node grid.
///
/// A domain is the strict negative set of a level-set function,
/// Omega = { phi < 0 }. Grids are uniform with the same spacing on every axis
/// and nodes are flattened row-major with x fastest:
/// flat = i + (N+1) * j + (N+1)^2 * k.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phifd/errors.hpp"

namespace phifd {

/// Point in up to three dimensions; unused trailing coordinates are zero.
using Point = std::array<double, 3>;

using ScalarField = std::function<double(const Point&)>;

struct LevelSet {
  int dim = 2;
  ScalarField eval;
  /// Optional analytic gradient (unused by the schemes, kept for diagnostics).
  std::function<Point(const Point&)> gradient;

  double operator()(const Point& p) const { return eval(p); }
  bool inside(const Point& p) const { return eval(p) < 0.0; }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

using MultiIndex = std::array<int, 3>;

class CartesianGrid {
public:
  CartesianGrid() = default;
  CartesianGrid(int dim, int intervals, Point origin, double length)
      : dim_(dim), n_(intervals), origin_(origin), length_(length),
        h_(length / intervals) {
    stride_[0] = 1;
    stride_[1] = static_cast<std::size_t>(n_ + 1);
    stride_[2] = stride_[1] * stride_[1];
    count_ = 1;
    for (int d = 0; d < dim_; ++d) count_ *= static_cast<std::size_t>(n_ + 1);
  }

  int dim() const { return dim_; }
  /// Number of intervals per axis.
  int intervals() const { return n_; }
  int nodes_per_axis() const { return n_ + 1; }
  double spacing() const { return h_; }
  double length() const { return length_; }
  const Point& origin() const { return origin_; }
  std::size_t node_count() const { return count_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t index(const MultiIndex& a) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) flat += static_cast<std::size_t>(a[d]) * stride_[d];
    return flat;
  }

  MultiIndex multi_index(std::size_t flat) const {
    MultiIndex a{0, 0, 0};
    const auto m = static_cast<std::size_t>(n_ + 1);
    for (int d = 0; d < dim_; ++d) {
      a[d] = static_cast<int>(flat % m);
      flat /= m;
    }
    return a;
  }

  double coordinate(int axis, int i) const { return origin_[axis] + i * h_; }

  Point point(const MultiIndex& a) const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) p[d] = coordinate(d, a[d]);
    return p;
  }

  Point point(std::size_t flat) const { return point(multi_index(flat)); }

  /// True when the node lies on a face of the bounding box.
  bool on_box_boundary(const MultiIndex& a) const {
    for (int d = 0; d < dim_; ++d)
      if (a[d] == 0 || a[d] == n_) return true;
    return false;
  }

  /// Samples a function at every node.
  std::vector<double> sample(const ScalarField& f) const {
    std::vector<double> out(count_);
    for (std::size_t k = 0; k < count_; ++k) out[k] = f(point(k));
    return out;
  }

private:
  int dim_ = 2;
  int n_ = 2;
  Point origin_{0.0, 0.0, 0.0};
  double length_ = 1.0;
  double h_ = 0.5;
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t count_ = 0;
};

/// Builds the uniform grid covering a hypercube box with N intervals per axis.
inline CartesianGrid make_grid(std::span<const Interval> box, int intervals) {
  if (box.size() != 2 && box.size() != 3)
    throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(box.size()));
  if (intervals < 2)
    throw ConfigError("grid needs at least 2 intervals per axis, got " +
                      std::to_string(intervals));
  const double length = box[0].length();
  if (!(length > 0.0)) throw ConfigError("box axis 0 has non-positive length");
  Point origin{0.0, 0.0, 0.0};
  for (std::size_t d = 0; d < box.size(); ++d) {
    if (std::abs(box[d].length() - length) > 1e-12 * std::abs(length))
      throw ConfigError("all box axes must have the same length (axis " +
                        std::to_string(d) + " differs)");
    origin[d] = box[d].lo;
  }
  return CartesianGrid(static_cast<int>(box.size()), intervals, origin, length);
}

inline CartesianGrid make_unit_grid(int dim, int intervals) {
  const std::array<Interval, 3> box{Interval{0.0, 1.0}, Interval{0.0, 1.0},
                                    Interval{0.0, 1.0}};
  return make_grid(std::span<const Interval>(box.data(), static_cast<std::size_t>(dim)),
                   intervals);
}

/// Manufactured problem: -Laplace(u) = f in Omega, u = g on the boundary.
struct TestCase {
  std::string name;
  int dim = 2;
  LevelSet levelset;
  ScalarField exact_u;
  ScalarField source_f;
  ScalarField dirichlet_g;
  /// Box the case is posed in (same interval on every axis).
  Interval box{0.0, 1.0};
  bool homogeneous = true;
};

namespace detail {

/// Radial cosine bump cos(K r) on a ball; vanishes on the sphere of radius R.
inline TestCase radial_cosine_case(std::string name, int dim, double radius) {
  const Point center{0.5, 0.5, dim == 3 ? 0.5 : 0.0};
  const double wave = std::numbers::pi / (2.0 * radius);
  auto dist2 = [center, dim](const Point& p) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += (p[d] - center[d]) * (p[d] - center[d]);
    return s;
  };
  // regularised radius keeps the source finite at the centre
  auto rhat = [dist2](const Point& p) { return std::sqrt(dist2(p) + 1e-12); };

  TestCase tc;
  tc.name = std::move(name);
  tc.dim = dim;
  tc.levelset.dim = dim;
  tc.levelset.eval = [dist2, radius](const Point& p) { return dist2(p) - radius * radius; };
  tc.levelset.gradient = [center, dim](const Point& p) {
    Point g{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) g[d] = 2.0 * (p[d] - center[d]);
    return g;
  };
  tc.exact_u = [rhat, wave](const Point& p) { return std::cos(wave * rhat(p)); };
  const double curvature = static_cast<double>(dim - 1);
  tc.source_f = [rhat, wave, curvature](const Point& p) {
    const double r = rhat(p);
    return wave * wave * std::cos(wave * r) + curvature * wave * std::sin(wave * r) / r;
  };
  tc.dirichlet_g = [](const Point&) { return 0.0; };
  return tc;
}

} // namespace detail

/// Radius of the disc used by circle2d; the offset puts the boundary a hair
/// away from grid nodes.
inline constexpr double kCircleRadius = 0.3 + 1e-10;
inline constexpr double kSphereRadius = 0.3;

/// Built-in manufactured cases: "circle2d" (dim 2) and "sphere3d" (dim 3).
inline TestCase builtin_case(std::string_view name, int dim) {
  if (name == "circle2d") {
    if (dim != 2) throw ConfigError("case circle2d is two-dimensional");
    return detail::radial_cosine_case("circle2d", 2, kCircleRadius);
  }
  if (name == "sphere3d") {
    if (dim != 3) throw ConfigError("case sphere3d is three-dimensional");
    return detail::radial_cosine_case("sphere3d", 3, kSphereRadius);
  }
  throw ConfigError("unknown test case '" + std::string(name) + "'");
}

inline int default_dimension(std::string_view case_name) {
  if (case_name == "sphere3d") return 3;
  return 2;
}

/// Same geometry and source with u and g shifted by a constant.
inline TestCase shifted_case(const TestCase& base, double offset) {
  TestCase tc = base;
  tc.name = base.name + "+shift";
  auto u = base.exact_u;
  auto g = base.dirichlet_g;
  tc.exact_u = [u, offset](const Point& p) { return u(p) + offset; };
  tc.dirichlet_g = [g, offset](const Point& p) { return g(p) + offset; };
  tc.homogeneous = offset == 0.0 && base.homogeneous;
  return tc;
}

inline CartesianGrid grid_for(const TestCase& tc, int intervals) {
  const std::array<Interval, 3> box{tc.box, tc.box, tc.box};
  return make_grid(std::span<const Interval>(box.data(), static_cast<std::size_t>(tc.dim)),
                   intervals);
}

} // namespace phifd
