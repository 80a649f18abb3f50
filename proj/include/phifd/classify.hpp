#pragma once

/// Partition of grid nodes and edges into the index sets used by the schemes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "phifd/errors.hpp"
#include "phifd/geometry.hpp"

namespace phifd {

enum class NodeCategory : std::uint8_t {
  Inside,   ///< phi < 0; carries a Laplacian row.
  CutOnly,  ///< outside, but endpoint of a cut edge.
  Exterior, ///< untouched by the scheme; identity row.
};

inline const char* to_string(NodeCategory c) {
  switch (c) {
  case NodeCategory::Inside: return "inside";
  case NodeCategory::CutOnly: return "cut";
  case NodeCategory::Exterior: return "exterior";
  }
  return "?";
}

struct Classification {
  CartesianGrid grid;
  std::vector<double> phi;
  std::vector<std::uint8_t> inside;
  /// inside, or an axis neighbour is inside.
  std::vector<std::uint8_t> in_omega_h;
  std::vector<std::uint8_t> exterior;
  /// Per axis: anchors a such that the edge a -> a + e_d changes sign.
  std::array<std::vector<std::size_t>, 3> cut_edges;
  /// Per axis: inside nodes with at least one outside neighbour along that axis.
  std::array<std::vector<std::size_t>, 3> stab_nodes;

  std::size_t inside_count() const {
    std::size_t c = 0;
    for (auto v : inside) c += v;
    return c;
  }

  NodeCategory category(std::size_t node) const {
    if (inside[node]) return NodeCategory::Inside;
    if (exterior[node]) return NodeCategory::Exterior;
    return NodeCategory::CutOnly;
  }
};

struct ClassifyOptions {
  /// Reject inside nodes on the bounding box. When false they are accepted,
  /// and axis neighbours beyond the box are simply absent: they cut no edge
  /// and do not put a node in J. Such a classification cannot be assembled.
  bool require_embedded = true;
};

/// Classifies every node of the grid against the level set.
///
/// A node with phi == 0 is outside. By default every inside node must keep
/// all of its axis neighbours inside the grid.
inline Classification classify_nodes(const CartesianGrid& grid, const LevelSet& ls,
                                     const ClassifyOptions& opt = {}) {
  if (ls.dim != grid.dim())
    throw ConfigError("level set dimension does not match grid dimension");
  Classification c;
  c.grid = grid;
  const std::size_t n = grid.node_count();
  c.phi.resize(n);
  c.inside.assign(n, 0);
  c.in_omega_h.assign(n, 0);
  c.exterior.assign(n, 1);

  std::size_t inside_total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const MultiIndex a = grid.multi_index(k);
    const double v = ls(grid.point(a));
    if (!std::isfinite(v))
      throw GeometryError("level set is not finite at node " + std::to_string(k));
    c.phi[k] = v;
    if (v < 0.0) {
      if (opt.require_embedded && grid.on_box_boundary(a))
        throw DomainNotEmbeddedError("inside node " + std::to_string(k) +
                                     " lies on the bounding box; the domain must be "
                                     "strictly embedded");
      c.inside[k] = 1;
      ++inside_total;
    }
  }
  if (inside_total == 0) throw EmptyDomainError("no grid node lies inside the domain");

  for (std::size_t k = 0; k < n; ++k) {
    if (c.inside[k]) {
      c.in_omega_h[k] = 1;
      c.exterior[k] = 0;
    }
  }

  const int last = grid.intervals();
  for (int d = 0; d < grid.dim(); ++d) {
    const std::size_t s = grid.stride(d);
    for (std::size_t k = 0; k < n; ++k) {
      const MultiIndex a = grid.multi_index(k);
      if (a[d] < last && c.inside[k] != c.inside[k + s]) {
        c.cut_edges[d].push_back(k);
        c.in_omega_h[k] = c.in_omega_h[k + s] = 1;
        c.exterior[k] = c.exterior[k + s] = 0;
      }
      if (!c.inside[k]) continue;
      const bool lo_out = a[d] > 0 && !c.inside[k - s];
      const bool hi_out = a[d] < last && !c.inside[k + s];
      if (lo_out || hi_out) c.stab_nodes[d].push_back(k);
    }
  }
  return c;
}

/// True when the mesh is fine enough for the convergence theory, h < 2 r / sqrt(10).
inline bool mesh_size_guard(double spacing, double smoothness_radius) {
  return spacing < 2.0 * smoothness_radius / std::sqrt(10.0);
}

inline bool mesh_size_guard(const CartesianGrid& grid, double smoothness_radius) {
  return mesh_size_guard(grid.spacing(), smoothness_radius);
}

/// Debug dump: one row per node, (i, j[, k], category, phi).
inline void write_classification_csv(const Classification& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const int dim = c.grid.dim();
  out << "i,j" << (dim == 3 ? ",k" : "") << ",category,phi\n";
  char buf[64];
  for (std::size_t k = 0; k < c.grid.node_count(); ++k) {
    const MultiIndex a = c.grid.multi_index(k);
    out << a[0] << ',' << a[1];
    if (dim == 3) out << ',' << a[2];
    std::snprintf(buf, sizeof buf, "%.17g", c.phi[k]);
    out << ',' << to_string(c.category(k)) << ',' << buf << '\n';
  }
}

} // namespace phifd
