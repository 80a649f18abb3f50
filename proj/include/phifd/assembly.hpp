#pragma once

/// Linear systems for the penalised level-set finite-difference schemes
/// (phifd, phifd2) and the Shortley-Weller baseline.
///
/// All systems live on the full node grid: row index = flattened node index.
/// Nodes the scheme does not touch get identity rows with zero right-hand
/// side, so the inside block is untouched by the padding.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phifd/classify.hpp"
#include "phifd/csr.hpp"
#include "phifd/errors.hpp"
#include "phifd/geometry.hpp"

namespace phifd {

enum class Scheme { PhiFD, PhiFD2, ShortleyWeller };

inline const char* to_string(Scheme s) {
  switch (s) {
  case Scheme::PhiFD: return "phifd";
  case Scheme::PhiFD2: return "phifd2";
  case Scheme::ShortleyWeller: return "shortley_weller";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "phifd") return Scheme::PhiFD;
  if (name == "phifd2") return Scheme::PhiFD2;
  if (name == "shortley_weller" || name == "sw") return Scheme::ShortleyWeller;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

struct SchemeParams {
  Scheme scheme = Scheme::PhiFD;
  /// Boundary penalty weight.
  double gamma = 1.0;
  /// Ghost-penalty stabilisation weight.
  double sigma = 0.01;

  void validate() const {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  }
};

/// Defaults: gamma = 1 for phifd, 10 for phifd2; sigma = 0.01.
inline SchemeParams default_params(Scheme s) {
  SchemeParams p;
  p.scheme = s;
  p.gamma = s == Scheme::PhiFD2 ? 10.0 : 1.0;
  p.sigma = 0.01;
  return p;
}

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  Classification classification;
  SchemeParams params;
  /// Non-fatal diagnostics (clamped crossings and the like).
  std::vector<std::string> warnings;

  const CartesianGrid& grid() const { return classification.grid; }
};

/// The additive pieces of a penalised system, each over the full grid.
struct SchemeBlocks {
  CsrMatrix laplacian;     ///< masked to inside rows
  CsrMatrix penalty;       ///< b_h (or its three-node variant)
  CsrMatrix stabilization; ///< ghost penalty
  CsrMatrix padding;       ///< identity on exterior nodes
};

namespace detail {

inline double inv_h2(const CartesianGrid& g) { return 1.0 / (g.spacing() * g.spacing()); }

/// Stabilisation scale h^n / h^4: the cell volume times two 1/h^2 difference
/// operators. 1/h^2 in 2D, 1/h in 3D.
inline double stab_scale(const CartesianGrid& g) {
  return std::pow(g.spacing(), g.dim()) * inv_h2(g) * inv_h2(g);
}

/// (2n+1)-point -Laplacian on inside rows.
inline void add_laplacian(const Classification& c, TripletBuilder& t) {
  const CartesianGrid& g = c.grid;
  const double w = inv_h2(g);
  const double diag = 2.0 * g.dim() * w;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!c.inside[k]) continue;
    t.add(k, k, diag);
    for (int d = 0; d < g.dim(); ++d) {
      t.add(k, k - g.stride(d), -w);
      t.add(k, k + g.stride(d), -w);
    }
  }
}

/// gamma / h^2 * (phi_b u_a - phi_a u_b)(phi_b v_a - phi_a v_b) / (phi_a^2 + phi_b^2)
/// for every cut edge (a, b = a + e_d).
inline void add_phifd_penalty(const Classification& c, double gamma, TripletBuilder& t) {
  const CartesianGrid& g = c.grid;
  const double w = gamma * inv_h2(g);
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    for (std::size_t a : c.cut_edges[d]) {
      const std::size_t b = a + s;
      const double pa = c.phi[a];
      const double pb = c.phi[b];
      const double sum = pa * pa + pb * pb;
      if (!(sum > 0.0))
        throw AssemblyError("cut edge " + std::to_string(a) + "->" + std::to_string(b) +
                            " has phi = 0 at both ends");
      t.add(a, a, w * pb * pb / sum);
      t.add(a, b, -w * pa * pb / sum);
      t.add(b, a, -w * pa * pb / sum);
      t.add(b, b, w * pa * pa / sum);
    }
  }
}

/// sigma h^(n-4) * D2 u * D2 v at every node of J_d, D2 the unscaled second difference.
inline void add_phifd_stabilization(const Classification& c, double sigma, TripletBuilder& t) {
  const CartesianGrid& g = c.grid;
  const double w = sigma * stab_scale(g);
  constexpr double coef[3] = {-1.0, 2.0, -1.0};
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    for (std::size_t k : c.stab_nodes[d]) {
      const std::size_t nodes[3] = {k - s, k, k + s};
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) t.add(nodes[p], nodes[q], w * coef[p] * coef[q]);
    }
  }
}

/// Three-node penalty: for every cut edge, the axis triple centred on its
/// inside endpoint gets gamma / h^2 * u~ v~ / den with
/// u~ = 2 phi_+ phi_- u_0 - phi_0 phi_- u_+ - phi_0 phi_+ u_-.
/// An inside node with both axis neighbours outside is penalised twice.
inline void add_phifd2_penalty(const Classification& c, double gamma, TripletBuilder& t) {
  const CartesianGrid& g = c.grid;
  const double w = gamma * inv_h2(g);
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    for (std::size_t a : c.cut_edges[d]) {
      const std::size_t centre = c.inside[a] ? a : a + s;
      const std::size_t nodes[3] = {centre - s, centre, centre + s};
      const double pm = c.phi[nodes[0]];
      const double p0 = c.phi[nodes[1]];
      const double pp = c.phi[nodes[2]];
      const double coef[3] = {-p0 * pp, 2.0 * pp * pm, -p0 * pm};
      const double den = 4.0 * pp * pp * pm * pm + p0 * p0 * pm * pm + p0 * p0 * pp * pp;
      if (!(den > 0.0))
        throw AssemblyError("three-node penalty denominator vanishes on triple (" +
                            std::to_string(nodes[0]) + ", " + std::to_string(nodes[1]) + ", " +
                            std::to_string(nodes[2]) + ")");
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) t.add(nodes[p], nodes[q], w * coef[p] * coef[q] / den);
    }
  }
}

/// sigma h^(n-4) * D3 u * D3 v over every 4-node axis window (a-d, a, a+d, a+2d)
/// holding exactly one outside node; D3 = (-1, 3, -3, 1).
inline void add_phifd2_stabilization(const Classification& c, double sigma, TripletBuilder& t) {
  const CartesianGrid& g = c.grid;
  const double w = sigma * stab_scale(g);
  constexpr double coef[4] = {-1.0, 3.0, -3.0, 1.0};
  const int last = g.intervals();
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      const MultiIndex a = g.multi_index(k);
      if (a[d] < 1 || a[d] + 2 > last) continue;
      const std::size_t nodes[4] = {k - s, k, k + s, k + 2 * s};
      int in = 0;
      for (auto n : nodes) in += c.inside[n];
      if (in != 3) continue;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) t.add(nodes[p], nodes[q], w * coef[p] * coef[q]);
    }
  }
}

inline void add_identity_padding(const Classification& c, TripletBuilder& t) {
  for (std::size_t k = 0; k < c.grid.node_count(); ++k)
    if (c.exterior[k]) t.add(k, k, 1.0);
}

inline std::vector<double> inside_source(const Classification& c, const ScalarField& f) {
  std::vector<double> rhs(c.grid.node_count(), 0.0);
  for (std::size_t k = 0; k < rhs.size(); ++k)
    if (c.inside[k]) rhs[k] = f(c.grid.point(k));
  return rhs;
}

inline void check_case(const CartesianGrid& grid, const TestCase& tc) {
  if (tc.dim != grid.dim()) throw ConfigError("test case dimension does not match grid");
}

} // namespace detail

/// Builds the four additive blocks of a penalised scheme (phifd or phifd2).
inline SchemeBlocks scheme_blocks(const Classification& c, const SchemeParams& params) {
  params.validate();
  if (params.scheme == Scheme::ShortleyWeller)
    throw ConfigError("scheme_blocks: Shortley-Weller has no penalty blocks");
  const std::size_t n = c.grid.node_count();
  SchemeBlocks blocks;
  {
    TripletBuilder t(n, n);
    detail::add_laplacian(c, t);
    blocks.laplacian = t.build();
  }
  {
    TripletBuilder t(n, n);
    if (params.scheme == Scheme::PhiFD) detail::add_phifd_penalty(c, params.gamma, t);
    else detail::add_phifd2_penalty(c, params.gamma, t);
    blocks.penalty = t.build();
  }
  {
    TripletBuilder t(n, n);
    if (params.scheme == Scheme::PhiFD) detail::add_phifd_stabilization(c, params.sigma, t);
    else detail::add_phifd2_stabilization(c, params.sigma, t);
    blocks.stabilization = t.build();
  }
  {
    TripletBuilder t(n, n);
    detail::add_identity_padding(c, t);
    blocks.padding = t.build();
  }
  return blocks;
}

namespace detail {

inline SparseSystem assemble_penalised(const CartesianGrid& grid, const LevelSet& ls,
                                       const TestCase& tc, const SchemeParams& params) {
  params.validate();
  check_case(grid, tc);
  SparseSystem sys;
  sys.params = params;
  sys.classification = classify_nodes(grid, ls);
  const Classification& c = sys.classification;
  const std::size_t n = grid.node_count();
  TripletBuilder t(n, n);
  t.reserve(n + c.inside_count() * static_cast<std::size_t>(2 * grid.dim() + 1));
  add_laplacian(c, t);
  if (params.scheme == Scheme::PhiFD) {
    add_phifd_penalty(c, params.gamma, t);
    add_phifd_stabilization(c, params.sigma, t);
  } else {
    add_phifd2_penalty(c, params.gamma, t);
    add_phifd2_stabilization(c, params.sigma, t);
  }
  add_identity_padding(c, t);
  sys.matrix = t.build();
  sys.rhs = inside_source(c, tc.source_f);
  return sys;
}

} // namespace detail

/// Penalised scheme with two-node boundary penalty and second-difference
/// ghost penalty.
inline SparseSystem assemble_phifd(const CartesianGrid& grid, const LevelSet& ls,
                                   const TestCase& tc, const SchemeParams& params) {
  if (params.scheme != Scheme::PhiFD) throw ConfigError("assemble_phifd: scheme must be phifd");
  return detail::assemble_penalised(grid, ls, tc, params);
}

/// Variant with three-node boundary penalty and third-difference ghost penalty.
inline SparseSystem assemble_phifd2(const CartesianGrid& grid, const LevelSet& ls,
                                    const TestCase& tc, const SchemeParams& params) {
  if (params.scheme != Scheme::PhiFD2)
    throw ConfigError("assemble_phifd2: scheme must be phifd2");
  return detail::assemble_penalised(grid, ls, tc, params);
}

/// Smallest admissible arm fraction for Shortley-Weller crossings.
inline constexpr double kMinArmFraction = 1e-12;

/// Classical unequal-arm scheme on inside nodes; all other nodes are padded.
/// Crossings are located by linear interpolation of phi along the edge.
inline SparseSystem assemble_sw(const CartesianGrid& grid, const LevelSet& ls, const TestCase& tc,
                                const SchemeParams& params) {
  if (params.scheme != Scheme::ShortleyWeller)
    throw ConfigError("assemble_sw: scheme must be shortley_weller");
  detail::check_case(grid, tc);
  SparseSystem sys;
  sys.params = params;
  sys.classification = classify_nodes(grid, ls);
  const Classification& c = sys.classification;
  const std::size_t n = grid.node_count();
  const double h = grid.spacing();
  TripletBuilder t(n, n);
  t.reserve(n + c.inside_count() * static_cast<std::size_t>(2 * grid.dim()));
  sys.rhs.assign(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    if (!c.inside[k]) {
      t.add(k, k, 1.0);
      continue;
    }
    const MultiIndex a = grid.multi_index(k);
    const Point xk = grid.point(a);
    double rhs = tc.source_f(xk);
    double diag = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const std::size_t s = grid.stride(d);
      const std::size_t nb[2] = {k - s, k + s};
      const double dir[2] = {-1.0, 1.0};
      double arm[2] = {h, h};
      bool cut[2] = {false, false};
      for (int side = 0; side < 2; ++side) {
        if (c.inside[nb[side]]) continue;
        const double p0 = c.phi[k];
        const double p1 = c.phi[nb[side]];
        double theta = p0 / (p0 - p1);
        if (theta < kMinArmFraction) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "crossing fraction %.3e at node %zu axis %d clamped to %.0e", theta, k, d,
                        kMinArmFraction);
          sys.warnings.emplace_back(buf);
          theta = kMinArmFraction;
        }
        arm[side] = theta * h;
        cut[side] = true;
      }
      const double hm = arm[0];
      const double hp = arm[1];
      diag += 2.0 / (hm * hp);
      const double coef[2] = {2.0 / (hm * (hm + hp)), 2.0 / (hp * (hm + hp))};
      for (int side = 0; side < 2; ++side) {
        if (cut[side]) {
          if (!tc.homogeneous) {
            Point xb = xk;
            xb[d] += dir[side] * arm[side];
            rhs += coef[side] * tc.dirichlet_g(xb);
          }
        } else {
          t.add(k, nb[side], -coef[side]);
        }
      }
    }
    t.add(k, k, diag);
    sys.rhs[k] = rhs;
  }
  sys.matrix = t.build();
  return sys;
}

/// Adds the non-homogeneous Dirichlet data to the right-hand side of a phifd
/// system: for each cut edge (a, b), with q = phi_b g_a - phi_a g_b,
/// rhs_a += gamma/h^2 phi_b q / S and rhs_b -= gamma/h^2 phi_a q / S.
inline void dirichlet_rhs(SparseSystem& sys, const std::vector<double>& boundary_values) {
  if (sys.params.scheme != Scheme::PhiFD)
    throw ConfigError("dirichlet_rhs: only the phifd scheme is supported");
  const Classification& c = sys.classification;
  const CartesianGrid& g = c.grid;
  if (boundary_values.size() != g.node_count())
    throw ConfigError("dirichlet_rhs: boundary values must cover every node");
  const double w = sys.params.gamma * detail::inv_h2(g);
  for (int d = 0; d < g.dim(); ++d) {
    const std::size_t s = g.stride(d);
    for (std::size_t a : c.cut_edges[d]) {
      const std::size_t b = a + s;
      const double pa = c.phi[a];
      const double pb = c.phi[b];
      const double sum = pa * pa + pb * pb;
      const double q = pb * boundary_values[a] - pa * boundary_values[b];
      sys.rhs[a] += w * pb * q / sum;
      sys.rhs[b] -= w * pa * q / sum;
    }
  }
}

inline void dirichlet_rhs(SparseSystem& sys, const ScalarField& g) {
  dirichlet_rhs(sys, sys.grid().sample(g));
}

/// Assembles the case's system for any scheme, including non-homogeneous
/// boundary data when the case carries it.
inline SparseSystem assemble(const TestCase& tc, int intervals, const SchemeParams& params) {
  const CartesianGrid grid = grid_for(tc, intervals);
  switch (params.scheme) {
  case Scheme::PhiFD: {
    SparseSystem sys = assemble_phifd(grid, tc.levelset, tc, params);
    if (!tc.homogeneous) dirichlet_rhs(sys, tc.dirichlet_g);
    return sys;
  }
  case Scheme::PhiFD2:
    if (!tc.homogeneous)
      throw ConfigError("phifd2 supports homogeneous Dirichlet data only");
    return assemble_phifd2(grid, tc.levelset, tc, params);
  case Scheme::ShortleyWeller: return assemble_sw(grid, tc.levelset, tc, params);
  }
  throw ConfigError("unknown scheme");
}

} // namespace phifd
