#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "phifd/analysis.hpp"
#include "phifd/direct.hpp"

using namespace phifd;
using namespace testing_helpers;

TEST(AssemblePhifd, StripInteriorRow) {
  const auto tc = strip_case();
  const auto sys = assemble(tc, 10, default_params(Scheme::PhiFD));
  const auto& g = sys.grid();
  const std::size_t k = g.index({5, 5, 0});
  const auto& a = sys.matrix;
  EXPECT_EQ(a.row_offsets[k + 1] - a.row_offsets[k], 5);
  EXPECT_NEAR(a.at(k, k), 400.0, 1e-10);
  for (std::size_t nb : {k - 1, k + 1, k - 11, k + 11}) EXPECT_NEAR(a.at(k, nb), -100.0, 1e-10);
  EXPECT_DOUBLE_EQ(sys.rhs[k], tc.source_f(g.point(k)));
}

TEST(AssemblePhifd, SingleCutEdgePenalty) {
  auto c = blank_classification(10);
  const std::size_t a = c.grid.index({4, 5, 0});
  const std::size_t b = a + 1;
  c.phi[a] = -0.05;
  c.phi[b] = 0.05;
  c.cut_edges[0] = {a};
  TripletBuilder t(c.grid.node_count(), c.grid.node_count());
  detail::add_phifd_penalty(c, 1.0, t);
  const auto m = t.build();
  EXPECT_NEAR(m.at(a, a), 50.0, 1e-10);
  EXPECT_NEAR(m.at(b, b), 50.0, 1e-10);
  EXPECT_NEAR(m.at(a, b), 50.0, 1e-10);
  EXPECT_NEAR(m.at(b, a), 50.0, 1e-10);
}

TEST(AssemblePhifd, PenaltyAccumulatesOnSharedNodes) {
  auto c = blank_classification(10);
  const std::size_t a = c.grid.index({4, 5, 0});
  c.phi[a] = -0.05;
  c.phi[a + 1] = 0.05;
  c.phi[a + 11] = 0.05;
  c.cut_edges[0] = {a};
  c.cut_edges[1] = {a};
  TripletBuilder t(c.grid.node_count(), c.grid.node_count());
  detail::add_phifd_penalty(c, 1.0, t);
  EXPECT_NEAR(t.build().at(a, a), 100.0, 1e-10);
}

TEST(AssemblePhifd, ZeroPhiCutEdgeIsAnAssemblyError) {
  auto c = blank_classification(10);
  const std::size_t a = c.grid.index({4, 5, 0});
  c.phi[a] = 0.0;
  c.phi[a + 1] = 0.0;
  c.cut_edges[0] = {a};
  TripletBuilder t(c.grid.node_count(), c.grid.node_count());
  EXPECT_THROW(detail::add_phifd_penalty(c, 1.0, t), AssemblyError);
}

TEST(AssemblePhifd, ExteriorRowsAreIdentity) {
  for (auto s : {Scheme::PhiFD, Scheme::PhiFD2, Scheme::ShortleyWeller}) {
    const auto tc = builtin_case("circle2d", 2);
    const auto sys = assemble(tc, 20, default_params(s));
    const auto& c = sys.classification;
    for (std::size_t k = 0; k < c.grid.node_count(); ++k) {
      if (!c.exterior[k]) continue;
      ASSERT_EQ(sys.matrix.row_offsets[k + 1] - sys.matrix.row_offsets[k], 1);
      EXPECT_EQ(sys.matrix.at(k, k), 1.0);
      EXPECT_EQ(sys.rhs[k], 0.0);
      // no other row reaches an exterior node
      for (std::size_t i = 0; i < c.grid.node_count(); ++i)
        if (i != k) { EXPECT_EQ(sys.matrix.at(i, k), 0.0); }
    }
  }
}

TEST(AssemblePhifd, RowWidthBound) {
  for (auto s : {Scheme::PhiFD, Scheme::PhiFD2}) {
    for (int dim : {2, 3}) {
      const auto tc = builtin_case(dim == 2 ? "circle2d" : "sphere3d", dim);
      const auto sys = assemble(tc, dim == 2 ? 40 : 16, default_params(s));
      const auto& a = sys.matrix;
      for (std::size_t i = 0; i < a.rows; ++i)
        EXPECT_LE(a.row_offsets[i + 1] - a.row_offsets[i], 1 + 2 * dim + 4 * dim);
    }
  }
}

TEST(AssemblePhifd, BlocksSumToMatrixAndAreSymmetric) {
  const auto tc = builtin_case("circle2d", 2);
  for (auto s : {Scheme::PhiFD, Scheme::PhiFD2}) {
    const auto sys = assemble(tc, 30, default_params(s));
    const auto blocks = scheme_blocks(sys.classification, sys.params);
    EXPECT_TRUE(is_symmetric(blocks.penalty, 1e-12));
    EXPECT_TRUE(is_symmetric(blocks.stabilization, 1e-12));
    const auto sum =
        add(add(add(blocks.laplacian, blocks.penalty), blocks.stabilization), blocks.padding);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    std::vector<double> v(sum.rows);
    for (auto& x : v) x = dist(rng);
    const auto y1 = spmv(sum, v);
    const auto y2 = spmv(sys.matrix, v);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(y1[i], y2[i], 1e-9 * (1 + std::abs(y1[i])));
  }
}

TEST(AssemblePhifd, PenaltyKernelVanishesOnMultiplesOfPhi) {
  const auto tc = builtin_case("circle2d", 2);
  for (int n : {20, 80}) {
    const auto sys = assemble(tc, n, default_params(Scheme::PhiFD));
    const auto blocks = scheme_blocks(sys.classification, sys.params);
    for (double cst : {1.0, -3.5, 1e3}) {
      std::vector<double> u(sys.classification.phi);
      for (auto& x : u) x *= cst;
      const auto y = spmv(blocks.penalty, u);
      const double scale = norm_inf(blocks.penalty) * std::abs(cst) * 0.1;
      for (double v : y) EXPECT_LE(std::abs(v), 1e-13 * scale);
    }
  }
}

TEST(AssemblePhifd2, TripleKernelAlgebra) {
  // phi = (-2h', -h', h') with u = (p0 + p1 x) phi at x = -h, 0, h
  for (double hp : {1e-3, 0.07, 2.0}) {
    for (auto [p0, p1] : {std::pair{1.0, 0.0}, std::pair{-2.0, 5.0}, std::pair{0.3, -7.0}}) {
      const double h = 0.1;
      const double pm = -2 * hp, p0_ = -hp, pp = hp;
      const double um = (p0 - p1 * h) * pm, u0 = p0 * p0_, up = (p0 + p1 * h) * pp;
      const double ut = 2 * pp * pm * u0 - p0_ * pm * up - p0_ * pp * um;
      EXPECT_NEAR(ut, 0.0, 1e-14 * (1 + std::abs(p0) + std::abs(p1)) * hp * hp * hp);
    }
  }
}

TEST(AssemblePhifd2, PenaltyBlockVanishesOnLinearTimesPhi) {
  const auto tc = builtin_case("circle2d", 2);
  for (int n : {20, 60}) {
    const auto sys = assemble(tc, n, default_params(Scheme::PhiFD2));
    const auto blocks = scheme_blocks(sys.classification, sys.params);
    const auto& g = sys.grid();
    for (auto [p0, p1] : {std::pair{1.0, 0.0}, std::pair{0.5, 2.0}, std::pair{-1.0, -4.0}}) {
      // the x-triples see p linear along the triple, the y-triples see it constant
      std::vector<double> u(g.node_count());
      for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = (p0 + p1 * g.point(k)[0]) * sys.classification.phi[k];
      const auto y = spmv(blocks.penalty, u);
      for (double v : y) EXPECT_LE(std::abs(v), 1e-11 * norm_inf(blocks.penalty));
    }
  }
}

TEST(AssemblePenalised, PenaltyAndStabilisationArePositive) {
  const auto tc = builtin_case("circle2d", 2);
  std::mt19937_64 rng(11);
  for (auto s : {Scheme::PhiFD, Scheme::PhiFD2}) {
    const auto sys = assemble(tc, 40, default_params(s));
    const auto blocks = scheme_blocks(sys.classification, sys.params);
    const auto bj = add(blocks.penalty, blocks.stabilization);
    for (int trial = 0; trial < 100; ++trial) {
      const auto v = random_on(sys.classification.exterior, rng, true);
      EXPECT_GE(quad_form(bj, v), -1e-12 * dot(v, v) * norm_inf(bj));
    }
  }
}

TEST(AssemblePenalised, CoercivityOnRandomVectors) {
  const auto tc = builtin_case("circle2d", 2);
  std::mt19937_64 rng(12);
  for (auto s : {Scheme::PhiFD, Scheme::PhiFD2}) {
    for (int n : {10, 40}) {
      const auto sys = assemble(tc, n, default_params(s));
      for (int trial = 0; trial < 100; ++trial) {
        const auto v = random_on(sys.classification.exterior, rng, true);
        EXPECT_GT(quad_form(sys.matrix, v), 0.0) << to_string(s) << " N=" << n;
      }
    }
  }
}

TEST(AssemblePenalised, InteriorStencilIsExactOnQuadratics) {
  auto q = [](const Point& p) { return 2 * p[0] * p[0] + p[1] * p[1] + p[0] * p[1] - 3 * p[0]; };
  const double minus_lap = -6.0;
  const auto tc = builtin_case("circle2d", 2);
  const auto sys = assemble(tc, 40, default_params(Scheme::PhiFD));
  const auto blocks = scheme_blocks(sys.classification, sys.params);
  const auto& c = sys.classification;
  const auto u = sys.grid().sample(q);
  const auto lap = spmv(blocks.laplacian, u);
  const auto full = spmv(sys.matrix, u);
  const auto extra = add(blocks.penalty, blocks.stabilization);
  int checked = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!c.inside[k]) continue;
    EXPECT_NEAR(lap[k], minus_lap, 1e-9);
    if (extra.row_offsets[k + 1] == extra.row_offsets[k]) {
      EXPECT_NEAR(full[k], minus_lap, 1e-9);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(AssemblePhifd, StabilisationScaleByDimension) {
  EXPECT_DOUBLE_EQ(detail::stab_scale(make_unit_grid(2, 10)), 100.0);
  EXPECT_NEAR(detail::stab_scale(make_unit_grid(3, 10)), 10.0, 1e-12);
}

TEST(AssembleSw, UncutRowIsFivePoint) {
  const auto tc = strip_case();
  const auto sys = assemble(tc, 10, default_params(Scheme::ShortleyWeller));
  const std::size_t k = sys.grid().index({5, 5, 0});
  EXPECT_NEAR(sys.matrix.at(k, k), 400.0, 1e-9);
  EXPECT_NEAR(sys.matrix.at(k, k - 1), -100.0, 1e-9);
  EXPECT_NEAR(sys.matrix.at(k, k + 1), -100.0, 1e-9);
}

TEST(AssembleSw, HalfArmCoefficients) {
  // strip boundary at x = 0.75 lies half way between nodes i = 7 and i = 8
  auto tc = strip_case();
  tc.homogeneous = false;
  tc.dirichlet_g = [](const Point&) { return 1.0; };
  const auto sys = assemble(tc, 10, default_params(Scheme::ShortleyWeller));
  const auto& g = sys.grid();
  const std::size_t k = g.index({7, 4, 0});
  EXPECT_NEAR(sys.matrix.at(k, k - 1), -2.0 / (0.1 * 0.15), 1e-6);
  EXPECT_NEAR(sys.matrix.at(k, k), 2.0 / (0.1 * 0.05) + 200.0, 1e-6);
  EXPECT_EQ(sys.matrix.at(k, k + 1), 0.0);
  EXPECT_NEAR(sys.rhs[k], tc.source_f(g.point(k)) + 2.0 / (0.05 * 0.15), 1e-6);
}

TEST(AssembleSw, MMatrixRows) {
  const auto tc = builtin_case("circle2d", 2);
  for (int n : {10, 40, 160}) {
    const auto sys = assemble(tc, n, default_params(Scheme::ShortleyWeller));
    const auto& a = sys.matrix;
    for (std::size_t i = 0; i < a.rows; ++i) {
      double diag = 0, off = 0;
      for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
        const auto j = static_cast<std::size_t>(a.column_indices[static_cast<std::size_t>(p)]);
        const double v = a.values[static_cast<std::size_t>(p)];
        if (j == i) diag = v;
        else {
          EXPECT_LE(v, 0.0);
          off += -v;
        }
      }
      EXPECT_GT(diag, 0.0);
      EXPECT_GE(diag, off * (1 - 1e-12));
    }
  }
}

TEST(AssembleSw, TinyArmIsClampedWithWarning) {
  TestCase tc = builtin_case("circle2d", 2);
  // boundary 1e-14 beyond the node x = 0.8 on the centre line
  const double r = 0.3 + 1e-14;
  tc.levelset.eval = [r](const Point& p) {
    return std::sqrt((p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5)) - r;
  };
  const auto sys = assemble(tc, 10, default_params(Scheme::ShortleyWeller));
  EXPECT_FALSE(sys.warnings.empty());
}

TEST(DirichletRhs, SingleCutEdge) {
  SparseSystem sys;
  sys.classification = blank_classification(10);
  auto& c = sys.classification;
  const std::size_t a = c.grid.index({4, 5, 0});
  c.phi[a] = -0.05;
  c.phi[a + 1] = 0.05;
  c.cut_edges[0] = {a};
  sys.params = default_params(Scheme::PhiFD);
  sys.rhs.assign(c.grid.node_count(), 0.0);
  std::vector<double> ud(c.grid.node_count(), 1.0);
  dirichlet_rhs(sys, ud);
  EXPECT_NEAR(sys.rhs[a], 100.0, 1e-10);
  EXPECT_NEAR(sys.rhs[a + 1], 100.0, 1e-10);
}

TEST(DirichletRhs, ZeroDataLeavesRhs) {
  const auto tc = builtin_case("circle2d", 2);
  auto sys = assemble(tc, 20, default_params(Scheme::PhiFD));
  const auto before = sys.rhs;
  dirichlet_rhs(sys, [](const Point&) { return 0.0; });
  EXPECT_EQ(sys.rhs, before);
}

TEST(DirichletRhs, ShiftedDataReproducesShiftedSolution) {
  const auto base = builtin_case("circle2d", 2);
  const auto tc = shifted_case(base, 1.0);
  for (int n : {40, 80}) {
    const auto sys = assemble(tc, n, default_params(Scheme::PhiFD));
    const auto sol = direct_solve(sys.matrix, sys.rhs);
    const auto e = relative_errors(sol.solution, tc, sys.classification);
    const auto sys0 = assemble(base, n, default_params(Scheme::PhiFD));
    const auto sol0 = direct_solve(sys0.matrix, sys0.rhs);
    // the shifted problem's error is of the same size as the unshifted one
    double diff = 0, diff0 = 0;
    const auto ex = sys.grid().sample(tc.exact_u);
    const auto ex0 = sys0.grid().sample(base.exact_u);
    for (std::size_t k = 0; k < ex.size(); ++k)
      if (sys.classification.inside[k]) {
        diff = std::max(diff, std::abs(ex[k] - sol.solution[k]));
        diff0 = std::max(diff0, std::abs(ex0[k] - sol0.solution[k]));
      }
    EXPECT_LT(diff, 3.0 * diff0 + 1e-6) << "N=" << n;
    EXPECT_LT(e.l2, 1e-3) << "N=" << n;
  }
}

TEST(AssemblePenalised, ParameterValidation) {
  const auto tc = builtin_case("circle2d", 2);
  SchemeParams p = default_params(Scheme::PhiFD);
  p.gamma = 0.0;
  EXPECT_THROW(assemble(tc, 10, p), ConfigError);
  p = default_params(Scheme::PhiFD2);
  p.sigma = -1.0;
  EXPECT_THROW(assemble(tc, 10, p), ConfigError);
  EXPECT_THROW(assemble_phifd(grid_for(tc, 10), tc.levelset, tc, default_params(Scheme::PhiFD2)),
               ConfigError);
  EXPECT_EQ(parse_scheme("sw"), Scheme::ShortleyWeller);
  EXPECT_THROW(parse_scheme("fem"), ConfigError);
}

TEST(AssemblePenalised, DefaultParameters) {
  EXPECT_EQ(default_params(Scheme::PhiFD).gamma, 1.0);
  EXPECT_EQ(default_params(Scheme::PhiFD2).gamma, 10.0);
  EXPECT_EQ(default_params(Scheme::PhiFD).sigma, 0.01);
}

// Published N = 80 spot values.
TEST(SchemeAccuracy, CircleN80) {
  const auto tc = builtin_case("circle2d", 2);
  struct Case {
    Scheme s;
    double l2;
    double tol;
  };
  for (auto [s, ref, tol] : {Case{Scheme::PhiFD, 2.0507e-4, 0.10}, Case{Scheme::PhiFD2, 3.5804e-4, 0.10},
                             Case{Scheme::ShortleyWeller, 2.2160e-4, 0.15}}) {
    const auto sys = assemble(tc, 80, default_params(s));
    const auto sol = direct_solve(sys.matrix, sys.rhs);
    const auto e = relative_errors(sol.solution, tc, sys.classification);
    EXPECT_NEAR(e.l2, ref, tol * ref) << to_string(s);
  }
}
