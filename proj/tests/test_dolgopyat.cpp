#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ruelle/dolgopyat.hpp"

using namespace ruelle;

TEST(Dolgopyat, BranchPairFullShift) {
  auto p = select_branch_pair(fx::full2(), 3);
  EXPECT_EQ(p.v1, (Word{0, 0, 0}));
  EXPECT_EQ(p.v2, (Word{1, 0, 0}));
  auto sys = fx::dyadic();
  auto i1 = sys.interval_exact(p.v1), i2 = sys.interval_exact(p.v2);
  EXPECT_EQ(i1.first, Rational(0));
  EXPECT_EQ(i1.second, Rational(1, 8));
  EXPECT_EQ(i2.first, Rational(1, 2));
  EXPECT_EQ(i2.second, Rational(5, 8));
}

TEST(Dolgopyat, BranchPairGoldenMean) {
  auto sym = fx::golden();
  auto p = select_branch_pair(sym, 3);
  // Oracle: smallest admissible word, then the smallest admissible word with another first symbol and same tail.
  Word best;
  for (const Word& w : sym.words(3))
    if (best.empty() || w < best) best = w;
  EXPECT_EQ(p.v1, best);
  EXPECT_TRUE(sym.admissible(p.v2));
  EXPECT_NE(p.v2[0], p.v1[0]);
  EXPECT_EQ(Word(p.v2.begin() + 1, p.v2.end()), Word(p.v1.begin() + 1, p.v1.end()));
  try {
    select_branch_pair(sym, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolation);
  }
}

TEST(Dolgopyat, BranchIdentityOnGrid) {
  // sigma^N(v_i(u)) = u: the cell reached by v_i carries v_i followed by u's symbols.
  auto sys = fx::dyadic();
  Grid g(sys, 10);
  RealField fe = Potential().on_edges(g), te = fx::quad_roof().on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  auto s = thermo_state(g, fe, te, P, 0.0);
  auto p = select_branch_pair(sys.sym(), 4);
  auto bp = branch_paths(g, s, p);
  for (int u = 0; u < g.size(); ++u)
    for (int i = 0; i < 2; ++i) {
      Word expect = i ? p.v2 : p.v1;
      Word wu = g.word(u);
      expect.insert(expect.end(), wu.begin(), wu.begin() + (10 - 4));
      ASSERT_EQ(g.word(bp.end[i][u]), expect);
      // Realized identity: applying sigma^N to the composed coordinate returns u.
      double x = g.rep(u);
      double y = sys.compose(i ? Word{1, 0, 0, 0, wu[0]} : Word{0, 0, 0, 0, wu[0]}, x);
      double back = y;
      for (int t = 0; t < 4; ++t) back = std::fmod(2 * back, 1.0);
      ASSERT_NEAR(back, x, 1e-12);
    }
}

TEST(Dolgopyat, TemporalIncrementClosedForms) {
  auto sys = fx::dyadic();
  auto p = select_branch_pair(sys.sym(), 6);
  auto c = temporal_increment_bound(sys, p, Potential::constant(1.0));
  EXPECT_EQ(c.delta_hat, 0.0);
  EXPECT_TRUE(c.degenerate);
  auto a = temporal_increment_bound(sys, p, fx::affine_roof());
  EXPECT_LT(a.delta_hat, 1e-10);
  EXPECT_TRUE(a.degenerate);
  // Quadratic roof: Phi(x) = tau(y + 1/2) - tau(y) with y = x/2^6, so Phi' = 2^-7 exactly.
  auto q = temporal_increment_bound(sys, p, fx::quad_roof());
  EXPECT_FALSE(q.degenerate);
  EXPECT_NEAR(q.delta_hat, 1.0 / 128, 1e-9);
  ASSERT_GE(q.history.size(), 2u);
  EXPECT_NEAR(q.history[1], q.history[0], 0.1 * q.history[0]);
}

TEST(Dolgopyat, PartitionDyadic) {
  auto sys = fx::dyadic();
  auto p = select_branch_pair(sys.sym(), 6);
  auto ps = build_partition(sys, p, 10.0, 1.0, 0.5, 1, 1);
  // 1/8 > 0.1 >= 1/16.
  EXPECT_EQ(ps.C.size(), 16u);
  for (const auto& w : ps.C) EXPECT_EQ(w.size(), 4u);
  EXPECT_TRUE(ps.exact);
  EXPECT_TRUE(ps.ineq_C);
  auto ps2 = build_partition(sys, p, 10.0, 1.0, 0.5, 1, 2);
  EXPECT_EQ(ps2.D.size(), 64u);
  for (const auto& w : ps2.D) {
    EXPECT_EQ(w.size(), 6u);
    EXPECT_EQ(sys.diam_exact(w), Rational(1, 64));
  }
  EXPECT_TRUE(ps2.ineq_D);
  try {
    build_partition(sys, p, 1e9, 1.0, 0.5, 1, 2, 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapTooSmall);
  }
}

TEST(Dolgopyat, PartitionGoldenVariableDepth) {
  auto sys = fx::golden_cantor();
  auto p = select_branch_pair(sys.sym(), 4);
  auto dr = distortion_ratios(sys, 10);
  // Cap 1/4.5: diam(00) = 0.2 fits, diam(01) = 0.25 needs one more symbol.
  auto ps = build_partition(sys, p, 4.5, 1.0, dr.rho, dr.p0, 2);
  std::set<size_t> lengths;
  for (const auto& w : ps.C) lengths.insert(w.size());
  EXPECT_GT(lengths.size(), 1u);
  // Blocks are disjoint subcylinders of the domain.
  Rational total = 0;
  for (const auto& w : ps.C) total += sys.diam_exact(w);
  Rational dom = 0;
  for (int s : p.domain) dom += sys.diam_exact(Word{s});
  EXPECT_LE(total, dom);
  EXPECT_TRUE(ps.ineq_C);
  EXPECT_TRUE(ps.ineq_D);
}

TEST(Dolgopyat, ParamsFormulaEcho) {
  MeasuredConstants k;
  k.c0 = 1;
  k.gamma = k.gamma1 = 2;
  k.rho = 0.5;
  k.p0 = 1;
  k.c0r0 = 1;
  k.C0 = 1.5;
  k.c1 = 0.5;
  k.c2 = 2;
  k.g_sup = 0.7;
  k.T = 1.5;
  k.A0 = 1;
  k.delta_hat = 1.0 / 128;
  auto P = compute_params(k);
  EXPECT_DOUBLE_EQ(P.E, 4.0);
  // gamma^N >= 512 E / (c0 delta rho) = 524288 = 2^19.
  EXPECT_EQ(P.N, 19);
  EXPECT_GE(std::pow(k.gamma, P.N), 512 * P.E / (k.c0 * k.delta_hat * k.rho));
  EXPECT_DOUBLE_EQ(P.eps1, 1.0 / 48);
  // 32 rho^(q0-1) < 0.05 first at q0 = 11.
  EXPECT_EQ(P.q0, 11);
  EXPECT_LE(P.mu, 0.25);
  EXPECT_GT(P.mu, 0);
  EXPECT_DOUBLE_EQ(P.c2, k.delta_hat * k.rho / 16);
  EXPECT_NEAR(P.eps2, P.eps_prime * P.mu * std::exp(-P.N * k.T) / 4, 1e-300);
  auto Dk = desk_params(k, P, 6, 1.0, 2);
  EXPECT_FALSE(Dk.certified);
  EXPECT_DOUBLE_EQ(Dk.mu, std::pow(0.5, 4) / (4 * 64));
  EXPECT_DOUBLE_EQ(Dk.Gamma(k, 10), 2 * Dk.mu * 64 / std::pow(0.5, 4) * 10);
  k.delta_hat = 0;
  try {
    compute_params(k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateRoof);
  }
}

namespace {
struct Desk {
  System sys = fx::dyadic();
  Grid g{sys, 12};
  RealField fe = Potential().on_edges(g), te = fx::quad_roof().on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  ThermoState s = thermo_state(g, fe, te, P, 0.0);
  BranchPair pair = select_branch_pair(sys.sym(), 6);
  PartitionScheme ps = build_partition(sys, pair, 10.0, 1.0, 0.5, 1, 2);
  double mu = std::pow(0.5, 4) / (4 * 64);
  LabOperator L{g, s, 10.0};
  BranchPaths bp = branch_paths(g, s, pair);
};
}  // namespace

TEST(Dolgopyat, BetaShapes) {
  Desk d;
  IndexSet none;
  RealField b0 = build_beta(d.g, d.ps, d.pair, none, d.mu);
  for (double v : b0) EXPECT_EQ(v, 1.0);
  IndexSet one;
  one.J = {{1, 5}};
  RealField b1 = build_beta(d.g, d.ps, d.pair, one, d.mu);
  Word x = d.pair.v1;
  x.insert(x.end(), d.ps.D[5].begin(), d.ps.D[5].end());
  for (int c = 0; c < d.g.size(); ++c) {
    Word w = d.g.word(c);
    bool in = std::equal(x.begin(), x.end(), w.begin());
    EXPECT_EQ(b1[c], in ? 1 - d.mu : 1.0);
  }
  IndexSet dup;
  dup.J = {{1, 5}, {1, 5}};
  try {
    build_beta(d.g, d.ps, d.pair, dup, d.mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OverlappingSupports);
  }
}

TEST(Dolgopyat, NJOnConstants) {
  Desk d;
  RealField one(d.g.size(), 1.0);
  RealField n0 = apply_NJ(d.L, 6, build_beta(d.g, d.ps, d.pair, IndexSet{}, d.mu), one);
  for (double v : n0) EXPECT_NEAR(v, 1.0, 1e-10);
  IndexSet all;
  for (size_t j = 0; j < d.ps.D.size(); ++j) all.J.emplace_back(1, static_cast<int>(j));
  RealField n1 = apply_NJ(d.L, 6, build_beta(d.g, d.ps, d.pair, all, d.mu), one);
  for (double v : n1) {
    EXPECT_LE(v, 1.0 + 1e-12);
    EXPECT_GE(v, 1 - d.mu - 1e-12);
  }
  // J empty: L^2 ratio of H = 1 is exactly 1; dense J: strictly below.
  EXPECT_NEAR(l2_ratio(d.s.mu, n0, one), 1.0, 1e-10);
  EXPECT_LT(l2_ratio(d.s.mu, n1, one), 1.0);
}

TEST(Dolgopyat, ConeMembershipExamples) {
  auto sys = fx::dyadic();
  Grid g(sys, 8);
  EXPECT_TRUE(cone_membership(g, RealField(g.size(), 1.0), 0.1));
  RealField e(g.size());
  for (int i = 0; i < g.size(); ++i) e[i] = std::exp(g.rep(i));
  EXPECT_TRUE(cone_membership(g, e, 2.0));
  RealField ind(g.size(), 0.0);
  ind[0] = 1;
  try {
    cone_membership(g, ind, 1e6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositive);
  }
}

TEST(Dolgopyat, ZeroFunctionGivesAllFirstBranch) {
  Desk d;
  RealField H(d.g.size(), 1.0);
  ComplexField h(d.g.size(), 0.0);
  IndexSet J = dense_J_construct(d.g, d.L, d.bp, d.ps, d.mu, h, H);
  EXPECT_TRUE(J.dense);
  EXPECT_EQ(J.J.size(), d.ps.D.size());
  for (auto [i, j] : J.J) EXPECT_EQ(i, 1);
  RealField NH = apply_NJ(d.L, 6, build_beta(d.g, d.ps, d.pair, J, d.mu), H);
  auto dom = verify_pointwise_domination(d.g, d.L, 6, h, NH, 4.0);
  EXPECT_EQ(dom.violations, 0);
}

TEST(Dolgopyat, AlignedPhasesRefuseDensity) {
  // h = H with phases making both branch terms add up: chi > 1 everywhere at b = 0.
  Desk d;
  LabOperator L0(d.g, d.s, 0.0);
  RealField H(d.g.size(), 1.0);
  ComplexField h(d.g.size(), 1.0);
  try {
    dense_J_construct(d.g, L0, d.bp, d.ps, d.mu, h, H);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DensenessFailure);
  }
}

TEST(Dolgopyat, DominationFromDenseJ) {
  Desk d;
  std::mt19937_64 rng(17);
  const double Eb = 40;
  for (int t = 0; t < 5; ++t) {
    RealField H = random_cone_function(d.g, Eb / 2, rng);
    ComplexField h = random_dominated(d.g, H, Eb, rng);
    IndexSet J = dense_J_construct(d.g, d.L, d.bp, d.ps, d.mu, h, H);
    RealField NH = apply_NJ(d.L, 6, build_beta(d.g, d.ps, d.pair, J, d.mu), H);
    auto dom = verify_pointwise_domination(d.g, d.L, 6, h, NH, 4.0);
    EXPECT_EQ(dom.violations, 0);
    EXPECT_LE(dom.lipschitz_ratio, 1.0);
    EXPECT_LT(l2_ratio(d.s.mu, NH, H), 1.0);
  }
}

TEST(Dolgopyat, PhaseGapAndOscillation) {
  Desk d;
  double c2 = (1.0 / 128) * 0.5 / 16;
  auto r = phase_gap_check(d.g, d.bp, d.ps, 10.0, c2, 1.0);
  EXPECT_GT(r.separated_pairs, 0);
  EXPECT_GE(r.min_gap_ratio, 1.0);
  EXPECT_LT(r.max_spread, 0.125);
}

TEST(Dolgopyat, SuiteAtDeskParameters) {
  auto sys = fx::dyadic();
  SuiteOptions o;
  o.cone_trials = 10;
  o.l2_trials = 5;
  auto R = dolgopyat_suite(sys, Potential(), fx::quad_roof(), o);
  EXPECT_FALSE(R.desk.certified);
  EXPECT_GE(R.certified.N, o.N);
  EXPECT_TRUE(R.partition_ok());
  EXPECT_TRUE(R.beta_ok) << R.beta_lip << " vs " << R.Gamma;
  EXPECT_TRUE(R.cone_ok) << R.cone_worst << " vs " << R.cone_bound;
  EXPECT_TRUE(R.l2_ok) << R.l2_max;
  EXPECT_TRUE(R.domination_ok) << R.domination_violations << " " << R.lipschitz_worst;
  EXPECT_TRUE(R.phase_ok);
  EXPECT_TRUE(R.chain_ok);
  for (size_t m = 1; m < R.chain_H2.size(); ++m) EXPECT_LT(R.chain_H2[m], R.chain_H2[m - 1]);
}

TEST(Dolgopyat, LatticeRoofRefused) {
  auto sys = fx::dyadic();
  SuiteOptions o;
  try {
    dolgopyat_suite(sys, Potential(), Potential::constant(1.0), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateRoof);
  }
}
