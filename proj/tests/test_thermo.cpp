#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "fixtures.hpp"

using namespace ruelle;

namespace {

// ln of the spectral radius of B_ij = A_ij e^{f(i j)} (depth-2 table) or e^{f(i)} (depth 1).
double matrix_pressure(const SymbolicSystem& sym, const std::function<double(int, int)>& f) {
  int k = sym.k();
  Eigen::MatrixXd B(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) B(i, j) = sym.allowed(i, j) ? std::exp(f(i, j)) : 0.0;
  return std::log(B.eigenvalues().cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Thermo, PressureFullShiftAndGoldenMean) {
  auto dy = fx::dyadic();
  auto gm = fx::golden_cantor();
  for (int d : {1, 4, 10}) {
    Grid g(dy, d);
    EXPECT_NEAR(pressure(g, Potential().on_edges(g)), std::log(2.0), 1e-10);
    Grid h(gm, d);
    EXPECT_NEAR(pressure(h, Potential().on_edges(h)), std::log((1 + std::sqrt(5.0)) / 2), 1e-10);
  }
}

TEST(Thermo, PressureMatchesMatrixOracle) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0, 1);
  for (const System& sys : {fx::dyadic(), fx::golden_cantor()}) {
    for (int t = 0; t < 5; ++t) {
      auto ws = sys.sym().words(2);
      std::vector<double> vals(ws.size());
      for (auto& v : vals) v = N(rng);
      auto pot = Potential::table(sys.sym(), 2, vals);
      auto f = [&](int i, int j) { return pot.at_word(sys, {i, j}); };
      // Depth-2 weights B_ij live on the edge i -> j.
      double oracle = matrix_pressure(sys.sym(), f);
      for (int d : {1, 3, 8}) {
        Grid g(sys, d);
        EXPECT_NEAR(pressure(g, pot.on_edges(g)), oracle, 1e-10);
      }
    }
  }
}

TEST(Thermo, BernoulliRPF) {
  auto sys = fx::dyadic();
  auto f = Potential::table(sys.sym(), 1, {std::log(1.0 / 3), std::log(2.0 / 3)});
  Grid g(sys, 6);
  RPF r = rpf_solve(g, f.on_edges(g));
  EXPECT_NEAR(r.lambda, 1.0, 1e-12);
  for (double v : r.h) EXPECT_NEAR(v, 1.0, 1e-10);
  auto masses = cylinder_masses(g, r.nu_hat, 2);
  EXPECT_NEAR(masses[0], 1.0 / 9, 1e-12);
  EXPECT_NEAR(masses[3], 4.0 / 9, 1e-12);
}

TEST(Thermo, RPFResidualsAndPositivity) {
  auto sys = fx::golden_cantor();
  Grid g(sys, 8);
  auto roof = fx::quad_roof();
  RealField ge = combine(Potential().on_edges(g), roof.on_edges(g), 0.3);
  RPF r = rpf_solve(g, ge);
  RealField w = exp_field(ge);
  RealField Lh = transfer_apply(g, w, r.h);
  RealField nL = transfer_adjoint(g, w, r.nu_hat);
  double ih = 0, mass = 0;
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_GT(r.h[i], 0);
    EXPECT_NEAR(Lh[i], r.lambda * r.h[i], 1e-10 * r.lambda * r.h[i]);
    EXPECT_NEAR(nL[i], r.lambda * r.nu_hat[i], 1e-10);
    ih += r.h[i] * r.nu_hat[i];
    mass += r.nu_hat[i];
  }
  EXPECT_NEAR(ih, 1.0, 1e-12);
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Thermo, PressureRootClosedForms) {
  auto sys = fx::dyadic();
  Grid g(sys, 5);
  RealField zero = Potential().on_edges(g);
  EXPECT_NEAR(solve_pressure_root(g, zero, Potential::constant(1.0).on_edges(g), 1e-13), std::log(2.0), 1e-12);
  EXPECT_NEAR(solve_pressure_root(g, zero, Potential::constant(2.5).on_edges(g), 1e-13), std::log(2.0) / 2.5, 1e-12);
  // tau = (1, 2) by symbol: e^{-P} + e^{-2P} = 1, so P = ln(golden ratio).
  auto tau = Potential::table(sys.sym(), 1, {1.0, 2.0});
  EXPECT_NEAR(solve_pressure_root(g, zero, tau.on_edges(g), 1e-13), std::log((1 + std::sqrt(5.0)) / 2), 1e-12);
}

TEST(Thermo, PressureDecreasingInP) {
  auto sys = fx::golden_cantor();
  Grid g(sys, 7);
  RealField f = Potential::expression("sin(3*x)").on_edges(g);
  RealField tau = fx::quad_roof().on_edges(g);
  double prev = 1e300;
  for (double P = -1; P <= 2; P += 0.25) {
    double v = pressure(g, combine(f, tau, P));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Thermo, ExpressionRootStableUnderRefinement) {
  auto sys = fx::dyadic();
  const double tol = 1e-3;
  Grid g(sys, 9), g3(sys, 12);
  auto tau = fx::quad_roof();
  double P = solve_pressure_root(g, Potential().on_edges(g), tau.on_edges(g), tol);
  double P3 = solve_pressure_root(g3, Potential().on_edges(g3), tau.on_edges(g3), tol);
  EXPECT_NEAR(P, P3, 10 * tol);
  auto rep = pressure_report(sys, Potential::expression("-0.6*(1 + x^2/2)"), 9);
  EXPECT_FALSE(rep.exact);
  EXPECT_LT(rep.error_proxy, 1e-2);
}

TEST(Thermo, RootBracketRejectsNonPositiveRoof) {
  auto sys = fx::dyadic();
  Grid g(sys, 3);
  try {
    solve_pressure_root(g, Potential().on_edges(g), Potential::expression("x - 0.5").on_edges(g));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BracketFailure);
  }
}

TEST(Thermo, NormalizedFamily) {
  auto sys = fx::dyadic();
  Grid g(sys, 10);
  RealField f = Potential().on_edges(g), tau = fx::quad_roof().on_edges(g);
  double P = solve_pressure_root(g, f, tau);
  for (double a : {0.0, 0.01, -0.01, 0.05, -0.05}) {
    ThermoState s = thermo_state(g, f, tau, P, a);
    RealField m1 = transfer_apply(g, exp_field(s.fa_edge), RealField(g.size(), 1.0));
    for (double v : m1) EXPECT_NEAR(v, 1.0, 1e-10);
  }
  // Constant roof: lambda_a = e^{-a}.
  RealField one = Potential::constant(1.0).on_edges(g);
  ThermoState s = thermo_state(g, f, one, std::log(2.0), 0.05);
  EXPECT_NEAR(s.lambda, std::exp(-0.05), 1e-12);
  ThermoState s0 = thermo_state(g, f, one, std::log(2.0), 0.0);
  EXPECT_GE(fit_C0(g, s0, {0.01, 0.05}), (1 - std::exp(-0.05)) / 0.05 - 1e-12);
}

TEST(Thermo, AdjointInvarianceToDepth8) {
  for (const System& sys : {fx::dyadic(), fx::golden_cantor()}) {
    Grid g(sys, 10);
    RealField f = Potential::expression("0.3*cos(5*x)").on_edges(g), tau = fx::quad_roof().on_edges(g);
    double P = solve_pressure_root(g, f, tau);
    ThermoState s0 = thermo_state(g, f, tau, P, 0.0);
    EXPECT_LT(adjoint_invariance_error(g, s0, 8), 1e-10);
  }
}

TEST(Thermo, GibbsBernoulliRatioConstant) {
  auto sys = fx::dyadic();
  auto f = Potential::table(sys.sym(), 1, {std::log(1.0 / 3), std::log(2.0 / 3)});
  auto tau = Potential::constant(1.0);
  Grid g(sys, 12);
  double P = solve_pressure_root(g, f.on_edges(g), tau.on_edges(g), 1e-14);
  EXPECT_NEAR(P, 0.0, 1e-12);
  ThermoState s0 = thermo_state(g, f.on_edges(g), tau.on_edges(g), P, 0.0);
  GibbsReport r = gibbs_bounds(g, s0, f, tau, 12);
  for (int n = 0; n < 12; ++n) EXPECT_NEAR(r.c2_by_length[n] - r.c1_by_length[n], 0.0, 1e-10);
}

TEST(Thermo, GibbsGoldenMeanBounded) {
  auto sys = fx::golden_cantor();
  Grid g(sys, 12);
  auto f = Potential(), tau = Potential::constant(1.0);
  double P = solve_pressure_root(g, f.on_edges(g), tau.on_edges(g), 1e-14);
  ThermoState s0 = thermo_state(g, f.on_edges(g), tau.on_edges(g), P, 0.0);
  GibbsReport r = gibbs_bounds(g, s0, f, tau, 12);
  EXPECT_GT(r.c1, 0);
  EXPECT_LT(r.c2 / r.c1, 10);
  // Cylinder masses are consistent across lengths.
  for (int n = 1; n < 12; ++n) {
    auto a = cylinder_masses(g, s0.mu, n), b = cylinder_masses(g, s0.mu, n + 1);
    double sa = 0, sb = 0;
    for (double v : a) sa += v;
    for (double v : b) sb += v;
    EXPECT_NEAR(sa, 1.0, 1e-12);
    EXPECT_NEAR(sb, 1.0, 1e-12);
  }
}

TEST(Thermo, BirkhoffSumDirect) {
  auto sys = fx::dyadic();
  auto f = Potential::expression("x^2");
  PointRep x{{0, 1, 1, 0, 1}};
  double direct = 0;
  Word w = x.prefix;
  for (int j = 0; j < 5; ++j) {
    direct += std::pow(sys.rep_coord(Word(w.begin() + j, w.end())), 2);
  }
  EXPECT_DOUBLE_EQ(birkhoff_sum(sys, f, 5, x), direct);
}
