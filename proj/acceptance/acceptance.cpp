// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 run all ten
//   acceptance --criterion N   run criterion N only (exit 1 on FAIL)
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>

#include "ruelle/correlations.hpp"
#include "ruelle/dolgopyat.hpp"
#include "ruelle/orbits.hpp"
#include "ruelle/ruelle_operator.hpp"

using namespace ruelle;

namespace {

// Tolerances and budgets, pinned.
constexpr double kPressureTol = 1e-10, kGoldenTol = 1e-8;
constexpr double kNormalizationTol = 1e-10, kAdjointTol = 1e-10;
constexpr double kGibbsTol = 1e-10, kGibbsSpread = 10;
constexpr double kRhoMax = 0.999;
constexpr double kUnitNormTol = 1e-12, kCoboundaryTol = 1e-12, kIncrementTol = 1e-10;
constexpr double kCountLo = 0.8, kCountHi = 1.2;
constexpr double kZetaRelTol = 1e-8, kConjugateTol = 1e-14;
constexpr double kMinR2 = 0.9;
constexpr double kBudget[11] = {0, 1, 5, 5, 120, 30, 120, 180, 10, 180, 30};

struct Outcome {
  bool pass = true;
  std::ostringstream why;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      why << " [" << what << "]";
    }
  }
};

System dyadic() {
  return System::ifs(SymbolicSystem({{1, 1}, {1, 1}}), {Branch::affine("1/2", "0"), Branch::affine("1/2", "1/2")});
}
System golden() {
  std::vector<std::vector<std::optional<Branch>>> g(2, std::vector<std::optional<Branch>>(2));
  g[0][0] = Branch::affine("2/5", "0");
  g[0][1] = Branch::affine("1/2", "0");
  g[1][0] = Branch::affine("2/5", "1/2");
  std::vector<Interval> U{{0, 0.5}, {0.5, 1}};
  std::vector<std::pair<Rational, Rational>> Ue{{Rational(0), Rational(1, 2)}, {Rational(1, 2), Rational(1)}};
  return System(SymbolicSystem({{1, 1}, {1, 0}}), U, g, Ue);
}
System nonlinear() {
  return System::ifs(SymbolicSystem({{1, 1}, {1, 1}}), {Branch::expression("0.4*x + 0.1*x^2", 0.4, 0.6),
                                                        Branch::expression("0.5 + 0.4*x + 0.1*x^2", 0.4, 0.6)});
}
Potential roof(const std::string& src, const std::string& name) {
  auto p = Potential::expression(src, name);
  p.set_declared_min(1.0);
  return p;
}

// 1. Pressure of g = 0 on the full 2-shift and the golden-mean shift.
void c1(Outcome& o) {
  double p2 = pressure_report(dyadic(), Potential::constant(0.0), 10).value;
  // Dominant eigenvalue of [[1,1],[1,0]] from trace and determinant.
  double tr = 1, det = -1, lam = (tr + std::sqrt(tr * tr - 4 * det)) / 2;
  double pg = pressure_report(golden(), Potential::constant(0.0), 10).value;
  o.why << " |P - ln 2| = " << std::fabs(p2 - std::log(2.0)) << ", |h - ln phi| = " << std::fabs(pg - std::log(lam));
  o.check(std::fabs(p2 - std::log(2.0)) <= kPressureTol, "full shift");
  o.check(std::fabs(pg - std::log(lam)) <= kGoldenTol, "golden mean");
}

// 2. Normalization of M_a and adjoint invariance of nu.
void c2(Outcome& o) {
  double worst_norm = 0, worst_adj = 0;
  for (const System& sys : {dyadic(), golden()}) {
    Grid g(sys, 10);
    RealField f = Potential::expression("0.3*cos(5*x)").on_edges(g), tau = roof("1 + x^2/2", "quad").on_edges(g);
    double P = solve_pressure_root(g, f, tau);
    for (double a : {0.0, 0.01, -0.01, 0.05, -0.05}) {
      ThermoState s = thermo_state(g, f, tau, P, a);
      for (double v : transfer_apply(g, exp_field(s.fa_edge), RealField(g.size(), 1.0)))
        worst_norm = std::max(worst_norm, std::fabs(v - 1));
      if (a == 0) worst_adj = std::max(worst_adj, adjoint_invariance_error(g, s, 8));
    }
  }
  o.why << " sup|M_a 1 - 1| = " << worst_norm << ", adjoint error = " << worst_adj;
  o.check(worst_norm <= kNormalizationTol, "normalization");
  o.check(worst_adj <= kAdjointTol, "adjoint invariance");
}

// 3. Gibbs ratios.
void c3(Outcome& o) {
  auto sys = dyadic();
  Grid g(sys, 12);
  double spread = 0;
  for (double p : {1.0 / 3, 0.2, 0.5}) {
    auto f = Potential::table(sys.sym(), 1, {std::log(p), std::log(1 - p)});
    auto tau = Potential::constant(1.0);
    double P = solve_pressure_root(g, f.on_edges(g), tau.on_edges(g), 1e-14);
    ThermoState s0 = thermo_state(g, f.on_edges(g), tau.on_edges(g), P, 0.0);
    GibbsReport r = gibbs_bounds(g, s0, f, tau, 12);
    for (int n = 0; n < 12; ++n) spread = std::max(spread, r.c2_by_length[n] - r.c1_by_length[n]);
  }
  auto gs = golden();
  Grid gg(gs, 12);
  auto z = Potential(), one = Potential::constant(1.0);
  double P = solve_pressure_root(gg, z.on_edges(gg), one.on_edges(gg), 1e-14);
  ThermoState s0 = thermo_state(gg, z.on_edges(gg), one.on_edges(gg), P, 0.0);
  GibbsReport r = gibbs_bounds(gg, s0, z, one, 12);
  o.why << " Bernoulli spread = " << spread << ", golden c2/c1 = " << r.c2 / r.c1;
  o.check(spread <= kGibbsTol, "Bernoulli ratio not constant");
  o.check(r.c1 > 0 && r.c2 / r.c1 < kGibbsSpread, "golden-mean ratio spread");
}

// 4. Contraction of L_ab^{Nm} h over the (a, b) grid.
void c4(Outcome& o) {
  SweepOptions opt;
  opt.depth = 12;
  opt.N = 6;
  opt.m_max = 8;
  std::vector<double> bs;
  for (int b = 10; b <= 100; b += 10) bs.push_back(b);
  auto sw = contraction_sweep(dyadic(), Potential(), roof("1 + x^2/2", "quad"), {0.0, 0.01, -0.01}, bs, opt);
  double worst = 0;
  int non_monotone = 0;
  for (const auto& c : sw.cells) {
    worst = std::max(worst, c.rho_hat);
    non_monotone += !c.monotone;
  }
  o.why << " cells = " << sw.cells.size() << ", worst rho_hat = " << worst << ", non-monotone = " << non_monotone;
  o.check(non_monotone == 0, "norm sequence not strictly decreasing");
  o.check(worst < kRhoMax, "rho_hat");
}

// 5. Negative controls: constant roof and the affine roof cohomologous to a lattice roof.
void c5(Outcome& o) {
  auto sys = dyadic();
  Grid g(sys, 10);
  RealField fe(g.num_edges(), 0.0), te = Potential::constant(1.0).on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  double worst = 0;
  for (double a : {0.0, 0.01, -0.01}) {
    ThermoState s = thermo_state(g, fe, te, P, a);
    for (int b = 10; b <= 100; b += 10) {
      LabOperator L(g, s, b);
      auto ns = iterate_norms(L, s.mu, ComplexField(g.size(), 1.0), 6, 8);
      for (double v : ns.l2) worst = std::max(worst, std::fabs(v - 1));
    }
  }
  auto affine = roof("1 + x/2", "affine");
  auto cob = coboundary_residual(sys, affine, Expr("x/2"), 1);
  auto cob_deep = coboundary_residual(sys, affine, Expr("x/2"), 10);
  auto inc = temporal_increment_bound(sys, select_branch_pair(sys.sym(), 6), affine);
  o.why << " max |norm - 1| = " << worst << ", coboundary spread = " << std::max(cob.max_spread(), cob_deep.max_spread())
        << ", delta_hat = " << inc.delta_hat;
  o.check(worst <= kUnitNormTol, "constant roof norms");
  o.check(std::max(cob.max_spread(), cob_deep.max_spread()) <= kCoboundaryTol, "cohomology witness");
  o.check(inc.delta_hat < kIncrementTol, "temporal increment");
}

// 6. Cancellation-lemma suite at desk parameters.
void c6(Outcome& o) {
  SuiteOptions opt;  // N = 6, 50 cone trials, 20 L2 trials
  auto R = dolgopyat_suite(dyadic(), Potential(), roof("1 + x^2/2", "quad"), opt);
  o.why << " cone " << R.cone_worst << " <= " << R.cone_bound << ", beta lip " << R.beta_lip << ", l2 max "
        << R.l2_max << ", domination violations " << R.domination_violations;
  o.check(R.cone_ok, "cone preservation");
  o.check(R.beta_ok, "beta bounds");
  o.check(R.partition_ok(), "partition inequalities");
  o.check(R.dense_failures == 0, "dense J");
  o.check(R.l2_ok && R.l2_max < 1, "L2 contraction");
  o.check(R.domination_ok && R.domination_violations == 0, "pointwise domination");
}

// 7. Prime orbit counting.
void c7(Outcome& o) {
  auto sys = dyadic();
  const int n_max = 22;
  double lam = n_max * 1.0;  // largest lambda with lambda <= n_max tau_min
  auto q = counting_report(sys, roof("1 + x^2/2", "quad"), {lam}, n_max, 1.0);
  auto lat = counting_report(sys, Potential::constant(1.0), {lam}, n_max, 1.0);
  double ratio = q.ratios.empty() ? NAN : q.ratios[0];
  o.why << " pi(" << lam << ") = " << q.pi[0] << ", li = " << q.li_values[0] << ", ratio = " << ratio
        << ", words = " << q.words_enumerated << ", lattice span = " << lat.span;
  o.check(!q.lattice && q.unbiased[0], "non-lattice, unbiased");
  o.check(ratio >= kCountLo && ratio <= kCountHi, "ratio");
  o.check(lat.lattice && lat.ratios.empty(), "lattice flag");
}

// 8. Zeta function of the constant roof.
void c8(Outcome& o) {
  auto sys = dyadic();
  auto tau = Potential::constant(1.0);
  double h = std::log(2.0);
  auto z = zeta_truncated(sys, tau, 1.0, 40, h);
  cplx exact = 1.0 / (1.0 - 2.0 * std::exp(-1.0));
  double rel = std::abs(z.value - exact) / std::abs(exact);
  double conj_err = 0;
  for (cplx s : {cplx(1.0, 2.0), cplx(1.5, -7.0), cplx(0.9, 0.3)}) {
    auto a = zeta_truncated(sys, tau, s, 40, h), b = zeta_truncated(sys, tau, std::conj(s), 40, h);
    conj_err = std::max(conj_err, std::abs(b.value - std::conj(a.value)) / std::abs(a.value));
  }
  o.why << " relative error = " << rel << ", tail bound = " << z.tail_bound << ", conjugate error = " << conj_err;
  o.check(rel < kZetaRelTol, "closed form at n_max = 40");
  o.check(conj_err <= kConjugateTol, "conjugate symmetry");
}

// 9. Flow correlations.
void c9(Outcome& o) {
  auto sys = dyadic();
  Expr A(kDefaultObservable), B("cos(2*x) + 0.3*sin(pi*y/tau)^2");
  CorrelationOptions opt;  // L = 1e7, seeds 1, 2, 3, window [1, 6]
  auto q = correlation_run(sys, Potential(), roof("1 + x^2/2", "quad"), A, B, opt);
  for (const auto& c : q.curves) {
    o.why << " seed " << c.seed << ": ";
    if (c.fitted)
      o.why << "rate " << c.fit.rate << " r2 " << c.fit.r2 << ";";
    else
      o.why << c.fit_error << ";";
  }
  auto lat = correlation_run(sys, Potential(), Potential::constant(1.0), A, B, opt);
  for (const auto& c : lat.curves) o.why << " lattice " << c.seed << ": " << (c.fitted ? "r2 " + std::to_string(c.fit.r2) : c.fit_error) << ";";
  o.check(q.all_pass(kMinR2), "quadratic roof fit");
  o.check(!lat.any_pass(kMinR2), "lattice control passed");
}

// 10. Metric D and distortion.
void c10(Outcome& o) {
  long triples = 0, pairs = 0;
  for (const System& sys : {dyadic(), golden(), nonlinear()}) {
    Grid g(sys, 8);
    int n = g.size();
    bool metric = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double dij = g.D(i, j);
        metric = metric && dij == g.D(j, i) && (dij == 0) == (i == j);
        for (int l = 0; l < n; ++l) {
          metric = metric && dij <= g.D(i, l) + g.D(l, j);
          ++triples;
        }
      }
    o.check(metric, "metric axioms");
    // (a) realized distance is at most D.
    bool a_ok = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a_ok = a_ok && std::fabs(g.rep(i) - g.rep(j)) <= g.D(i, j) * (1 + 1e-12);
    o.check(a_ok, "realized distance bound");
    // (b) |chi_C(x) - chi_C(y)| <= D(x, y) / diam(C) for every cylinder of up to 8 symbols.
    bool b_ok = true;
    for (int len = 1; len <= 8; ++len)
      g.for_each_group(len, [&](int cb, int ce) {
        Word w = g.word(cb);
        w.resize(len);
        double dc = sys.diam(w);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            double diff = (i >= cb && i < ce) != (j >= cb && j < ce) ? 1.0 : 0.0;
            b_ok = b_ok && diff <= g.D(i, j) / dc * (1 + 1e-12);
            ++pairs;
          }
      });
    o.check(b_ok, "indicator Lipschitz bound");
  }
  auto sys = dyadic();
  auto r = distortion_ratios(sys, 10);
  bool exact = r.ratio_min == 0.5 && r.ratio_max == 0.5;
  for (int n = 1; n < 8; ++n)
    for (const Word& w : sys.sym().words(n))
      for (int j = 0; j < 2; ++j) {
        Word c = w;
        c.push_back(j);
        exact = exact && sys.diam_exact(c) / sys.diam_exact(w) == Rational(1, 2);
      }
  o.why << " triples = " << triples << ", cylinder pairs = " << pairs << ", dyadic ratios in [" << r.ratio_min << ", "
        << r.ratio_max << "]";
  o.check(exact, "dyadic ratios not exactly 1/2");
}

const std::function<void(Outcome&)> kCriteria[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
const char* kNames[] = {"pressure exactness",      "RPF normalization",  "Gibbs property",     "contraction sweep",
                        "negative controls",       "cancellation suite", "prime orbit counting", "zeta closed form",
                        "correlation decay",       "metric and distortion"};

bool run_one(int c) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    kCriteria[c - 1](o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.why << " [" << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < kBudget[c], "runtime budget " + std::to_string(static_cast<int>(kBudget[c])) + " s");
  std::printf("%s criterion %d (%s): %.2f s;%s\n", o.pass ? "PASS" : "FAIL", c, kNames[c - 1], secs, o.why.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    int c = std::atoi(argv[2]);
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "criterion must be 1..10\n");
      return 2;
    }
    return run_one(c) ? 0 : 1;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
    return 2;
  }
  int passed = 0;
  for (int c = 1; c <= 10; ++c) passed += run_one(c);
  std::printf("%d/10 criteria passed\n", passed);
  return passed == 10 ? 0 : 1;
}
