#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fixtures.hpp"
#include "ruelle/orbits.hpp"

using namespace ruelle;

namespace {
int mobius(int n) {
  int r = 1;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      r = -r;
    }
  return n > 1 ? -r : r;
}
}  // namespace

TEST(Orbits, FixedPointCounts) {
  EXPECT_EQ(fixed_point_count(fx::full2(), 3), 8u);
  EXPECT_EQ(fixed_point_count(fx::golden(), 3), 4u);  // Lucas L_3
  EXPECT_EQ(fixed_point_count(fx::golden(), 1), 1u);
  EXPECT_EQ(fixed_point_count(fx::full2(), 63), 1ull << 63);
  try {
    fixed_point_count(fx::full2(), 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overflow);
  }
  // Lucas numbers L_n = phi^n + (-1/phi)^n.
  double phi = (1 + std::sqrt(5.0)) / 2;
  for (int n = 1; n <= 40; ++n)
    EXPECT_EQ(fixed_point_count(fx::golden(), n), static_cast<std::uint64_t>(std::llround(std::pow(phi, n) + std::pow(-1 / phi, n))));
}

TEST(Orbits, NecklaceIdentity) {
  for (const SymbolicSystem& sym : {fx::full2(), fx::golden(), SymbolicSystem({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}})}) {
    std::vector<int> prim(13, 0);
    for_each_lyndon(sym.k(), 12, [&](const Word& w) {
      if (cyclically_admissible(sym, w)) ++prim[w.size()];
    });
    for (int n = 1; n <= 12; ++n) {
      std::uint64_t s = 0;
      for (int d = 1; d <= n; ++d)
        if (n % d == 0) s += static_cast<std::uint64_t>(d) * prim[d];
      EXPECT_EQ(s, fixed_point_count(sym, n));
      // Moebius inversion as an independent count.
      long long mob = 0;
      for (int d = 1; d <= n; ++d)
        if (n % d == 0) mob += mobius(n / d) * static_cast<long long>(fixed_point_count(sym, d));
      EXPECT_EQ(mob, static_cast<long long>(n) * prim[n]);
    }
  }
}

TEST(Orbits, SmallFullShiftCensus) {
  auto orbits = primitive_orbits(fx::dyadic(), Potential::constant(1.0), 3);
  std::map<double, int> by_period;
  for (const auto& o : orbits) ++by_period[o.period];
  EXPECT_EQ(by_period[1.0], 2);
  EXPECT_EQ(by_period[2.0], 1);
  EXPECT_EQ(by_period[3.0], 2);
  auto c = primitive_orbits(fx::golden_cantor(), Potential::constant(2.5), 8);
  for (const auto& o : c) EXPECT_DOUBLE_EQ(o.period, 2.5 * o.word.size());
}

TEST(Orbits, PeriodAtTruePeriodicPoint) {
  auto sys = fx::dyadic();
  auto pts = periodic_points(sys, {0, 1});
  EXPECT_NEAR(pts[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(pts[1], 2.0 / 3, 1e-15);
  EXPECT_NEAR(orbit_period(sys, fx::affine_roof(), {0, 1}), 2.5, 1e-14);
  // Dyadic periodic point of w is value(w)/(2^n - 1).
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    int n = 2 + rng() % 15;
    Word w(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = 2 * v + (w[i] = rng() & 1);
    auto p = periodic_points(sys, w);
    EXPECT_NEAR(p[0], static_cast<double>(v) / ((1ull << n) - 1), 1e-14);
  }
  // Nonlinear branches: sigma maps x[r] to x[r+1] through the inverse of the branch.
  auto nl = fx::nonlinear();
  Word w{0, 1, 1, 0, 1};
  auto q = periodic_points(nl, w);
  for (size_t r = 0; r < w.size(); ++r)
    EXPECT_NEAR(nl.branch(w[r], w[(r + 1) % w.size()])(q[(r + 1) % w.size()]), q[r], 1e-14);
}

TEST(Orbits, PeriodsBoundedBelow) {
  auto t = orbit_periods(fx::dyadic(), fx::quad_roof(), 12);
  for (int n = 1; n <= 12; ++n)
    for (double p : t.by_length[n]) EXPECT_GE(p, n * 1.0 - 1e-12);
}

TEST(Orbits, TablePeriodsExact) {
  auto sym = fx::golden();
  auto sys = fx::golden_cantor();
  // tau on depth-2 words 00, 01, 10 (11 inadmissible).
  auto tau = Potential::table(sym, 2, {1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(orbit_period(sys, tau, {0, 1}), 2.0 + 3.0);
  EXPECT_DOUBLE_EQ(orbit_period(sys, tau, {0, 0, 1}), 1.0 + 2.0 + 3.0);
}

TEST(Orbits, FlowEntropy) {
  EXPECT_NEAR(flow_entropy(fx::dyadic(), Potential::constant(1.0), 8), std::log(2.0), 1e-10);
  EXPECT_NEAR(flow_entropy(fx::dyadic(), Potential::constant(2.0), 8), std::log(2.0) / 2, 1e-10);
  EXPECT_NEAR(flow_entropy(fx::golden_cantor(), Potential::constant(1.0), 8), std::log((1 + std::sqrt(5.0)) / 2), 1e-10);
  // (1/n) ln trace(A^n) approaches the same value.
  EXPECT_NEAR(std::log(static_cast<double>(fixed_point_count(fx::golden(), 60))) / 60, std::log((1 + std::sqrt(5.0)) / 2),
              1e-10);
}

TEST(Orbits, LogarithmicIntegral) {
  using boost::math::quadrature::gauss_kronrod;
  // Direct quadrature of dt/ln t, substituted t = e^u.
  for (double x : {2.5, std::exp(2.0), 100.0, 1e6, 1e12}) {
    double oracle = gauss_kronrod<double, 61>::integrate([](double u) { return std::exp(u) / u; }, std::log(2.0), std::log(x), 12, 1e-12);
    EXPECT_NEAR(li(x), oracle, 1e-10 * oracle) << x;
  }
  EXPECT_NEAR(li(std::exp(2.0)), 3.9090705758844, 1e-12);
  EXPECT_NEAR(li(2.0 + 1e-12), 0.0, 1e-11);
  double x = 1e6, L = std::log(x);
  EXPECT_NEAR(li(x) / (x / L), 1 + 1 / L + 2 / (L * L), 0.01);
  try {
    li(2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Orbits, ApproximateGcd) {
  EXPECT_NEAR(approximate_gcd({1.5, 2.0, 2.5, 3.0}), 0.5, 1e-12);
  EXPECT_EQ(approximate_gcd({1.0, std::sqrt(2.0), std::sqrt(3.0)}), 0.0);
}

TEST(Orbits, CountingFullShift) {
  auto r = counting_report(fx::dyadic(), Potential::constant(1.0), {3.5}, 10, 1.0, 8);
  EXPECT_EQ(r.pi[0], 5);
  EXPECT_TRUE(r.lattice);
  EXPECT_NEAR(r.span, 1.0, 1e-12);
  EXPECT_TRUE(r.ratios.empty());
  auto aff = counting_report(fx::dyadic(), fx::affine_roof(), {}, 12, 1.0, 10);
  EXPECT_TRUE(aff.lattice);
  EXPECT_NEAR(aff.span, 0.5, 1e-9);
  auto q = counting_report(fx::dyadic(), fx::quad_roof(), {}, 14, 1.0, 12);
  EXPECT_FALSE(q.lattice);
  EXPECT_EQ(q.ratios.size(), 12u);
  for (size_t i = 1; i < q.pi.size(); ++i) EXPECT_GE(q.pi[i], q.pi[i - 1]);
  for (bool u : q.unbiased) EXPECT_TRUE(u);
  auto biased = counting_report(fx::dyadic(), fx::quad_roof(), {20.0}, 10, 1.0, 10);
  EXPECT_TRUE(biased.truncation_bias);
}

TEST(Orbits, ZetaClosedForm) {
  auto sys = fx::dyadic();
  auto one = Potential::constant(1.0);
  double h = std::log(2.0);
  auto exact = [](cplx s) { return 1.0 / (1.0 - 2.0 * std::exp(-s)); };
  auto z = zeta_truncated(sys, one, 1.0, 60, h);
  EXPECT_EQ(z.method, "transfer-trace");
  EXPECT_LT(std::abs(z.value - exact(1.0)) / std::abs(exact(1.0)), 1e-9);
  // The reported tail bound dominates the actual log error.
  auto z40 = zeta_truncated(sys, one, 1.0, 40, h);
  EXPECT_LE(std::abs(z40.log_value - std::log(exact(1.0))), z40.tail_bound);
  cplx s(1.2, 3.0);
  auto a = zeta_truncated(sys, one, s, 80, h), b = zeta_truncated(sys, one, std::conj(s), 80, h);
  EXPECT_LT(std::abs(a.value - std::conj(b.value)), 1e-15 * std::abs(a.value));
  EXPECT_LT(std::abs(a.value - exact(s)) / std::abs(exact(s)), 1e-10);
  auto r = zeta_truncated(sys, one, 0.9, 40, h);
  EXPECT_EQ(r.value.imag(), 0.0);
  EXPECT_GT(r.value.real(), 0.0);
  EXPECT_TRUE(zeta_truncated(sys, one, 0.5, 10, h).divergent);
}

TEST(Orbits, ZetaSimplePole) {
  auto sys = fx::dyadic();
  double h = std::log(2.0);
  double prev = 1e9;
  for (double eps : {0.04, 0.02, 0.01}) {
    auto z = zeta_truncated(sys, Potential::constant(1.0), h + eps, 6000, h);
    // eps * zeta(h + eps) = eps / (1 - e^{-eps}) -> 1.
    double r = eps * z.value.real();
    EXPECT_NEAR(r, eps / -std::expm1(-eps), 1e-9);
    EXPECT_LT(std::abs(r - 1), prev);
    prev = std::abs(r - 1);
  }
}

TEST(Orbits, ZetaMethodsAgree) {
  auto sys = fx::golden_cantor();
  auto tau = Potential::table(fx::golden(), 2, {1.0, 1.3, 0.9});
  cplx s(1.5, 0.7);
  auto a = zeta_truncated(sys, tau, s, 14, 0.5);
  // Direct sum over primitive orbits and their repetitions.
  cplx lg = 0;
  for (const auto& o : primitive_orbits(sys, tau, 14))
    for (int k = 1; k * static_cast<int>(o.word.size()) <= 14; ++k) lg += std::exp(-s * (k * o.period)) / static_cast<double>(k);
  EXPECT_LT(std::abs(a.log_value - lg), 1e-12);
}
