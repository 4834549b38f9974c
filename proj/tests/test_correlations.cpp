#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ruelle/correlations.hpp"

using namespace ruelle;

TEST(Correlations, FairCoinKernel) {
  auto sys = fx::dyadic();
  auto m = markov_approximation(sys, Potential::constant(0.0), Potential::constant(1.0), 4);
  EXPECT_NEAR(m.P, std::log(2.0), 1e-12);
  for (double p : m.prob) EXPECT_NEAR(p, 0.5, 1e-12);
  for (double v : m.stationary) EXPECT_NEAR(v, 1.0 / 16, 1e-12);
  EXPECT_LT(m.row_error, 1e-10);
  EXPECT_LT(m.stationarity_error, 1e-12);
}

TEST(Correlations, BernoulliKernel) {
  auto sys = fx::dyadic();
  auto f = Potential::table(fx::full2(), 1, {std::log(1.0 / 3), std::log(2.0 / 3)});
  auto m = markov_approximation(sys, f, Potential::constant(1.0), 5);
  EXPECT_NEAR(m.P, 0.0, 1e-12);
  const Grid& g = *m.grid;
  for (int e = 0; e < g.num_edges(); ++e) EXPECT_NEAR(m.prob[e], g.edge(e).sym == 0 ? 1.0 / 3 : 2.0 / 3, 1e-10);
  for (int c = 0; c < g.size(); ++c) {
    double w = 1;
    for (int t = 0; t < g.depth(); ++t) w *= g.symbol(c, t) == 0 ? 1.0 / 3 : 2.0 / 3;
    EXPECT_NEAR(m.stationary[c], w, 1e-10);
  }
}

TEST(Correlations, GoldenParryKernel) {
  auto sys = fx::golden_cantor();
  auto m = markov_approximation(sys, Potential::constant(0.0), Potential::constant(1.0), 6);
  // Parry measure from the Perron eigenvector of the symmetric matrix [[1,1],[1,0]].
  double phi = (1 + std::sqrt(5.0)) / 2;
  double u[2] = {phi, 1.0};
  double uu = u[0] * u[0] + u[1] * u[1];
  const Grid& g = *m.grid;
  for (int c = 0; c < g.size(); ++c) {
    double oracle = u[g.symbol(c, 0)] * u[g.symbol(c, g.depth() - 1)] / (std::pow(phi, g.depth() - 1) * uu);
    EXPECT_NEAR(m.stationary[c], oracle, 1e-10);
  }
  for (int c = 0; c < g.size(); ++c)
    for (int e = g.row_begin(c); e < g.row_end(c); ++e)
      EXPECT_NEAR(m.prob[e], u[g.edge(e).sym] / (phi * u[g.symbol(c, 0)]), 1e-10);
  EXPECT_LT(m.stationarity_error, 1e-10);
}

TEST(Correlations, OrbitSampleInvariants) {
  auto sys = fx::dyadic();
  auto tau = fx::quad_roof();
  auto m = markov_approximation(sys, Potential::constant(0.0), tau, 8);
  auto o = sample_orbit(m, tau, 20000, 7);
  ASSERT_EQ(o.times.size(), 20001u);
  for (size_t j = 0; j < o.size(); ++j) {
    double inc = o.times[j + 1] - o.times[j];
    EXPECT_GT(inc, 0);
    EXPECT_GE(inc, o.tau_min);
    EXPECT_LE(inc, o.tau_max);
    EXPECT_GE(o.roof[j], 1.0);
    EXPECT_LE(o.roof[j], 1.5);
    EXPECT_NEAR(o.roof[j], 1 + o.coords[j] * o.coords[j] / 2, 1e-15);
    EXPECT_GE(o.coords[j], o.symbols[j] * 0.5);
    EXPECT_LE(o.coords[j], o.symbols[j] * 0.5 + 0.5);
  }
  // Consecutive points are related by the shift: x_j = g_{s_j s_{j+1}}(x_{j+1}).
  for (size_t j = 0; j + 1 < o.size(); ++j)
    EXPECT_NEAR(sys.branch(o.symbols[j], o.symbols[j + 1])(o.coords[j + 1]), o.coords[j], 1e-15);
  auto one = sample_orbit(m, tau, 1, 3);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.times.size(), 2u);
  EXPECT_DOUBLE_EQ(one.times[1], one.roof[0]);
}

TEST(Correlations, SeedingContract) {
  auto sys = fx::dyadic();
  auto m = markov_approximation(sys, Potential::constant(0.0), Potential::constant(1.0), 6);
  auto a = sample_orbit(m, Potential::constant(1.0), 5000, 11), b = sample_orbit(m, Potential::constant(1.0), 5000, 11),
       c = sample_orbit(m, Potential::constant(1.0), 5000, 12);
  EXPECT_EQ(a.symbols, b.symbols);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_NE(a.symbols, c.symbols);
}

TEST(Correlations, CylinderFrequencies) {
  auto sys = fx::dyadic();
  auto m = markov_approximation(sys, Potential::constant(0.0), Potential::constant(1.0), 6);
  const std::size_t L = 1'000'000;
  for (std::uint64_t seed : {1u, 2u}) {
    auto o = sample_orbit(m, Potential::constant(1.0), L, seed);
    std::size_t n01 = 0;
    for (size_t j = 0; j + 1 < L; ++j) n01 += o.symbols[j] == 0 && o.symbols[j + 1] == 1;
    EXPECT_NEAR(static_cast<double>(n01) / (L - 1), 0.25, 0.002);
    std::vector<double> cnt(16, 0);
    for (size_t j = 0; j + 4 <= L; ++j)
      cnt[o.symbols[j] * 8 + o.symbols[j + 1] * 4 + o.symbols[j + 2] * 2 + o.symbols[j + 3]] += 1;
    double n = static_cast<double>(L - 3), p = 1.0 / 16;
    for (double c : cnt) EXPECT_NEAR(c / n, p, 3 * std::sqrt(p * (1 - p) / n));
  }
}

namespace {
// Direct product-moment estimator on the same flow grid, located by binary search.
double direct_C(const OrbitSample& o, const Expr& A, const Expr& B, double dt, long lag, long M) {
  auto value = [&](const Expr& E, long j) {
    double u = j * dt;
    size_t i = std::upper_bound(o.times.begin(), o.times.end(), u) - o.times.begin() - 1;
    return E(o.coords[i], u - o.times[i], o.roof[i]);
  };
  double sab = 0, sa = 0, sb = 0;
  for (long k = 0; k < M; ++k) {
    double a = value(A, k), b = value(B, k + lag);
    sab += a * b;
    sa += a;
    sb += b;
  }
  return sab / M - (sa / M) * (sb / M);
}
}  // namespace

TEST(Correlations, MatchesDirectEstimator) {
  auto sys = fx::dyadic();
  auto tau = fx::quad_roof();
  auto m = markov_approximation(sys, Potential::constant(0.0), tau, 8);
  auto o = sample_orbit(m, tau, 30000, 5);
  Expr A(kDefaultObservable), B("cos(3*x) + y/tau");
  auto cv = suspension_correlation(o, A, B, 2.0, 0.2);
  EXPECT_LE(cv.dt, o.tau_min / 10 + 1e-15);
  long stride = std::lround(0.2 / cv.dt);
  for (int i : {0, 1, 4, 10}) EXPECT_NEAR(cv.C[i], direct_C(o, A, B, cv.dt, i * stride, cv.samples), 1e-10) << i;
}

TEST(Correlations, ConstantObservablesAreUncorrelated) {
  auto sys = fx::dyadic();
  auto tau = fx::quad_roof();
  auto m = markov_approximation(sys, Potential::constant(0.0), tau, 8);
  auto o = sample_orbit(m, tau, 20000, 5);
  auto cv = suspension_correlation(o, Expr("2.5"), Expr("-1"), 4.0, 0.5);
  for (double c : cv.C) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(Correlations, InsufficientSample) {
  auto sys = fx::dyadic();
  auto m = markov_approximation(sys, Potential::constant(0.0), Potential::constant(1.0), 6);
  auto o = sample_orbit(m, Potential::constant(1.0), 500, 1);
  try {
    suspension_correlation(o, Expr("x"), Expr("x"), 8.0, 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientSample);
  }
}

TEST(Correlations, SyntheticFit) {
  CorrelationCurve cv;
  for (int i = 0; i <= 40; ++i) {
    cv.t.push_back(0.2 * i);
    cv.C.push_back(0.5 * std::exp(-0.3 * 0.2 * i));
    cv.stderr_.push_back(0.0);
  }
  auto f = fit_decay_rate(cv, 1.0, 6.0);
  EXPECT_NEAR(f.rate, 0.3, 1e-6);
  EXPECT_NEAR(f.amp, 0.5, 1e-6);
  EXPECT_GT(f.r2, 0.9999);
  cv.stderr_.assign(cv.C.size(), 0.1);
  try {
    fit_decay_rate(cv, 1.0, 6.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BelowNoiseFloor);
  }
}

TEST(Correlations, StandardErrorScaling) {
  auto sys = fx::dyadic();
  auto tau = fx::quad_roof();
  auto m = markov_approximation(sys, Potential::constant(0.0), tau, 8);
  Expr A(kDefaultObservable);
  auto se = [&](std::size_t L) {
    auto cv = suspension_correlation(sample_orbit(m, tau, L, 21), A, A, 2.0, 0.2);
    return cv.stderr_[5];  // t0 = 1
  };
  // Four doublings of L.
  double ratio = se(25'000) / se(400'000);
  EXPECT_GT(ratio, 4 * 0.5);
  EXPECT_LT(ratio, 4 * 1.5);
}

TEST(Correlations, QuadraticDecaysLatticeDoesNot) {
  auto sys = fx::dyadic();
  Expr A(kDefaultObservable);
  CorrelationOptions o;
  o.L = 1'000'000;
  o.seeds = {4};
  auto q = correlation_run(sys, Potential::constant(0.0), fx::quad_roof(), A, A, o);
  ASSERT_TRUE(q.curves[0].fitted) << q.curves[0].fit_error;
  EXPECT_TRUE(q.all_pass());
  EXPECT_GT(q.norm_A, 1.0);
  auto lat = correlation_run(sys, Potential::constant(0.0), Potential::constant(1.0), A, A, o);
  EXPECT_FALSE(lat.any_pass());
}
