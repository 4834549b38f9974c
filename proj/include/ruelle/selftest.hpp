/**
 * @file selftest.hpp
 * @brief Quick closed-form checks run by `ruelle selftest`.
 */
#pragma once
#include <functional>
#include <ostream>

#include "cache.hpp"
#include "correlations.hpp"
#include "dolgopyat.hpp"
#include "orbits.hpp"

namespace ruelle {

namespace selftest_detail {

inline System dyadic() {
  return System::ifs(SymbolicSystem({{1, 1}, {1, 1}}), {Branch::affine("0.5", "0"), Branch::affine("0.5", "0.5")});
}
inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
template <class F>
bool throws(ErrorKind k, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

}  // namespace selftest_detail

inline int run_selftest(std::ostream& out) {
  using namespace selftest_detail;
  const double ln2 = std::log(2.0);
  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"full shift is aperiodic with M0 = 1", [] { return SymbolicSystem({{1, 1}, {1, 1}}).M0() == 1; }},
      {"identity matrix is rejected",
       [] { return throws(ErrorKind::NotAperiodic, [] { SymbolicSystem({{1, 0}, {0, 1}}); }); }},
      {"full 2-shift has 8 words of length 3", [] { return SymbolicSystem({{1, 1}, {1, 1}}).words(3).size() == 8; }},
      {"cylinder 01 is [1/4, 1/2]",
       [] {
         auto I = dyadic().interval({0, 1});
         return I.lo == 0.25 && I.hi == 0.5;
       }},
      {"cylinder 000 has diameter 1/8", [] { return dyadic().diam({0, 0, 0}) == 0.125; }},
      {"representatives of 1 and 01", [] { return dyadic().rep_coord({1}) == 0.5 && dyadic().rep_coord({0, 1}) == 0.25; }},
      {"D(0111.., 0101..) = 1/4", [] {
         auto s = dyadic();
         return metric_D(s, PointRep{{0, 1, 1, 1}}, PointRep{{0, 1, 0, 1}}) == 0.25 && metric_D(s, PointRep{{0, 1}}, PointRep{{0, 1}}) == 0;
       }},
      {"dyadic co-length-1 ratios are 1/2",
       [] {
         auto r = distortion_ratios(dyadic(), 6);
         return r.ratio_min == 0.5 && r.ratio_max == 0.5 && r.p0 == 1;
       }},
      {"Birkhoff sum of tau = 1 over 5 steps is 5",
       [] { return birkhoff_sum(dyadic(), Potential::constant(1.0), 5, PointRep{{0, 1}}) == 5.0; }},
      {"L_0 1 = 2 on the full 2-shift",
       [] {
         auto s = dyadic();
         Grid g(s, 4);
         RealField one(g.size(), 1.0);
         for (double v : transfer_apply(g, exp_field(RealField(g.num_edges(), 0.0)), one))
           if (v != 2.0) return false;
         return true;
       }},
      {"RPF of g = 0: lambda = 2", [&] {
         auto s = dyadic();
         Grid g(s, 6);
         return near(rpf_solve(g, RealField(g.num_edges(), 0.0)).lambda, 2.0, 1e-12);
       }},
      {"RPF of Bernoulli(1/3, 2/3): lambda = 1", [] {
         auto s = dyadic();
         Grid g(s, 6);
         auto f = Potential::table(s.sym(), 1, {std::log(1.0 / 3), std::log(2.0 / 3)});
         return near(rpf_solve(g, f.on_edges(g)).lambda, 1.0, 1e-12);
       }},
      {"pressure of g = 0 is ln 2 and shifts by constants", [&] {
         auto s = dyadic();
         return near(pressure_report(s, Potential::constant(0.0), 8).value, ln2, 1e-12) &&
                near(pressure_report(s, Potential::constant(0.7), 8).value, ln2 + 0.7, 1e-12);
       }},
      {"pressure root: tau = 1 gives ln 2, tau = 2 gives ln 2 / 2", [&] {
         auto s = dyadic();
         Grid g(s, 6);
         RealField z(g.num_edges(), 0.0), one(g.num_edges(), 1.0), two(g.num_edges(), 2.0);
         return near(solve_pressure_root(g, z, one), ln2, 1e-10) && near(solve_pressure_root(g, z, two), ln2 / 2, 1e-10);
       }},
      {"normalized potential is -ln 2 and M_0 1 = 1", [&] {
         auto s = dyadic();
         Grid g(s, 6);
         RealField z(g.num_edges(), 0.0), one(g.num_edges(), 1.0);
         auto st = thermo_state(g, z, one, ln2, 0.0);
         for (double v : st.fa_edge)
           if (!near(v, -ln2, 1e-12)) return false;
         return st.normalization_error < 1e-12;
       }},
      {"constant roof: L_ab 1 = e^{-ib}", [&] {
         auto s = dyadic();
         Grid g(s, 6);
         RealField z(g.num_edges(), 0.0), one(g.num_edges(), 1.0);
         auto st = thermo_state(g, z, one, ln2, 0.0);
         LabOperator L(g, st, 3.0);
         for (cplx v : L.apply(ComplexField(g.size(), 1.0)))
           if (std::abs(v - std::exp(cplx(0, -3.0))) > 1e-12) return false;
         return true;
       }},
      {"constant roof: iterate norms stay 1", [&] {
         auto s = dyadic();
         Grid g(s, 8);
         RealField z(g.num_edges(), 0.0), one(g.num_edges(), 1.0);
         auto st = thermo_state(g, z, one, ln2, 0.0);
         LabOperator L(g, st, 20.0);
         auto ns = iterate_norms(L, st.mu, ComplexField(g.size(), 1.0), 6, 4);
         for (double v : ns.l2)
           if (!near(v, 1.0, 1e-12)) return false;
         return true;
       }},
      {"branch pair for N = 3 is 000 / 100", [] {
         auto p = select_branch_pair(SymbolicSystem({{1, 1}, {1, 1}}), 3);
         return p.v1 == Word{0, 0, 0} && p.v2 == Word{1, 0, 0};
       }},
      {"constant roof has zero temporal increment", [] {
         auto s = dyadic();
         auto r = temporal_increment_bound(s, select_branch_pair(s.sym(), 6), Potential::constant(1.0));
         return r.degenerate && r.delta_hat == 0;
       }},
      {"dyadic partition at eps1/|b| = 0.1: 16 C blocks, 64 D blocks", [] {
         auto s = dyadic();
         auto ps = build_partition(s, select_branch_pair(s.sym(), 6), 10, 1, 0.5, 1, 2);
         return ps.C.size() == 16 && ps.D.size() == 64 && ps.ineq_C && ps.ineq_D;
       }},
      {"trace(A^3) = 8, trace(A) = 2",
       [] { return fixed_point_count(SymbolicSystem({{1, 1}, {1, 1}}), 3) == 8 && fixed_point_count(SymbolicSystem({{1, 1}, {1, 1}}), 1) == 2; }},
      {"flow entropy ln 2 and ln 2 / 2", [&] {
         auto s = dyadic();
         return near(flow_entropy(s, Potential::constant(1.0), 8), ln2, 1e-10) &&
                near(flow_entropy(s, Potential::constant(2.0), 8), ln2 / 2, 1e-10);
       }},
      {"li(2+) = 0", [] { return near(li(2.0 + 1e-12), 0.0, 1e-10); }},
      {"zeta at real s is real and positive", [&] {
         auto z = zeta_truncated(dyadic(), Potential::constant(1.0), 1.0, 40, ln2);
         return z.value.imag() == 0 && z.value.real() > 0;
       }},
      {"fair-coin kernel", [] {
         auto s = dyadic();
         auto m = markov_approximation(s, Potential::constant(0.0), Potential::constant(1.0), 4);
         for (double p : m.prob)
           if (!near(p, 0.5, 1e-12)) return false;
         return true;
       }},
      {"constant observables are uncorrelated", [] {
         auto s = dyadic();
         auto m = markov_approximation(s, Potential::constant(0.0), Potential::constant(1.0), 4);
         auto cv = suspension_correlation(sample_orbit(m, Potential::constant(1.0), 5000, 1), Expr("3"), Expr("3"), 2, 0.5);
         for (double c : cv.C)
           if (!near(c, 0, 1e-12)) return false;
         return true;
       }},
      {"synthetic decay 0.5 e^{-0.3 t}", [] {
         CorrelationCurve cv;
         for (int i = 0; i <= 30; ++i) {
           cv.t.push_back(0.2 * i);
           cv.C.push_back(0.5 * std::exp(-0.06 * i));
           cv.stderr_.push_back(0);
         }
         auto f = fit_decay_rate(cv, 1, 6);
         return near(f.rate, 0.3, 1e-6) && f.r2 > 0.9999;
       }},
      {"cache key: same input same key, depth changes it", [] {
         auto k1 = cache_key("alphabet 2", "pressure", {{"depth", "10"}});
         auto k2 = cache_key("alphabet 2", "pressure", {{"depth", "10"}});
         auto k3 = cache_key("alphabet 2", "pressure", {{"depth", "11"}});
         return k1 == k2 && k1 != k3 && k1.size() == 64;
       }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    std::string why;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      why = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "PASS " : "FAIL ") << name << why << "\n";
    failed += !ok;
  }
  out << (checks.size() - failed) << "/" << checks.size() << " passed\n";
  return failed ? 1 : 0;
}

}  // namespace ruelle
