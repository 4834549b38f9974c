/**
 * @file ruelle_operator.hpp
 * @brief Complex Ruelle operators L_ab = L_{f^(a) - i b tau}, norm
 *        iteration, domination, Lasota-Yorke probe and contraction sweeps.
 */
#pragma once
#include <atomic>
#include <functional>
#include <map>
#include <random>
#include <thread>

#include "thermo.hpp"

namespace ruelle {

// Edge weights e^{f^(a) - i b tau} for a fixed (a, b).
class LabOperator {
 public:
  LabOperator(const Grid& g, const ThermoState& s, double b) : g_(&g), b_(b), w_(g.num_edges()), wa_(g.num_edges()) {
    for (int e = 0; e < g.num_edges(); ++e) {
      wa_[e] = std::exp(s.fa_edge[e]);
      w_[e] = wa_[e] * std::exp(cplx(0, -b * s.tau_edge[e]));
    }
  }
  double b() const { return b_; }
  const Grid& grid() const { return *g_; }
  const RealField& abs_weights() const { return wa_; }
  const std::vector<cplx>& weights() const { return w_; }

  ComplexField apply(const ComplexField& h, int times = 1) const {
    ComplexField cur = h, next(h.size());
    for (int t = 0; t < times; ++t) {
      for (int i = 0; i < g_->size(); ++i) {
        cplx acc = 0;
        for (int e = g_->row_begin(i); e < g_->row_end(i); ++e) acc += w_[e] * cur[g_->edge(e).col];
        next[i] = acc;
      }
      cur.swap(next);
    }
    return cur;
  }
  // M_a = L_{f^(a)}.
  RealField apply_M(const RealField& H, int times = 1) const {
    RealField cur = H, next(H.size());
    for (int t = 0; t < times; ++t) {
      for (int i = 0; i < g_->size(); ++i) {
        double acc = 0;
        for (int e = g_->row_begin(i); e < g_->row_end(i); ++e) acc += wa_[e] * cur[g_->edge(e).col];
        next[i] = acc;
      }
      cur.swap(next);
    }
    return cur;
  }

 private:
  const Grid* g_;
  double b_;
  std::vector<cplx> w_;
  RealField wa_;
};

inline double l2_sq(const RealField& nu, const ComplexField& h) {
  double s = 0;
  for (size_t i = 0; i < h.size(); ++i) s += nu[i] * std::norm(h[i]);
  return s;
}
inline double l2_sq(const RealField& nu, const RealField& h) {
  double s = 0;
  for (size_t i = 0; i < h.size(); ++i) s += nu[i] * h[i] * h[i];
  return s;
}

// exp of the least-squares slope of ln(y_m) against m over m >= 2 (m is 1-based).
inline double fit_rate(const std::vector<double>& y) {
  std::vector<double> xs, ys;
  for (size_t i = 1; i < y.size(); ++i) {
    if (!(y[i] > 0)) break;
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(std::log(y[i]));
  }
  if (xs.size() < 2) fail(ErrorKind::FitFailure, "need at least two positive norms with m >= 2");
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  return std::exp(sxy / sxx);
}

struct NormSeries {
  std::vector<double> l2;      // sqrt of the integral of |L^{Nm} h|^2 d nu, m = 1..m_max
  std::vector<double> lip_b;   // ||L^{Nm} h||_{Lip,b} (when tracked)
  double rho_hat = 1;          // exp of the slope of ln l2 against m, m >= 2
  bool monotone = false;       // strictly decreasing in m
};

inline NormSeries iterate_norms(const LabOperator& L, const RealField& nu, const ComplexField& h, int N, int m_max,
                                bool track_lip = false) {
  if (N < 1 || m_max < 3) fail(ErrorKind::PreconditionViolation, "need N >= 1 and m_max >= 3");
  NormSeries s;
  ComplexField cur = h;
  for (int m = 1; m <= m_max; ++m) {
    cur = L.apply(cur, N);
    s.l2.push_back(std::sqrt(l2_sq(nu, cur)));
    if (track_lip) s.lip_b.push_back(lip_norm_b(L.grid(), cur, L.b()));
  }
  s.monotone = true;
  for (int m = 1; m < m_max; ++m) s.monotone = s.monotone && s.l2[m] < s.l2[m - 1];
  s.rho_hat = fit_rate(s.l2);
  return s;
}

// max over cells of (|L^m h| - M^m |h|)_+ ; zero when domination holds.
inline double domination_violation(const LabOperator& L, const ComplexField& h, int m) {
  ComplexField Lh = L.apply(h, m);
  RealField ah(h.size());
  for (size_t i = 0; i < h.size(); ++i) ah[i] = std::abs(h[i]);
  RealField Mh = L.apply_M(ah, m);
  double worst = 0;
  for (size_t i = 0; i < h.size(); ++i) worst = std::max(worst, std::abs(Lh[i]) - Mh[i] * (1 + 1e-12));
  return worst;
}

// Random tree function: sum over levels of N(0,1) node values times node diameters.
inline RealField random_tree_function(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  RealField phi(g.size(), 0.0);
  for (int l = 1; l <= g.depth(); ++l)
    g.for_each_group(l, [&](int b, int e) {
      double v = N(rng) * g.anc_diam(b, l);
      for (int i = b; i < e; ++i) phi[i] += v;
    });
  return phi;
}

// Random H in the cone K_A: H = exp(phi) with Lip_D(phi) <= ln(1 + A).
inline RealField random_cone_function(const Grid& g, double A, std::mt19937_64& rng) {
  RealField phi = random_tree_function(g, rng);
  double lip = lip_D(g, phi);
  std::uniform_real_distribution<double> U(0.5, 1.0);
  double scale = lip > 0 ? std::log1p(A) * U(rng) / lip : 0.0;
  RealField H(g.size());
  for (int i = 0; i < g.size(); ++i) H[i] = std::exp(scale * phi[i]);
  return H;
}

// Random h with |h| <= H and |h(u) - h(u')| <= B H(u') D(u,u'), given H in K_{B/2}.
inline ComplexField random_dominated(const Grid& g, const RealField& H, double B, std::mt19937_64& rng) {
  RealField th = random_tree_function(g, rng), r = random_tree_function(g, rng);
  double lt = lip_D(g, th), lr = lip_D(g, r);
  double st = lt > 0 ? B / 4 / lt : 0, sr = lr > 0 ? B / lr : 0;
  ComplexField h(g.size());
  for (int i = 0; i < g.size(); ++i) h[i] = H[i] * (0.75 + 0.25 * std::sin(sr * r[i])) * std::exp(cplx(0, st * th[i]));
  return h;
}

// T >= max{ ||f^(a)||_0, Lip f^(a), ||tau||_0, Lip tau } on the depth-(d+1) discretization.
inline double T_constant(const Grid& g, const Grid& g1, const std::vector<const ThermoState*>& states) {
  double T = 0;
  for (const ThermoState* s : states) {
    T = std::max(T, sup_norm(s->fa_edge));
    T = std::max(T, lip_D(g1, edges_as_cells(g, g1, s->fa_edge)));
  }
  if (!states.empty()) {
    T = std::max(T, sup_norm(states.front()->tau_edge));
    T = std::max(T, lip_D(g1, edges_as_cells(g, g1, states.front()->tau_edge)));
  }
  return T;
}

struct LasotaYorkeReport {
  double A0_a = 0, A0_b = 0;  // smallest constants making the two inequalities hold on the samples
  double A0() const { return std::max(A0_a, A0_b); }
  double A0_theory = 0;       // e^{T/(c0(gamma-1))}/c0
  double T = 0;
  int pairs_checked = 0;
};

inline LasotaYorkeReport lasota_yorke_probe(const LabOperator& L, double T, const std::vector<double>& B_list, int m_max,
                                            int trials, std::uint64_t seed) {
  const Grid& g = L.grid();
  const System& sys = g.system();
  double gam = sys.gamma();
  LasotaYorkeReport r;
  r.T = T;
  r.A0_theory = std::exp(T / (sys.c0() * (gam - 1))) / sys.c0();
  std::mt19937_64 rng(seed);
  double absb = std::fabs(L.b());
  for (int t = 0; t < trials; ++t)
    for (double B : B_list) {
      RealField H = random_cone_function(g, B / 2, rng);
      ComplexField h = random_dominated(g, H, B, rng);
      RealField MH = H, Mabs(g.size());
      ComplexField Lh = h;
      for (int m = 1; m <= m_max; ++m) {
        MH = L.apply_M(MH);
        Lh = L.apply(Lh);
        RealField ah(g.size());
        for (int i = 0; i < g.size(); ++i) ah[i] = std::abs(h[i]);
        Mabs = L.apply_M(ah, m);
        double ga = B / std::pow(gam, m) + T / (gam - 1);
        double gb = B / std::pow(gam, m);
        g.for_each_pair([&](int i, int j, double D) {
          for (int pass = 0; pass < 2; ++pass) {
            int u = pass ? j : i, v = pass ? i : j;  // v plays u'
            double da = std::fabs(MH[u] - MH[v]) / (MH[v] * ga * D);
            double db = std::abs(Lh[u] - Lh[v]) / ((gb * MH[v] + absb * Mabs[v]) * D);
            r.A0_a = std::max(r.A0_a, da);
            r.A0_b = std::max(r.A0_b, db);
          }
          ++r.pairs_checked;
        });
      }
    }
  return r;
}

// Default test functions at frequency b, each scaled to ||h||_{Lip,b} = 1.
inline std::vector<ComplexField> default_h_family(const Grid& g, double b) {
  std::vector<ComplexField> fam;
  fam.emplace_back(g.size(), cplx(1, 0));
  int d3 = std::min(3, g.depth());
  ComplexField chi(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    bool in = true;
    for (int t = 0; t < d3; ++t) in = in && g.symbol(i, t) == g.symbol(0, t);
    if (in) chi[i] = 1.0;
  }
  fam.push_back(chi);
  ComplexField ex(g.size());
  for (int i = 0; i < g.size(); ++i) ex[i] = std::exp(cplx(0, g.rep(i)));
  fam.push_back(ex);
  for (auto& h : fam) {
    double n = lip_norm_b(g, h, b);
    for (auto& v : h) v /= n;
  }
  return fam;
}

struct SweepCell {
  double a = 0, b = 0;
  std::vector<NormSeries> series;  // one per h in the family
  double rho_hat = 1;              // worst over the family
  int worst_h = 0;
  bool monotone = false;           // all h strictly decreasing
};

struct SweepResult {
  int depth = 0, N = 0, m_max = 0;
  double P = 0;
  std::vector<SweepCell> cells;
  double refinement_delta = 0;  // max relative change of the first cell's norms at depth+2
  bool all_contracting() const {
    for (const auto& c : cells)
      if (!(c.monotone && c.rho_hat < 1)) return false;
    return true;
  }
};

// Run fn(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i; (i = next++) < n;) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

struct SweepOptions {
  int depth = 12, N = 6, m_max = 8;
  bool track_lip = false;
  bool refine_audit = true;
  int threads = 1;
};

inline SweepResult contraction_sweep(const System& sys, const Potential& f, const Potential& tau,
                                     const std::vector<double>& a_grid, const std::vector<double>& b_grid,
                                     const SweepOptions& opt) {
  for (double b : b_grid)
    if (std::fabs(b) < 1) fail(ErrorKind::PreconditionViolation, "|b| must be >= 1");
  Grid g(sys, opt.depth);
  RealField fe = f.on_edges(g), te = tau.on_edges(g);
  SweepResult res;
  res.depth = opt.depth;
  res.N = opt.N;
  res.m_max = opt.m_max;
  res.P = solve_pressure_root(g, fe, te);
  ThermoState s0 = thermo_state(g, fe, te, res.P, 0.0);
  std::vector<ThermoState> states(a_grid.size());
  parallel_for(static_cast<int>(a_grid.size()), opt.threads,
               [&](int i) { states[i] = a_grid[i] == 0 ? s0 : thermo_state(g, fe, te, res.P, a_grid[i]); });
  res.cells.resize(a_grid.size() * b_grid.size());
  parallel_for(static_cast<int>(res.cells.size()), opt.threads, [&](int c) {
    size_t ia = c / b_grid.size(), ib = c % b_grid.size();
    SweepCell& cell = res.cells[c];
    cell.a = a_grid[ia];
    cell.b = b_grid[ib];
    LabOperator L(g, states[ia], cell.b);
    cell.monotone = true;
    cell.rho_hat = -1;
    auto fam = default_h_family(g, cell.b);
    for (size_t k = 0; k < fam.size(); ++k) {
      cell.series.push_back(iterate_norms(L, s0.mu, fam[k], opt.N, opt.m_max, opt.track_lip));
      cell.monotone = cell.monotone && cell.series.back().monotone;
      if (cell.series.back().rho_hat > cell.rho_hat) {
        cell.rho_hat = cell.series.back().rho_hat;
        cell.worst_h = static_cast<int>(k);
      }
    }
  });
  if (opt.refine_audit && !res.cells.empty()) {
    Grid g2(sys, opt.depth + 2);
    RealField fe2 = f.on_edges(g2), te2 = tau.on_edges(g2);
    double P2 = solve_pressure_root(g2, fe2, te2);
    ThermoState s02 = thermo_state(g2, fe2, te2, P2, 0.0);
    ThermoState sa2 = a_grid[0] == 0 ? s02 : thermo_state(g2, fe2, te2, P2, a_grid[0]);
    LabOperator L2(g2, sa2, b_grid[0]);
    auto fam2 = default_h_family(g2, b_grid[0]);
    NormSeries s2 = iterate_norms(L2, s02.mu, fam2[0], opt.N, opt.m_max);
    const NormSeries& s1 = res.cells[0].series[0];
    for (int m = 0; m < opt.m_max; ++m)
      res.refinement_delta = std::max(res.refinement_delta, std::fabs(s2.l2[m] - s1.l2[m]) / std::max(s1.l2[m], 1e-300));
  }
  return res;
}

struct EventualReport {
  double epsilon = 0;  // smallest epsilon on the grid with no prefactor growth in |b|
  double C = 0, rho = 1;
  double a0_observed = 0, b0_observed = 0;
  bool fitted = false;
};

// Fit ||L^n h||_{Lip,b} <= C rho^n |b|^eps ||h||_{Lip,b} over cells with |b| >= b0.
inline EventualReport eventually_contracting_report(const SweepResult& sw, const std::vector<double>& eps_grid) {
  EventualReport r;
  // a0: largest |a| whose cells all contract; b0: smallest |b| above which every cell contracts.
  std::map<double, bool> ok_b;
  for (const auto& c : sw.cells) {
    bool ok = c.monotone && c.rho_hat < 1;
    auto key = std::fabs(c.b);
    ok_b[key] = ok_b.count(key) ? (ok_b[key] && ok) : ok;
  }
  r.b0_observed = -1;
  for (auto it = ok_b.rbegin(); it != ok_b.rend() && it->second; ++it) r.b0_observed = it->first;
  if (r.b0_observed < 0) fail(ErrorKind::FitFailure, "no contracting cells");
  for (const auto& c : sw.cells)
    if (std::fabs(c.b) >= r.b0_observed) r.a0_observed = std::max(r.a0_observed, std::fabs(c.a));
  // Per-step rate from the Lip_b norms.
  double rho = 0;
  for (const auto& c : sw.cells) {
    if (std::fabs(c.b) < r.b0_observed) continue;
    for (const auto& s : c.series) {
      if (s.lip_b.empty()) fail(ErrorKind::FitFailure, "sweep did not track Lip_b norms");
      rho = std::max(rho, std::pow(fit_rate(s.lip_b), 1.0 / sw.N));
    }
  }
  if (!(rho < 1)) fail(ErrorKind::FitFailure, "no uniform contraction rate (rho = " + std::to_string(rho) + ")");
  r.rho = rho;
  for (double eps : eps_grid) {
    std::vector<double> lb, lc;
    double Cmax = 0;
    for (const auto& c : sw.cells) {
      if (std::fabs(c.b) < r.b0_observed) continue;
      double Ccell = 0;
      for (const auto& s : c.series)
        for (int m = 0; m < static_cast<int>(s.lip_b.size()); ++m) {
          int n = sw.N * (m + 1);
          Ccell = std::max(Ccell, s.lip_b[m] / (std::pow(rho, n) * std::pow(std::fabs(c.b), eps)));
        }
      lb.push_back(std::log(std::fabs(c.b)));
      lc.push_back(std::log(Ccell));
      Cmax = std::max(Cmax, Ccell);
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < lb.size(); ++i) mx += lb[i], my += lc[i];
    mx /= lb.size();
    my /= lb.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lb.size(); ++i) sxy += (lb[i] - mx) * (lc[i] - my), sxx += (lb[i] - mx) * (lb[i] - mx);
    double slope = sxx > 0 ? sxy / sxx : 0;
    if (slope <= 0) {
      r.epsilon = eps;
      r.C = Cmax;
      r.fitted = true;
      return r;
    }
  }
  fail(ErrorKind::FitFailure, "prefactor grows with |b| for every epsilon on the grid");
}

// Per first symbol: range of tau - (u o sigma - u) over depth-d representatives.
struct CoboundaryReport {
  std::vector<double> min_value, max_value;
  double max_spread() const {
    double s = 0;
    for (size_t i = 0; i < min_value.size(); ++i) s = std::max(s, max_value[i] - min_value[i]);
    return s;
  }
};

inline CoboundaryReport coboundary_residual(const System& sys, const Potential& tau, const Expr& u, int depth) {
  Grid g(sys, depth);
  CoboundaryReport r;
  r.min_value.assign(sys.k(), 1e300);
  r.max_value.assign(sys.k(), -1e300);
  for (int i = 0; i < g.size(); ++i) {
    Word w = g.word(i);
    PointRep x{w};
    double xs = coordinate(sys, shift(sys, x));
    double v = tau.at(sys, x) - (u(xs) - u(g.rep(i)));
    r.min_value[w[0]] = std::min(r.min_value[w[0]], v);
    r.max_value[w[0]] = std::max(r.max_value[w[0]], v);
  }
  return r;
}

}  // namespace ruelle
