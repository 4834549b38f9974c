/**
 * @file dolgopyat.hpp
 * @brief Cancellation machinery for one-dimensional realizations: branch pairs
 *        of sigma^N, temporal increments, block partitions, damping functions
 *        beta_J, the operators N_J and the checks built on them.
 *
 * The cancellation cylinders U_0 are the whole domain of the branch pair
 * (n1 = 0), so Z_j = D_j and X_{i,j} = v_i D_j.
 */
#pragma once
#include <array>

#include "ruelle_operator.hpp"

namespace ruelle {

struct BranchPair {
  int N = 0;
  Word v1, v2;
  std::vector<int> domain;  // first symbols u_0 with last(v) -> u_0 allowed
};

inline BranchPair select_branch_pair(const SymbolicSystem& sym, int N) {
  if (N < 2) fail(ErrorKind::PreconditionViolation, "branch pair needs N >= 2");
  BranchPair p;
  p.N = N;
  auto words = sym.words(N);
  p.v1 = words.front();
  // Same tail with another leading symbol.
  for (int s = 0; s < sym.k() && p.v2.empty(); ++s) {
    if (s == p.v1[0] || !sym.allowed(s, p.v1[1])) continue;
    p.v2 = p.v1;
    p.v2[0] = s;
  }
  // Otherwise any admissible word with another leading symbol and the same last symbol.
  for (size_t i = 1; i < words.size() && p.v2.empty(); ++i)
    if (words[i][0] != p.v1[0] && words[i].back() == p.v1.back()) p.v2 = words[i];
  if (p.v2.empty()) fail(ErrorKind::NoAdmissiblePair, "no admissible partner for " + word_str(p.v1));
  for (int s : sym.successors(p.v1.back())) p.domain.push_back(s);
  return p;
}

// tau_N(v(x)) for x in U_s, with v.s admissible.
inline double roof_sum(const System& sys, const Potential& tau, const Word& v, int s, double x) {
  Word w = v;
  w.push_back(s);
  double acc = 0;
  for (size_t j = 0; j < v.size(); ++j) {
    Word tail(w.begin() + j, w.end());
    acc += tau.is_table() || tau.is_constant() ? tau.at_word(sys, tail) : tau.at_coord(sys.compose(tail, x));
  }
  return acc;
}

// Phi(x) = tau_N(v2(x)) - tau_N(v1(x)).
inline double roof_difference(const System& sys, const BranchPair& p, const Potential& tau, int s, double x) {
  return roof_sum(sys, tau, p.v2, s, x) - roof_sum(sys, tau, p.v1, s, x);
}

struct IncrementReport {
  double delta_hat = 0;
  bool degenerate = true;
  int grid_points = 0;
  std::vector<double> history;  // estimate per refinement
};

inline double increment_on_grid(const System& sys, const BranchPair& p, const Potential& tau, int n) {
  double total = 0;
  for (int s : p.domain) total += sys.U(s).diam();
  double best = std::numeric_limits<double>::infinity();
  for (int s : p.domain) {
    const Interval& U = sys.U(s);
    int m = std::max(2, static_cast<int>(std::lround(n * U.diam() / total)));
    double prev = roof_difference(sys, p, tau, s, U.lo), h = U.diam() / (m - 1);
    for (int k = 1; k < m; ++k) {
      double x = k + 1 == m ? U.hi : U.lo + k * h;
      double cur = roof_difference(sys, p, tau, s, x);
      best = std::min(best, std::fabs(cur - prev) / h);
      prev = cur;
    }
  }
  return best;
}

// Refines x4 from grid_size points until the estimate moves by < 10%.
inline IncrementReport temporal_increment_bound(const System& sys, const BranchPair& p, const Potential& tau,
                                                int grid_size = 1024, int max_refinements = 4) {
  if (grid_size < 2) fail(ErrorKind::PreconditionViolation, "grid_size must be >= 2");
  IncrementReport r;
  int n = grid_size;
  r.history.push_back(increment_on_grid(sys, p, tau, n));
  for (int t = 0; t < max_refinements; ++t) {
    n *= 4;
    r.history.push_back(increment_on_grid(sys, p, tau, n));
    double a = r.history[r.history.size() - 2], b = r.history.back();
    if (b < 1e-10 || std::fabs(b - a) < 0.1 * a) break;
  }
  r.grid_points = n;
  r.delta_hat = r.history.back();
  r.degenerate = !(r.delta_hat > 1e-10);
  return r;
}

struct PartitionScheme {
  double b = 0, eps1 = 0, rho = 0;
  int p0 = 1, q0 = 1;
  std::vector<Word> C, D;
  std::vector<int> parent;  // D index -> C index
  bool exact = false;       // inequalities checked in rational arithmetic
  bool ineq_C = true, ineq_D = true;
  std::string violation;
  int max_D_length() const {
    size_t m = 0;
    for (const auto& w : D) m = std::max(m, w.size());
    return static_cast<int>(m);
  }
};

inline PartitionScheme build_partition(const System& sys, const BranchPair& pair, double b, double eps1, double rho,
                                       int p0, int q0, int max_depth = 40) {
  if (std::fabs(b) < 1) fail(ErrorKind::PreconditionViolation, "|b| must be >= 1");
  PartitionScheme ps;
  ps.b = b;
  ps.eps1 = eps1;
  ps.rho = rho;
  ps.p0 = p0;
  ps.q0 = q0;
  double cap = eps1 / std::fabs(b);
  double dom = 0;
  for (int s : pair.domain) dom = std::max(dom, sys.U(s).diam());
  if (!(cap < dom)) fail(ErrorKind::PreconditionViolation, "eps1/|b| must be below the domain diameter");
  const auto& sym = sys.sym();
  std::function<void(Word&)> dfs = [&](Word& w) {
    if (sys.diam(w) <= cap) {
      ps.C.push_back(w);
      return;
    }
    if (static_cast<int>(w.size()) >= max_depth)
      fail(ErrorKind::CapTooSmall, "eps1/|b| = " + fmt_g(cap) + " below depth " + std::to_string(max_depth));
    for (int s : sym.successors(w.back())) {
      w.push_back(s);
      dfs(w);
      w.pop_back();
    }
  };
  for (int s : pair.domain) {
    Word w{s};
    dfs(w);
  }
  int co = p0 * q0;
  for (size_t m = 0; m < ps.C.size(); ++m) {
    std::vector<Word> ext{ps.C[m]};
    for (int t = 0; t < co; ++t) {
      std::vector<Word> nxt;
      for (const Word& w : ext)
        for (int s : sym.successors(w.back())) {
          nxt.push_back(w);
          nxt.back().push_back(s);
        }
      ext.swap(nxt);
    }
    for (auto& w : ext) {
      ps.D.push_back(std::move(w));
      ps.parent.push_back(static_cast<int>(m));
    }
  }
  // Diameter inequalities for C and D blocks.
  ps.exact = sys.exact();
  auto note = [&](bool& flag, const std::string& what, const Word& w) {
    if (flag) ps.violation = what + " fails for " + word_str(w);
    flag = false;
  };
  if (ps.exact) {
    Rational r(rho), capr = Rational(eps1) / abs(Rational(b));
    Rational rq = 1, rpq = r;
    for (int t = 0; t < q0; ++t) rq *= r;
    for (int t = 0; t < co; ++t) rpq *= r;
    for (const Word& w : ps.C) {
      Rational d = sys.diam_exact(w);
      if (!(r * capr <= d && d <= capr)) note(ps.ineq_C, "C-block bound", w);
    }
    for (const Word& w : ps.D) {
      Rational d = sys.diam_exact(w);
      if (!(rpq * capr <= d && d <= rq * capr)) note(ps.ineq_D, "D-block bound", w);
    }
  } else {
    const double tol = 1e-12;
    for (const Word& w : ps.C) {
      double d = sys.diam(w);
      if (!(rho * cap <= d * (1 + tol) && d <= cap * (1 + tol))) note(ps.ineq_C, "C-block bound", w);
    }
    for (const Word& w : ps.D) {
      double d = sys.diam(w);
      if (!(std::pow(rho, co + 1) * cap <= d * (1 + tol) && d <= std::pow(rho, q0) * cap * (1 + tol)))
        note(ps.ineq_D, "D-block bound", w);
    }
  }
  return ps;
}

struct MeasuredConstants {
  double c0 = 1, gamma = 2, gamma1 = 2, rho = 0.5, c0r0 = 1;
  int p0 = 1;
  double C0 = 0;                  // Lipschitz constant of a -> f^(a)
  double c1 = 1, c2 = 1;          // Gibbs constants
  double g_sup = 0;               // sup |f^(0)|
  double T = 0;
  double A0 = 1, A0_measured = 0;  // A0 >= 1 as the Lasota-Yorke constant must be
  double delta_hat = 0;
};

struct DolgopyatParams {
  double E = 0, eps1 = 0, mu = 0;
  int N = 0, q0 = 1;
  double c2 = 0;  // phase-gap constant delta_hat rho / 16
  double S = 0, d_S = 0, eps_prime = 0, eps2 = 0, a0 = 0;
  double gamma_N_required = 0;  // right side of the lower bound on gamma^N
  bool certified = true;
  std::vector<std::string> overrides;
  // Lipschitz bound for beta at frequency b.
  double Gamma(const MeasuredConstants& k, double b) const {
    return 2 * mu * std::pow(k.gamma1, N) / (k.c0 * std::pow(k.rho, k.p0 * q0 + 2)) * std::fabs(b) / eps1;
  }
};

namespace detail {
inline void finish_params(DolgopyatParams& P, const MeasuredConstants& k, bool third_mu_term) {
  double rpq2 = std::pow(k.rho, k.p0 * P.q0 + 2);
  P.mu = std::min(0.25, k.c0 * rpq2 * P.eps1 / (4 * std::pow(k.gamma1, P.N)));
  if (third_mu_term) {
    double s = std::sin(k.delta_hat * k.rho * P.eps1 / 256);
    P.mu = std::min(P.mu, s * s / (4 * std::exp(2 * k.T * P.N)));
  }
  P.c2 = k.delta_hat * k.rho / 16;
  P.S = 1 / (k.c0 * k.c0 * std::pow(k.rho, k.p0 * P.q0 + 1));
  P.d_S = k.c1 / k.c2 * std::exp(-k.p0 * k.g_sup * (std::log(P.S) / std::fabs(std::log(k.rho)) + 1));
  double x = P.E * P.eps1 / k.c0;
  P.eps_prime = P.d_S / std::exp(x * x);
  P.eps2 = P.eps_prime * P.mu * std::exp(-P.N * k.T) / 4;
  P.a0 = k.C0 > 0 ? std::log1p(P.eps2) / (k.C0 * P.N) : std::numeric_limits<double>::infinity();
}
}  // namespace detail

inline DolgopyatParams compute_params(const MeasuredConstants& k, double theta0 = 0.9, double theta1 = 0.95) {
  if (!(k.delta_hat > 0)) fail(ErrorKind::DegenerateRoof, "temporal increment estimate is zero");
  DolgopyatParams P;
  P.E = std::max(4 * k.A0, 2 * k.A0 * k.T / (k.gamma - 1));
  P.gamma_N_required = std::max({6 * k.A0, 200 * k.A0 / (k.c0 * k.c0), 512 * P.E / (k.c0 * k.delta_hat * k.rho)});
  P.N = 2;
  while (std::pow(k.gamma, P.N) < P.gamma_N_required) ++P.N;
  P.eps1 = std::min({k.C0 > 0 ? 1 / (32 * k.C0) : std::numeric_limits<double>::infinity(), k.c1, 1 / (4 * P.E),
                     1 / (k.delta_hat * std::pow(k.rho, k.p0 + 2)), k.c0r0,
                     k.c0 * k.c0 * (k.gamma - 1) / (16 * std::max(k.T, 1e-300))});
  P.q0 = 1;
  while (!(theta0 < theta1 - 32 * std::pow(k.rho, P.q0 - 1))) ++P.q0;
  detail::finish_params(P, k, true);
  return P;
}

// User overrides of N, eps1 and q0; mu drops the sin^2 term (see README).
inline DolgopyatParams desk_params(const MeasuredConstants& k, const DolgopyatParams& cert, int N, double eps1, int q0) {
  DolgopyatParams P = cert;
  P.certified = false;
  P.overrides.clear();
  if (N != cert.N) P.overrides.push_back("N=" + std::to_string(N) + " (certified " + std::to_string(cert.N) + ")");
  if (eps1 != cert.eps1) P.overrides.push_back("eps1=" + fmt_g(eps1) + " (certified " + fmt_g(cert.eps1) + ")");
  if (q0 != cert.q0) P.overrides.push_back("q0=" + std::to_string(q0) + " (certified " + std::to_string(cert.q0) + ")");
  P.overrides.push_back("mu without the sin^2 term");
  P.N = N;
  P.eps1 = eps1;
  P.q0 = q0;
  detail::finish_params(P, k, false);
  return P;
}

// Cells [first, last) whose words start with w.
inline std::pair<int, int> cylinder_cells(const Grid& g, const Word& w) {
  int n = static_cast<int>(w.size());
  auto cmp = [&](int cell) {
    for (int t = 0; t < n; ++t) {
      int s = g.symbol(cell, t);
      if (s != w[t]) return s < w[t] ? -1 : 1;
    }
    return 0;
  };
  int lo = 0, hi = g.size();
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (cmp(mid) < 0) lo = mid + 1;
    else hi = mid;
  }
  int first = lo;
  hi = g.size();
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (cmp(mid) <= 0) lo = mid + 1;
    else hi = mid;
  }
  return {first, lo};
}

// For each cell u and i = 1,2: f^(a)_N and tau_N along v_i(u), and the cell reached.
struct BranchPaths {
  std::array<RealField, 2> fN, tauN;
  std::array<std::vector<int>, 2> end;  // -1 when u is outside the pair's domain
};

inline BranchPaths branch_paths(const Grid& g, const ThermoState& s, const BranchPair& p) {
  BranchPaths bp;
  for (int i = 0; i < 2; ++i) {
    const Word& v = i == 0 ? p.v1 : p.v2;
    bp.fN[i].assign(g.size(), 0.0);
    bp.tauN[i].assign(g.size(), 0.0);
    bp.end[i].assign(g.size(), -1);
    for (int u = 0; u < g.size(); ++u) {
      int cur = u;
      double fa = 0, ta = 0;
      for (int t = p.N - 1; t >= 0 && cur >= 0; --t) {
        int e = g.edge_of(cur, v[t]);
        if (e < 0) {
          cur = -1;
          break;
        }
        fa += s.fa_edge[e];
        ta += s.tau_edge[e];
        cur = g.edge(e).col;
      }
      bp.fN[i][u] = fa;
      bp.tauN[i][u] = ta;
      bp.end[i][u] = cur;
    }
  }
  return bp;
}

struct IndexSet {
  std::vector<std::pair<int, int>> J;  // (i in {1,2}, D index)
  bool dense = false;
  int failing_block = -1;
};

inline RealField build_beta(const Grid& g, const PartitionScheme& ps, const BranchPair& p, const IndexSet& J, double mu) {
  if (g.depth() < p.N + ps.max_D_length())
    fail(ErrorKind::PreconditionViolation, "grid depth " + std::to_string(g.depth()) + " cannot resolve X blocks of length " +
                                               std::to_string(p.N + ps.max_D_length()));
  RealField beta(g.size(), 1.0);
  std::vector<char> hit(g.size(), 0);
  for (auto [i, j] : J.J) {
    Word x = i == 1 ? p.v1 : p.v2;
    x.insert(x.end(), ps.D[j].begin(), ps.D[j].end());
    auto [a, b] = cylinder_cells(g, x);
    for (int c = a; c < b; ++c) {
      if (hit[c]) fail(ErrorKind::OverlappingSupports, "X blocks overlap at " + word_str(g.word(c)));
      hit[c] = 1;
      beta[c] = 1 - mu;
    }
  }
  return beta;
}

// (N_J H) = M_a^N (beta H).
inline RealField apply_NJ(const LabOperator& L, int N, const RealField& beta, const RealField& H) {
  RealField bh(H.size());
  for (size_t i = 0; i < H.size(); ++i) bh[i] = beta[i] * H[i];
  return L.apply_M(bh, N);
}

struct ChiValues {
  RealField chi1, chi2;  // 0 outside the pair's domain
};

inline ChiValues chi_functions(const Grid& g, const LabOperator& L, const BranchPaths& bp, double mu, const ComplexField& h,
                               const RealField& H) {
  ChiValues c;
  c.chi1.assign(g.size(), 0.0);
  c.chi2.assign(g.size(), 0.0);
  for (int u = 0; u < g.size(); ++u) {
    int e1 = bp.end[0][u], e2 = bp.end[1][u];
    if (e1 < 0 || e2 < 0) continue;
    double w1 = std::exp(bp.fN[0][u]), w2 = std::exp(bp.fN[1][u]);
    cplx t1 = w1 * std::exp(cplx(0, -L.b() * bp.tauN[0][u])) * h[e1];
    cplx t2 = w2 * std::exp(cplx(0, -L.b() * bp.tauN[1][u])) * h[e2];
    double num = std::abs(t1 + t2);
    c.chi1[u] = num / ((1 - mu) * w1 * H[e1] + w2 * H[e2]);
    c.chi2[u] = num / (w1 * H[e1] + (1 - mu) * w2 * H[e2]);
  }
  return c;
}

inline IndexSet dense_J_construct(const Grid& g, const LabOperator& L, const BranchPaths& bp, const PartitionScheme& ps,
                                  double mu, const ComplexField& h, const RealField& H, bool throw_on_failure = true) {
  ChiValues c = chi_functions(g, L, bp, mu, h, H);
  IndexSet J;
  std::vector<char> covered(ps.C.size(), 0);
  for (size_t j = 0; j < ps.D.size(); ++j) {
    auto [a, b] = cylinder_cells(g, ps.D[j]);
    if (a == b) continue;
    double m1 = 0, m2 = 0;
    for (int u = a; u < b; ++u) m1 = std::max(m1, c.chi1[u]), m2 = std::max(m2, c.chi2[u]);
    int i = m1 <= 1 ? 1 : (m2 <= 1 ? 2 : 0);
    if (i) {
      J.J.emplace_back(i, static_cast<int>(j));
      covered[ps.parent[j]] = 1;
    }
  }
  J.dense = true;
  for (size_t m = 0; m < ps.C.size(); ++m)
    if (!covered[m]) {
      J.dense = false;
      J.failing_block = static_cast<int>(m);
      if (throw_on_failure) fail(ErrorKind::DensenessFailure, "no admissible D block in C block " + word_str(ps.C[m]));
      break;
    }
  return J;
}

// Largest |L^N h| / (N_J H) - 1 over cells, and the worst Lipschitz-half ratio
// |L^N h(u) - L^N h(u')| / (E|b| (N_J H)(u') D(u,u')).
struct DominationReport {
  int violations = 0;
  double max_excess = 0;
  double lipschitz_ratio = 0;
};

inline DominationReport verify_pointwise_domination(const Grid& g, const LabOperator& L, int N, const ComplexField& h,
                                                    const RealField& NH, double E) {
  DominationReport r;
  ComplexField Lh = L.apply(h, N);
  for (int u = 0; u < g.size(); ++u) {
    double ex = std::abs(Lh[u]) - NH[u];
    if (ex > 1e-12 * NH[u]) ++r.violations;
    r.max_excess = std::max(r.max_excess, ex / NH[u]);
  }
  double Eb = E * std::fabs(L.b());
  g.for_each_pair([&](int i, int j, double D) {
    double d = std::abs(Lh[i] - Lh[j]);
    r.lipschitz_ratio = std::max(r.lipschitz_ratio, d / (Eb * std::min(NH[i], NH[j]) * D));
  });
  return r;
}

inline double l2_ratio(const RealField& nu, const RealField& NH, const RealField& H) { return l2_sq(nu, NH) / l2_sq(nu, H); }

// Largest |gamma(u) - gamma(u')| deficit for D blocks at gap >= diam(C)/2 inside one C block,
// and the largest spread of gamma within one D block.
struct PhaseReport {
  double min_gap_ratio = std::numeric_limits<double>::infinity();  // min |dgamma| / (c2 eps1); >= 1 passes
  double max_spread = 0;                                            // must stay below 1/8
  int separated_pairs = 0;
};

inline PhaseReport phase_gap_check(const Grid& g, const BranchPaths& bp, const PartitionScheme& ps, double b,
                                   double c2, double eps1) {
  PhaseReport r;
  const System& sys = g.system();
  std::vector<double> lo(ps.D.size()), hi(ps.D.size());
  std::vector<std::pair<int, int>> cells(ps.D.size());
  auto gam = [&](int u) { return b * (bp.tauN[1][u] - bp.tauN[0][u]); };
  for (size_t j = 0; j < ps.D.size(); ++j) {
    cells[j] = cylinder_cells(g, ps.D[j]);
    lo[j] = 1e300;
    hi[j] = -1e300;
    for (int u = cells[j].first; u < cells[j].second; ++u) lo[j] = std::min(lo[j], gam(u)), hi[j] = std::max(hi[j], gam(u));
    if (cells[j].first < cells[j].second) r.max_spread = std::max(r.max_spread, hi[j] - lo[j]);
  }
  for (size_t j = 0; j < ps.D.size(); ++j)
    for (size_t k = j + 1; k < ps.D.size() && ps.parent[k] == ps.parent[j]; ++k) {
      Interval a = sys.interval(ps.D[j]), c = sys.interval(ps.D[k]);
      double gap = std::max(c.lo - a.hi, a.lo - c.hi);
      if (gap < sys.diam(ps.C[ps.parent[j]]) / 2) continue;
      if (cells[j].first == cells[j].second || cells[k].first == cells[k].second) continue;
      ++r.separated_pairs;
      double d = std::max(0.0, std::max(lo[k] - hi[j], lo[j] - hi[k]));
      r.min_gap_ratio = std::min(r.min_gap_ratio, d / (c2 * eps1));
    }
  return r;
}

struct SuiteOptions {
  int N = 6;
  double b = 10, eps1 = 1, a = 0;
  int q0 = 2;
  int depth = 12;
  int cone_trials = 50, l2_trials = 20, chain_steps = 4;
  std::uint64_t seed = 1;
  int ly_trials = 4;
};

struct SuiteReport {
  MeasuredConstants k;
  IncrementReport inc;
  DolgopyatParams certified, desk;
  BranchPair pair;
  PartitionScheme ps;
  double Gamma = 0;
  // beta bounds with the densest J = all (1, j)
  double beta_min = 1, beta_max = 1, beta_lip = 0;
  bool beta_ok = false;
  // cone preservation
  double cone_worst = 0, cone_bound = 0;
  bool cone_ok = false;
  // dense J and L^2 contraction
  int dense_failures = 0;
  double l2_max = 0;
  bool l2_ok = false;
  // (5.17) and the Lipschitz half
  int domination_violations = 0;
  double lipschitz_worst = 0;
  bool domination_ok = false;
  PhaseReport phase;
  bool phase_ok = false;
  // iterated domination: int |L^{Nm} h|^2 <= int H_m^2
  std::vector<double> chain_h2, chain_H2;
  bool chain_ok = false;
  bool partition_ok() const { return ps.ineq_C && ps.ineq_D; }
  bool all_ok() const { return partition_ok() && beta_ok && cone_ok && l2_ok && domination_ok; }
};

inline MeasuredConstants measure_constants(const Grid& g, const Grid& g1, const ThermoState& s0, const Potential& f,
                                           const Potential& tau, double b, int ly_trials, std::uint64_t seed) {
  const System& sys = g.system();
  MeasuredConstants k;
  auto dr = distortion_ratios(sys, std::min(g.depth(), 10));
  k.c0 = sys.c0();
  k.gamma = sys.gamma();
  k.gamma1 = sys.gamma1();
  k.rho = dr.rho;
  k.p0 = dr.p0;
  k.c0r0 = dr.c0r0;
  k.C0 = fit_C0(g, s0, {-0.01, 0.01});
  auto gb = gibbs_bounds(g, s0, f, tau, std::min(g.depth(), 10));
  k.c1 = gb.c1;
  k.c2 = gb.c2;
  k.g_sup = sup_norm(s0.fa_edge);
  k.T = T_constant(g, g1, {&s0});
  int lyd = std::min(g.depth(), 10);
  Grid gl(sys, lyd);
  RealField fe = f.on_edges(gl), te = tau.on_edges(gl);
  ThermoState sl = thermo_state(gl, fe, te, s0.P, s0.a);
  LabOperator L(gl, sl, b);
  k.A0_measured = lasota_yorke_probe(L, k.T, {1, 10, 100}, 5, ly_trials, seed).A0();
  k.A0 = std::max(1.0, k.A0_measured);
  return k;
}

inline SuiteReport dolgopyat_suite(const System& sys, const Potential& f, const Potential& tau, const SuiteOptions& o) {
  SuiteReport R;
  R.pair = select_branch_pair(sys.sym(), o.N);
  R.inc = temporal_increment_bound(sys, R.pair, tau);
  Grid g(sys, o.depth), g1(sys, o.depth + 1);
  RealField fe = f.on_edges(g), te = tau.on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  ThermoState s0 = thermo_state(g, fe, te, P, 0.0);
  ThermoState sa = o.a == 0 ? s0 : thermo_state(g, fe, te, P, o.a);
  R.k = measure_constants(g, g1, s0, f, tau, o.b, o.ly_trials, o.seed);
  R.k.delta_hat = R.inc.delta_hat;
  R.certified = compute_params(R.k, 0.9, 0.95);
  R.desk = desk_params(R.k, R.certified, o.N, o.eps1, o.q0);
  const DolgopyatParams& D = R.desk;
  R.ps = build_partition(sys, R.pair, o.b, D.eps1, R.k.rho, R.k.p0, D.q0, o.depth);
  R.Gamma = D.Gamma(R.k, o.b);
  LabOperator L(g, sa, o.b);
  BranchPaths bp = branch_paths(g, sa, R.pair);

  IndexSet all;
  for (size_t j = 0; j < R.ps.D.size(); ++j) all.J.emplace_back(1, static_cast<int>(j));
  RealField beta = build_beta(g, R.ps, R.pair, all, D.mu);
  R.beta_min = *std::min_element(beta.begin(), beta.end());
  R.beta_max = *std::max_element(beta.begin(), beta.end());
  R.beta_lip = lip_D(g, beta);
  R.beta_ok = R.beta_min >= 1 - D.mu - 1e-15 && R.beta_max <= 1 && R.beta_lip <= R.Gamma;

  double Eb = D.E * std::fabs(o.b);
  R.cone_bound = Eb;
  std::mt19937_64 rng(o.seed);
  R.cone_ok = true;
  for (int t = 0; t < o.cone_trials; ++t) {
    RealField H = random_cone_function(g, Eb, rng);
    ComplexField h = random_dominated(g, H, Eb, rng);
    IndexSet J = dense_J_construct(g, L, bp, R.ps, D.mu, h, H, false);
    RealField NH = apply_NJ(L, D.N, build_beta(g, R.ps, R.pair, J, D.mu), H);
    double cc = cone_constant(g, NH);
    R.cone_worst = std::max(R.cone_worst, cc);
    R.cone_ok = R.cone_ok && cc <= Eb;
  }

  R.l2_ok = R.domination_ok = true;
  for (int t = 0; t < o.l2_trials; ++t) {
    RealField H = random_cone_function(g, Eb / 2, rng);
    ComplexField h = random_dominated(g, H, Eb, rng);
    IndexSet J = dense_J_construct(g, L, bp, R.ps, D.mu, h, H, false);
    if (!J.dense) {
      ++R.dense_failures;
      R.l2_ok = R.domination_ok = false;
      continue;
    }
    RealField NH = apply_NJ(L, D.N, build_beta(g, R.ps, R.pair, J, D.mu), H);
    double ratio = l2_ratio(s0.mu, NH, H);
    R.l2_max = std::max(R.l2_max, ratio);
    R.l2_ok = R.l2_ok && ratio < 1;
    auto dom = verify_pointwise_domination(g, L, D.N, h, NH, D.E);
    R.domination_violations += dom.violations;
    R.lipschitz_worst = std::max(R.lipschitz_worst, dom.lipschitz_ratio);
  }
  R.domination_ok = R.domination_ok && R.domination_violations == 0 && R.lipschitz_worst <= 1;

  R.phase = phase_gap_check(g, bp, R.ps, o.b, D.c2, D.eps1);
  R.phase_ok = R.phase.max_spread < 0.125 && R.phase.min_gap_ratio >= 1;

  // Iterated domination along one orbit of (h, H).
  {
    RealField H = random_cone_function(g, Eb / 2, rng);
    ComplexField h = random_dominated(g, H, Eb, rng);
    R.chain_ok = true;
    for (int m = 0; m < o.chain_steps; ++m) {
      IndexSet J = dense_J_construct(g, L, bp, R.ps, D.mu, h, H, false);
      if (!J.dense) {
        R.chain_ok = false;
        break;
      }
      H = apply_NJ(L, D.N, build_beta(g, R.ps, R.pair, J, D.mu), H);
      h = L.apply(h, D.N);
      R.chain_h2.push_back(l2_sq(s0.mu, h));
      R.chain_H2.push_back(l2_sq(s0.mu, H));
      R.chain_ok = R.chain_ok && R.chain_h2.back() <= R.chain_H2.back() * (1 + 1e-12);
    }
  }
  return R;
}

}  // namespace ruelle
