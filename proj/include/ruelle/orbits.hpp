/**
 * @file orbits.hpp
 * @brief Periodic orbits of the suspension flow: fixed-point counts, primitive
 *        orbit enumeration with periods, flow entropy, prime-orbit counting and
 *        the truncated Ruelle zeta function.
 */
#pragma once
#include <boost/math/special_functions/expint.hpp>

#include "ruelle_operator.hpp"

namespace ruelle {

// trace(A^n); raises Overflow if any entry of A^n leaves uint64.
inline std::uint64_t fixed_point_count(const SymbolicSystem& sym, int n) {
  if (n < 1) fail(ErrorKind::PreconditionViolation, "n must be >= 1");
  int k = sym.k();
  using M = std::vector<std::vector<std::uint64_t>>;
  M A(k, std::vector<std::uint64_t>(k)), P(k, std::vector<std::uint64_t>(k, 0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A[i][j] = sym.allowed(i, j);
  for (int i = 0; i < k; ++i) P[i][i] = 1;
  for (int t = 0; t < n; ++t) {
    M Q(k, std::vector<std::uint64_t>(k, 0));
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) {
        if (!P[i][l]) continue;
        for (int j = 0; j < k; ++j) {
          if (!A[l][j]) continue;
          if (__builtin_add_overflow(Q[i][j], P[i][l], &Q[i][j]))
            fail(ErrorKind::Overflow, "trace(A^" + std::to_string(n) + ") exceeds 64 bits");
        }
      }
    P.swap(Q);
  }
  std::uint64_t tr = 0;
  for (int i = 0; i < k; ++i)
    if (__builtin_add_overflow(tr, P[i][i], &tr)) fail(ErrorKind::Overflow, "trace exceeds 64 bits");
  return tr;
}

// Lyndon words (lexicographically minimal primitive rotations) of length <= n, in order (Duval).
template <class F>
void for_each_lyndon(int k, int n, F&& f) {
  Word w{-1};
  while (!w.empty()) {
    ++w.back();
    f(static_cast<const Word&>(w));
    size_t m = w.size();
    while (static_cast<int>(w.size()) < n) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == k - 1) w.pop_back();
  }
}

inline bool cyclically_admissible(const SymbolicSystem& sym, const Word& w) {
  for (size_t i = 0; i < w.size(); ++i)
    if (!sym.allowed(w[i], w[(i + 1) % w.size()])) return false;
  return true;
}

// Coordinates of the periodic point w^infty and its shifts: x[r] = sigma^r x.
inline std::vector<double> periodic_points(const System& sys, const Word& w) {
  size_t n = w.size();
  Word loop = w;
  loop.push_back(w[0]);
  const Interval& U = sys.U(w[0]);
  double x = 0.5 * (U.lo + U.hi);
  for (int it = 0; it < 200; ++it) {
    double y = sys.compose(loop, x);
    bool done = std::fabs(y - x) < 1e-15;
    x = y;
    if (done) break;
  }
  std::vector<double> pts(n);
  pts[0] = x;
  // Backward along contracting branches: x[r] = g_{w_r, w_{r+1}}(x[r+1]).
  double cur = x;
  for (size_t r = n; r-- > 1;) {
    cur = sys.branch(w[r], w[(r + 1) % n])(cur);
    pts[r] = cur;
  }
  return pts;
}

// tau_n at the periodic point of the cyclic word w.
inline double orbit_period(const System& sys, const Potential& tau, const Word& w) {
  size_t n = w.size();
  if (tau.is_constant()) return tau.constant_value() * static_cast<double>(n);
  if (tau.is_table()) {
    int D = tau.table_depth();
    double acc = 0;
    Word rot(std::max<size_t>(D, 1));
    for (size_t r = 0; r < n; ++r) {
      for (size_t t = 0; t < rot.size(); ++t) rot[t] = w[(r + t) % n];
      acc += tau.at_word(sys, rot);
    }
    return acc;
  }
  double acc = 0;
  for (double x : periodic_points(sys, w)) acc += tau.at_coord(x);
  return acc;
}

struct PeriodicOrbit {
  Word word;
  double period = 0;
};

inline std::vector<PeriodicOrbit> primitive_orbits(const System& sys, const Potential& tau, int n_max) {
  if (n_max < 1) fail(ErrorKind::PreconditionViolation, "n_max must be >= 1");
  std::vector<PeriodicOrbit> out;
  for_each_lyndon(sys.k(), n_max, [&](const Word& w) {
    if (cyclically_admissible(sys.sym(), w)) out.push_back({w, orbit_period(sys, tau, w)});
  });
  return out;
}

// Periods only, grouped by word length; periods[n] is sorted.
struct PeriodTable {
  int n_max = 0;
  std::vector<std::vector<double>> by_length;
  std::size_t words_enumerated = 0;
  std::vector<double> all_sorted() const {
    std::vector<double> v;
    for (const auto& p : by_length) v.insert(v.end(), p.begin(), p.end());
    std::sort(v.begin(), v.end());
    return v;
  }
};

inline PeriodTable orbit_periods(const System& sys, const Potential& tau, int n_max, int threads = 1) {
  PeriodTable t;
  t.n_max = n_max;
  t.by_length.resize(n_max + 1);
  std::vector<Word> batch;
  std::vector<double> out;
  auto flush = [&] {
    out.assign(batch.size(), 0.0);
    parallel_for(static_cast<int>(batch.size()), threads, [&](int i) { out[i] = orbit_period(sys, tau, batch[i]); });
    for (size_t i = 0; i < batch.size(); ++i) t.by_length[batch[i].size()].push_back(out[i]);
    batch.clear();
  };
  for_each_lyndon(sys.k(), n_max, [&](const Word& w) {
    ++t.words_enumerated;
    if (!cyclically_admissible(sys.sym(), w)) return;
    batch.push_back(w);
    if (batch.size() >= 65536) flush();
  });
  flush();
  for (auto& p : t.by_length) std::sort(p.begin(), p.end());
  return t;
}

inline double flow_entropy(const System& sys, const Potential& tau, int depth = 16, double tol = 1e-12) {
  Grid g(sys, depth);
  RealField f(g.num_edges(), 0.0);
  return solve_pressure_root(g, f, tau.on_edges(g), tol);
}

// li(x) = integral of 1/log u over [2, x], as the integral of e^t/t over [ln 2, ln x].
inline double li(double x) {
  if (!(x > 2)) fail(ErrorKind::Domain, "li needs x > 2");
  // li(x) = Ei(ln x) - Ei(ln 2)
  return boost::math::expint(std::log(x)) - boost::math::expint(std::log(2.0));
}

// Approximate gcd of positive reals by Euclid with tolerance; 0 when none above `floor`.
inline double approximate_gcd(const std::vector<double>& v, double tol = 1e-9, double floor = 1e-6) {
  double g = 0;
  for (double p : v) {
    double a = std::max(g, p), b = std::min(g, p);
    if (g == 0) {
      g = p;
      continue;
    }
    while (b > tol) {
      double r = std::fmod(a, b);
      if (b - r < tol) r = 0;
      a = b;
      b = r;
    }
    g = a;
    if (g < floor) return 0;
  }
  return g;
}

struct LatticeReport {
  bool lattice = false;
  double span = 0;
};

inline LatticeReport detect_lattice(const PeriodTable& t, int n_check = 12) {
  std::vector<double> v;
  for (int n = 1; n <= std::min(n_check, t.n_max); ++n) v.insert(v.end(), t.by_length[n].begin(), t.by_length[n].end());
  double scale = v.empty() ? 1 : *std::max_element(v.begin(), v.end());
  LatticeReport r;
  r.span = approximate_gcd(v, 1e-9 * scale, 1e-6);
  r.lattice = r.span > 0;
  return r;
}

struct CountingReport {
  std::vector<double> lambda, pi, li_values, ratios;
  std::vector<bool> unbiased;  // lambda <= n_max tau_min
  double h_T = 0, tau_min = 0;
  bool lattice = false;        // ratios are omitted for lattice roofs
  double span = 0;
  bool truncation_bias = false;
  std::size_t orbits = 0, words_enumerated = 0;
};

inline std::vector<double> default_lambda_grid(int n_max, double tau_min) {
  std::vector<double> g;
  double top = 0.9 * std::ceil(n_max * tau_min);
  for (int i = 1; i <= 12; ++i) g.push_back(top * i / 12);
  return g;
}

inline CountingReport counting_report(const System& sys, const Potential& tau, std::vector<double> lambda_grid, int n_max,
                                      double tau_min, int entropy_depth = 16, int threads = 1) {
  CountingReport r;
  r.tau_min = tau_min;
  PeriodTable t = orbit_periods(sys, tau, n_max, threads);
  r.words_enumerated = t.words_enumerated;
  auto all = t.all_sorted();
  r.orbits = all.size();
  auto lat = detect_lattice(t);
  r.lattice = lat.lattice;
  r.span = lat.span;
  r.h_T = flow_entropy(sys, tau, entropy_depth);
  if (lambda_grid.empty()) lambda_grid = default_lambda_grid(n_max, tau_min);
  for (double lam : lambda_grid) {
    r.lambda.push_back(lam);
    double cnt = static_cast<double>(std::upper_bound(all.begin(), all.end(), lam) - all.begin());
    r.pi.push_back(cnt);
    bool ok = lam <= n_max * tau_min;
    r.unbiased.push_back(ok);
    r.truncation_bias = r.truncation_bias || !ok;
    double x = std::exp(r.h_T * lam);
    double l = x > 2 ? li(x) : 0.0;
    r.li_values.push_back(l);
    if (!r.lattice) r.ratios.push_back(l > 0 ? cnt / l : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

struct ZetaValue {
  cplx value;
  cplx log_value;
  double tail_bound = 0;
  bool divergent = false;  // Re s <= h_T
  std::string method;      // "transfer-trace" or "orbits"
};

// Weighted transfer matrix on words of length max(D-1, 1) for roofs locally constant at depth D.
inline std::vector<std::vector<cplx>> zeta_matrix(const System& sys, const Potential& tau, cplx s) {
  const auto& sym = sys.sym();
  int D = tau.is_constant() ? 1 : tau.table_depth();
  int L = std::max(D - 1, 1);
  auto states = sym.words(L);
  if (states.size() > 4096) fail(ErrorKind::DepthTooLarge, "zeta transfer matrix too large");
  std::map<Word, int> idx;
  for (size_t i = 0; i < states.size(); ++i) idx[states[i]] = static_cast<int>(i);
  std::vector<std::vector<cplx>> B(states.size(), std::vector<cplx>(states.size(), 0.0));
  for (size_t i = 0; i < states.size(); ++i)
    for (int c : sym.successors(states[i].back())) {
      Word ext = states[i];
      ext.push_back(c);
      Word nxt(ext.end() - L, ext.end());
      Word tw(ext.begin(), ext.begin() + std::max(D, 1));
      double tv = tau.is_constant() ? tau.constant_value() : tau.at_word(sys, tw);
      B[i][idx[nxt]] += std::exp(-s * tv);
    }
  return B;
}

inline ZetaValue zeta_truncated(const System& sys, const Potential& tau, cplx s, int n_max, double h_T) {
  ZetaValue z;
  cplx lg = 0;
  if (tau.is_constant() || tau.is_table()) {
    z.method = "transfer-trace";
    auto B = zeta_matrix(sys, tau, s);
    size_t m = B.size();
    auto P = B;
    for (int n = 1; n <= n_max; ++n) {
      cplx tr = 0;
      for (size_t i = 0; i < m; ++i) tr += P[i][i];
      lg += tr / static_cast<double>(n);
      if (n == n_max) break;
      std::vector<std::vector<cplx>> Q(m, std::vector<cplx>(m, 0.0));
      for (size_t i = 0; i < m; ++i)
        for (size_t l = 0; l < m; ++l) {
          if (P[i][l] == 0.0) continue;
          for (size_t j = 0; j < m; ++j) Q[i][j] += P[i][l] * B[l][j];
        }
      P.swap(Q);
    }
  } else {
    z.method = "orbits";
    // log zeta = sum over primitive gamma and k with k |gamma| <= n_max of e^{-s k l(gamma)} / k.
    for_each_lyndon(sys.k(), n_max, [&](const Word& w) {
      if (!cyclically_admissible(sys.sym(), w)) return;
      double l = orbit_period(sys, tau, w);
      int n = static_cast<int>(w.size());
      for (int k = 1; k * n <= n_max; ++k) lg += std::exp(-s * (k * l)) / static_cast<double>(k);
    });
  }
  z.log_value = lg;
  z.value = std::exp(lg);
  z.divergent = !(s.real() > h_T);
  if (!z.divergent) {
    // |sum over period-n points| <= e^{n p} with p = Pr(-Re(s) tau) < 0.
    Grid g(sys, 12);
    RealField te = tau.on_edges(g);
    RealField ge(te.size());
    for (size_t e = 0; e < te.size(); ++e) ge[e] = -s.real() * te[e];
    double p = pressure(g, ge);
    double q = std::exp(p);
    z.tail_bound = q < 1 ? std::pow(q, n_max + 1) / ((n_max + 1) * (1 - q)) : std::numeric_limits<double>::infinity();
  } else {
    z.tail_bound = std::numeric_limits<double>::infinity();
  }
  return z;
}

}  // namespace ruelle
