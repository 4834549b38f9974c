/**
 * @file symbolic.hpp
 * @brief Subshift of finite type, its interval realization, cylinders,
 *        representatives and the cylinder metric D.
 */
#pragma once
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "expr.hpp"

namespace ruelle {

using Word = std::vector<int>;
using Rational = boost::multiprecision::cpp_rational;

inline std::string word_str(const Word& w) {
  std::string s;
  for (int c : w) {
    if (!s.empty() && c >= 10) s += ' ';
    s += std::to_string(c);
  }
  return s;
}

// Exact value of a decimal literal ("0.4", "-1.25e-3", "1/3").
inline Rational parse_rational(const std::string& tok) {
  auto slash = tok.find('/');
  if (slash != std::string::npos)
    return parse_rational(tok.substr(0, slash)) / parse_rational(tok.substr(slash + 1));
  std::string s = tok;
  int exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    exp10 = std::stoi(s.substr(epos + 1));
    s = s.substr(0, epos);
  }
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<int>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("number", "not a number: '" + tok + "'");
  boost::multiprecision::cpp_int num(s);
  boost::multiprecision::cpp_int ten = 1;
  for (int i = 0; i < std::abs(exp10); ++i) ten *= 10;
  Rational r = exp10 >= 0 ? Rational(num * ten) : Rational(num, ten);
  return neg ? -r : r;
}

// Transition matrix over symbols 0..k-1.
class SymbolicSystem {
 public:
  SymbolicSystem() = default;
  explicit SymbolicSystem(std::vector<std::vector<int>> A) : A_(std::move(A)) {
    k_ = static_cast<int>(A_.size());
    if (k_ < 2) throw ConfigError("matrix", "need at least two symbols");
    for (const auto& row : A_) {
      if (static_cast<int>(row.size()) != k_) throw ConfigError("matrix", "matrix is not square");
      for (int v : row)
        if (v != 0 && v != 1) throw ConfigError("matrix", "entries must be 0 or 1");
    }
    M0_ = primitivity_exponent();
    if (M0_ < 0) fail(ErrorKind::NotAperiodic, "no power A^M with M <= k^2 is strictly positive");
    succ_.resize(k_);
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j)
        if (A_[i][j]) succ_[i].push_back(j);
  }

  int k() const { return k_; }
  int M0() const { return M0_; }
  bool allowed(int i, int j) const { return A_[i][j] != 0; }
  const std::vector<std::vector<int>>& matrix() const { return A_; }
  const std::vector<int>& successors(int i) const { return succ_[i]; }
  int first_successor(int i) const { return succ_[i].front(); }

  bool admissible(const Word& w) const {
    for (int c : w)
      if (c < 0 || c >= k_) return false;
    for (size_t i = 0; i + 1 < w.size(); ++i)
      if (!A_[w[i]][w[i + 1]]) return false;
    return true;
  }
  void require_admissible(const Word& w) const {
    if (w.empty() || !admissible(w)) fail(ErrorKind::InadmissibleWord, "'" + word_str(w) + "'");
  }

  // Admissible words of n symbols in lexicographic order.
  std::vector<Word> words(int n) const {
    std::vector<Word> out;
    if (n <= 0) return out;
    Word w(1);
    for (int s = 0; s < k_; ++s) {
      w[0] = s;
      extend(w, n, out);
    }
    return out;
  }

  // Number of admissible words of n symbols (sum of entries of A^(n-1)).
  std::uint64_t count_words(int n) const {
    std::vector<std::uint64_t> v(k_, 1);
    for (int step = 1; step < n; ++step) {
      std::vector<std::uint64_t> nv(k_, 0);
      for (int i = 0; i < k_; ++i)
        for (int j : succ_[i]) nv[i] += v[j];
      v = nv;
    }
    std::uint64_t s = 0;
    for (auto x : v) s += x;
    return s;
  }

 private:
  void extend(Word& w, int n, std::vector<Word>& out) const {
    if (static_cast<int>(w.size()) == n) {
      out.push_back(w);
      return;
    }
    for (int j : succ_[w.back()]) {
      w.push_back(j);
      extend(w, n, out);
      w.pop_back();
    }
  }
  int primitivity_exponent() const {
    std::vector<std::vector<int>> P = A_;
    for (int M = 1; M <= k_ * k_; ++M) {
      bool pos = true;
      for (const auto& r : P)
        for (int v : r) pos = pos && v;
      if (pos) return M;
      std::vector<std::vector<int>> Q(k_, std::vector<int>(k_, 0));
      for (int i = 0; i < k_; ++i)
        for (int l = 0; l < k_; ++l)
          if (P[i][l])
            for (int j = 0; j < k_; ++j) Q[i][j] |= A_[l][j];
      P.swap(Q);
    }
    return -1;
  }

  int k_ = 0;
  int M0_ = -1;
  std::vector<std::vector<int>> A_;
  std::vector<std::vector<int>> succ_;
};

// Inverse branch g_ij : U_j -> U_i, orientation preserving and contracting.
struct Branch {
  enum class Kind { Affine, Expression } kind = Kind::Affine;
  double a = 0.5, b = 0.0;
  std::optional<Rational> a_exact, b_exact;
  Expr e;
  double dlo = 0, dhi = 0;

  static Branch affine(const std::string& a_tok, const std::string& b_tok) {
    Branch br;
    br.kind = Kind::Affine;
    br.a_exact = parse_rational(a_tok);
    br.b_exact = parse_rational(b_tok);
    br.a = br.a_exact->convert_to<double>();
    br.b = br.b_exact->convert_to<double>();
    br.dlo = br.dhi = br.a;
    return br;
  }
  static Branch affine(double a, double b) {
    Branch br;
    br.kind = Kind::Affine;
    br.a = a;
    br.b = b;
    br.a_exact = Rational(a);
    br.b_exact = Rational(b);
    br.dlo = br.dhi = a;
    return br;
  }
  static Branch expression(const std::string& src, double dlo, double dhi) {
    Branch br;
    br.kind = Kind::Expression;
    br.e = Expr(src);
    br.dlo = dlo;
    br.dhi = dhi;
    return br;
  }
  double operator()(double x) const { return kind == Kind::Affine ? a * x + b : e(x); }
  bool exact() const { return kind == Kind::Affine && a_exact && b_exact; }
  Rational apply_exact(const Rational& x) const { return *a_exact * x + *b_exact; }
};

struct Interval {
  double lo = 0, hi = 0;
  double diam() const { return hi - lo; }
};

// SFT together with its interval realization.
class System {
 public:
  System() = default;
  System(SymbolicSystem sym, std::vector<Interval> U, std::vector<std::vector<std::optional<Branch>>> g,
         std::vector<std::pair<Rational, Rational>> U_exact = {})
      : sym_(std::move(sym)), U_(std::move(U)), U_exact_(std::move(U_exact)), g_(std::move(g)) {
    validate();
    derive_constants();
    rep_symbol_.resize(k());
    for (int s = 0; s < k(); ++s) rep_symbol_[s] = continuation_coord(s);
  }

  // Per-symbol IFS on [0,1]: g_ij = maps[i] for every allowed j, U_i = maps[i]([0,1]).
  static System ifs(const SymbolicSystem& sym, const std::vector<Branch>& maps) {
    int k = sym.k();
    std::vector<Interval> U(k);
    std::vector<std::pair<Rational, Rational>> Ue;
    bool exact = true;
    for (int i = 0; i < k; ++i) {
      U[i] = {maps[i](0.0), maps[i](1.0)};
      exact = exact && maps[i].exact();
    }
    if (exact)
      for (int i = 0; i < k; ++i) Ue.push_back({maps[i].apply_exact(0), maps[i].apply_exact(1)});
    std::vector<std::vector<std::optional<Branch>>> g(k, std::vector<std::optional<Branch>>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (sym.allowed(i, j)) g[i][j] = maps[i];
    return System(sym, U, g, Ue);
  }

  const SymbolicSystem& sym() const { return sym_; }
  int k() const { return sym_.k(); }
  const Interval& U(int i) const { return U_[i]; }
  const Branch& branch(int i, int j) const {
    if (!g_[i][j]) fail(ErrorKind::InadmissibleWord, "no branch for transition " + std::to_string(i) + "->" + std::to_string(j));
    return *g_[i][j];
  }
  bool all_affine() const {
    for (int i = 0; i < k(); ++i)
      for (int j : sym_.successors(i))
        if (g_[i][j]->kind != Branch::Kind::Affine) return false;
    return true;
  }
  bool exact() const {
    if (U_exact_.size() != static_cast<size_t>(k())) return false;
    for (int i = 0; i < k(); ++i)
      for (int j : sym_.successors(i))
        if (!g_[i][j]->exact()) return false;
    return true;
  }

  // G_w(x) = g_{w0 w1} o ... o g_{w(n-2) w(n-1)} (x), x in U_{w(n-1)}.
  double compose(const Word& w, double x) const {
    for (size_t t = w.size(); t-- > 1;) x = branch(w[t - 1], w[t])(x);
    return x;
  }
  Interval interval(const Word& w) const {
    sym_.require_admissible(w);
    const Interval& u = U_[w.back()];
    return {compose(w, u.lo), compose(w, u.hi)};
  }
  double diam(const Word& w) const { return interval(w).diam(); }
  std::pair<Rational, Rational> interval_exact(const Word& w) const {
    if (!exact()) fail(ErrorKind::PreconditionViolation, "exact intervals need rational affine branches");
    sym_.require_admissible(w);
    Rational lo = U_exact_[w.back()].first, hi = U_exact_[w.back()].second;
    for (size_t t = w.size(); t-- > 1;) {
      const Branch& br = *g_[w[t - 1]][w[t]];
      lo = br.apply_exact(lo);
      hi = br.apply_exact(hi);
    }
    return {lo, hi};
  }
  Rational diam_exact(const Word& w) const {
    auto iv = interval_exact(w);
    return iv.second - iv.first;
  }

  // Realized coordinate of the representative of [w].
  double rep_coord(const Word& w) const { return compose(w, rep_symbol_[w.back()]); }
  double rep_coord_symbol(int s) const { return rep_symbol_[s]; }

  // Expansion constants: c0 gamma^m d <= d(sigma^m .) <= gamma1^m d / c0.
  double c0() const { return c0_; }
  double gamma() const { return gamma_; }
  double gamma1() const { return gamma1_; }
  void set_constants(double c0, double gamma, double gamma1) {
    if (!(c0 > 0 && c0 <= 1)) throw ConfigError("constants", "c0 must lie in (0,1]");
    if (!(gamma > 1 && gamma1 >= gamma)) throw ConfigError("constants", "need 1 < gamma <= gamma1");
    c0_ = c0;
    gamma_ = gamma;
    gamma1_ = gamma1;
  }

 private:
  void validate() {
    int k = this->k();
    if (static_cast<int>(U_.size()) != k) throw ConfigError("intervals", "need one interval per symbol");
    for (int i = 0; i < k; ++i)
      if (!(U_[i].hi > U_[i].lo)) throw ConfigError("intervals", "empty interval for symbol " + std::to_string(i));
    const double tol = 1e-12;
    for (int i = 0; i < k; ++i) {
      std::vector<Interval> imgs;
      for (int j : sym_.successors(i)) {
        if (!g_[i][j]) throw ConfigError("branches", "missing branch " + std::to_string(i) + " " + std::to_string(j));
        const Branch& br = *g_[i][j];
        if (br.kind == Branch::Kind::Affine) {
          if (!(br.a > 0 && br.a < 1))
            fail(ErrorKind::NonContracting, "affine branch " + std::to_string(i) + " " + std::to_string(j) + " slope not in (0,1)");
        } else {
          if (!(br.dlo > 0 && br.dlo <= br.dhi && br.dhi < 1))
            fail(ErrorKind::NonContracting, "derivative bounds must satisfy 0 < lo <= hi < 1");
          const Interval& u = U_[j];
          for (int s = 0; s <= 256; ++s) {
            double x = u.lo + (u.hi - u.lo) * s / 256.0;
            double d = br.e.dual(x).d;
            if (!(d >= br.dlo * (1 - 1e-9) && d <= br.dhi * (1 + 1e-9)))
              fail(ErrorKind::NonContracting, "branch " + std::to_string(i) + " " + std::to_string(j) +
                                                  " derivative " + std::to_string(d) + " outside declared bounds");
          }
        }
        Interval im{br(U_[j].lo), br(U_[j].hi)};
        if (im.lo < U_[i].lo - tol || im.hi > U_[i].hi + tol)
          fail(ErrorKind::RealizationOverlap, "image of branch " + std::to_string(i) + " " + std::to_string(j) +
                                                  " leaves U_" + std::to_string(i));
        imgs.push_back(im);
      }
      for (size_t a = 0; a < imgs.size(); ++a)
        for (size_t b = a + 1; b < imgs.size(); ++b)
          if (std::min(imgs[a].hi, imgs[b].hi) - std::max(imgs[a].lo, imgs[b].lo) > tol)
            fail(ErrorKind::RealizationOverlap, "sibling images overlap under symbol " + std::to_string(i));
    }
  }

  void derive_constants() {
    double lo = 1, hi = 0;
    for (int i = 0; i < k(); ++i)
      for (int j : sym_.successors(i)) {
        lo = std::min(lo, g_[i][j]->dlo);
        hi = std::max(hi, g_[i][j]->dhi);
      }
    c0_ = 1.0;
    gamma_ = 1.0 / hi;
    gamma1_ = 1.0 / lo;
  }

  // Coordinate of the point s, then smallest admissible successors forever.
  double continuation_coord(int s) const {
    Word path{s};
    // Each step contracts by at least 1/gamma.
    double bound = 1.0;
    while (path.size() < 4000 && bound > 1e-18) {
      path.push_back(sym_.first_successor(path.back()));
      bound /= gamma_;
    }
    const Interval& u = U_[path.back()];
    return compose(path, u.lo);
  }

  SymbolicSystem sym_;
  std::vector<Interval> U_;
  std::vector<std::pair<Rational, Rational>> U_exact_;
  std::vector<std::vector<std::optional<Branch>>> g_;
  std::vector<double> rep_symbol_;
  double c0_ = 1, gamma_ = 2, gamma1_ = 2;
};

// A point given by a finite prefix followed by the smallest admissible continuation.
struct PointRep {
  Word prefix;
  int symbol(const SymbolicSystem& s, size_t i) const {
    if (i < prefix.size()) return prefix[i];
    int c = prefix.back();
    for (size_t t = prefix.size(); t <= i; ++t) c = s.first_successor(c);
    return c;
  }
};

inline PointRep representative(const System& sys, const Word& w) {
  sys.sym().require_admissible(w);
  return PointRep{w};
}
inline double coordinate(const System& sys, const PointRep& p) { return sys.rep_coord(p.prefix); }

inline PointRep shift(const System& sys, const PointRep& p) {
  if (p.prefix.size() >= 2) return PointRep{Word(p.prefix.begin() + 1, p.prefix.end())};
  return PointRep{Word{sys.sym().first_successor(p.prefix.front())}};
}

// D(x,y): 1 if first symbols differ, else diameter of the smallest common cylinder.
inline double metric_D(const System& sys, const PointRep& x, const PointRep& y) {
  size_t L = std::max(x.prefix.size(), y.prefix.size());
  Word common;
  for (size_t i = 0; i <= L; ++i) {
    int a = x.symbol(sys.sym(), i), b = y.symbol(sys.sym(), i);
    if (a != b) {
      if (i == 0) return 1.0;
      return sys.diam(common);
    }
    common.push_back(a);
  }
  // Both sequences continue identically from here on.
  return 0.0;
}

struct DistortionReport {
  double ratio_min = 1, ratio_max = 0;
  double rho = 0;  // Lower co-length-1 ratio bound.
  int p0 = 0;      // Smallest q with all co-length-q ratios <= rho (0 if not found).
  double C1 = 0, rho1 = 0;  // diam(C) <= C1 rho1^n
  double c0r0 = 0;          // diam(C) >= c0r0 / gamma1^n
  int n_max = 0;
};

// Sub-cylinder diameter ratios over all admissible words up to n_max symbols.
inline DistortionReport distortion_ratios(const System& sys, int n_max, int q_max = 12) {
  if (n_max < 2) fail(ErrorKind::PreconditionViolation, "n_max must be at least 2");
  DistortionReport r;
  r.n_max = n_max;
  r.rho1 = 1.0 / sys.gamma();
  r.c0r0 = 1e300;
  for (int n = 1; n <= n_max; ++n) {
    for (const Word& w : sys.sym().words(n)) {
      double d = sys.diam(w);
      r.C1 = std::max(r.C1, d / std::pow(r.rho1, n));
      r.c0r0 = std::min(r.c0r0, d * std::pow(sys.gamma1(), n));
      if (n == n_max) continue;
      for (int j : sys.sym().successors(w.back())) {
        Word c = w;
        c.push_back(j);
        double q = sys.diam(c) / d;
        r.ratio_min = std::min(r.ratio_min, q);
        r.ratio_max = std::max(r.ratio_max, q);
      }
    }
  }
  r.rho = r.ratio_min;
  for (int q = 1; q <= q_max && q < n_max; ++q) {
    double worst = 0;
    for (int n = 1; n + q <= n_max; ++n)
      for (const Word& w : sys.sym().words(n)) {
        double d = sys.diam(w);
        // Descendants of co-length q.
        std::vector<Word> layer{w};
        for (int t = 0; t < q; ++t) {
          std::vector<Word> next;
          for (const Word& u : layer)
            for (int j : sys.sym().successors(u.back())) {
              Word c = u;
              c.push_back(j);
              next.push_back(std::move(c));
            }
          layer.swap(next);
        }
        for (const Word& c : layer) worst = std::max(worst, sys.diam(c) / d);
      }
    if (worst <= r.rho * (1 + 1e-12)) {
      r.p0 = q;
      break;
    }
  }
  return r;
}

}  // namespace ruelle
