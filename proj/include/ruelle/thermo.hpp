/**
 * @file thermo.hpp
 * @brief Potentials, transfer operator L_g, Ruelle-Perron-Frobenius data,
 *        pressure, the pressure root P and normalized potentials f^(a).
 */
#pragma once
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "grid.hpp"

namespace ruelle {

// Real function on the shift: a table over admissible words of a fixed
// depth, or an expression in the realized coordinate x.
class Potential {
 public:
  Potential() = default;

  static Potential constant(double c) {
    Potential p;
    p.const_ = c;
    p.is_const_ = true;
    p.name_ = "const";
    return p;
  }
  static Potential expression(const std::string& src, std::string name = "expr") {
    Potential p;
    p.expr_ = Expr(src);
    p.name_ = std::move(name);
    p.is_const_ = !p.expr_.uses('x');
    if (p.is_const_) p.const_ = p.expr_(0.0);
    return p;
  }
  // values[i] belongs to the i-th admissible word of `depth` symbols (lexicographic).
  static Potential table(const SymbolicSystem& sym, int depth, const std::vector<double>& values, std::string name = "table") {
    if (depth < 1) throw ConfigError("depth", "table depth must be >= 1");
    auto ws = sym.words(depth);
    if (ws.size() != values.size())
      throw ConfigError("values", "expected " + std::to_string(ws.size()) + " values for depth " + std::to_string(depth) + ", got " + std::to_string(values.size()));
    Potential p;
    p.name_ = std::move(name);
    p.depth_ = depth;
    p.k_ = sym.k();
    p.by_code_.assign(static_cast<size_t>(std::pow(sym.k(), depth)), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < ws.size(); ++i) p.by_code_[p.code(ws[i].data())] = values[i];
    p.is_const_ = false;
    return p;
  }

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  bool is_table() const { return depth_ > 0; }
  bool is_constant() const { return is_const_; }
  double constant_value() const { return const_; }
  int table_depth() const { return depth_; }
  // Locally constant at this depth (0 for constants, -1 if not locally constant).
  int lc_depth() const { return is_const_ ? 0 : (depth_ > 0 ? depth_ : -1); }
  const Expr& expr() const { return expr_; }
  double declared_min() const { return declared_min_; }
  void set_declared_min(double v) { declared_min_ = v; }

  double at(const System& sys, const PointRep& p) const {
    if (is_const_) return const_;
    if (depth_ > 0) {
      int w[64];
      for (int t = 0; t < depth_; ++t) w[t] = p.symbol(sys.sym(), t);
      return by_code_[code(w)];
    }
    return expr_(coordinate(sys, p));
  }
  double at_coord(double x) const {
    if (is_const_) return const_;
    if (depth_ > 0) fail(ErrorKind::PreconditionViolation, "table potential has no coordinate form");
    return expr_(x);
  }
  double at_word(const System& sys, const Word& w) const { return at(sys, PointRep{w}); }

  // Values on transfer-operator edges (words s.w of d+1 symbols).
  RealField on_edges(const Grid& g) const {
    RealField out(g.num_edges());
    const System& sys = g.system();
    int d = g.depth();
    std::vector<int> w(std::max(d + 1, depth_) + 1);
    for (int i = 0; i < g.size(); ++i)
      for (int e = g.row_begin(i); e < g.row_end(i); ++e) {
        const auto& ed = g.edge(e);
        if (is_const_) out[e] = const_;
        else if (depth_ == 0) out[e] = expr_(ed.coord);
        else {
          w[0] = ed.sym;
          for (int t = 0; t < d; ++t) w[t + 1] = g.symbol(i, t);
          for (int t = d + 1; t < depth_; ++t) w[t] = sys.sym().first_successor(w[t - 1]);
          out[e] = by_code_[code(w.data())];
        }
      }
    return out;
  }
  // Values at cell representatives.
  RealField on_cells(const Grid& g) const {
    RealField out(g.size());
    for (int i = 0; i < g.size(); ++i) out[i] = is_const_ ? const_ : (depth_ == 0 ? expr_(g.rep(i)) : at(g.system(), PointRep{g.word(i)}));
    return out;
  }

 private:
  std::uint64_t code(const int* w) const {
    std::uint64_t c = 0;
    for (int t = 0; t < depth_; ++t) c = c * k_ + static_cast<std::uint64_t>(w[t]);
    return c;
  }

  std::string name_ = "const";
  Expr expr_;
  double const_ = 0;
  bool is_const_ = true;
  int depth_ = 0, k_ = 0;
  std::vector<double> by_code_;
  double declared_min_ = std::numeric_limits<double>::quiet_NaN();
};

// Sum of pot over x, sigma x, ..., sigma^{m-1} x.
inline double birkhoff_sum(const System& sys, const Potential& pot, int m, const PointRep& x) {
  double s = 0;
  PointRep p = x;
  for (int j = 0; j < m; ++j) {
    s += pot.at(sys, p);
    if (j + 1 < m) p = shift(sys, p);
  }
  return s;
}

// (L_g h)(w) = sum over edges of row w of e^{g(e)} h(col(e)).
template <class Field>
Field transfer_apply(const Grid& g, const RealField& weight_edge, const Field& h) {
  Field out(g.size());
  for (int i = 0; i < g.size(); ++i) {
    typename Field::value_type acc{};
    for (int e = g.row_begin(i); e < g.row_end(i); ++e) acc += weight_edge[e] * h[g.edge(e).col];
    out[i] = acc;
  }
  return out;
}

// Dual action on measures given as cell weights.
inline RealField transfer_adjoint(const Grid& g, const RealField& weight_edge, const RealField& m) {
  RealField out(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i)
    for (int e = g.row_begin(i); e < g.row_end(i); ++e) out[g.edge(e).col] += m[i] * weight_edge[e];
  return out;
}

inline RealField exp_field(const RealField& v) {
  RealField o(v.size());
  for (size_t i = 0; i < v.size(); ++i) o[i] = std::exp(v[i]);
  return o;
}

struct RPF {
  double lambda = 0;
  RealField h;       // L h = lambda h, integral of h d nu_hat = 1
  RealField nu_hat;  // nu_hat L = lambda nu_hat, total mass 1
  int iterations = 0;
  double residual = 0, adjoint_residual = 0;
};

struct LeadingEigen {
  double lambda = 0;
  RealField h;  // sup-normalized
  int iterations = 0;
  double residual = 0;
};

// Power iteration for the leading eigenpair of L_g acting on functions.
inline LeadingEigen leading_eigen(const Grid& g, const RealField& w, double tol = 1e-12, int max_iter = 100000,
                                  const RealField* warm_h = nullptr) {
  int n = g.size();
  LeadingEigen r;
  RealField h = warm_h && static_cast<int>(warm_h->size()) == n ? *warm_h : RealField(n, 1.0);
  double lam = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    RealField Lh = transfer_apply(g, w, h);
    double m = sup_norm(Lh);
    if (!(m > 0) || !std::isfinite(m)) fail(ErrorKind::NotPositive, "transfer operator annihilated h");
    double hm = sup_norm(h);
    lam = m / hm;
    double res = 0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::fabs(Lh[i] - lam * h[i]));
    res /= lam * hm;
    for (int i = 0; i < n; ++i) h[i] = Lh[i] / m;
    if (res < tol) {
      r.residual = res;
      break;
    }
  }
  if (it >= max_iter) fail(ErrorKind::NoConvergence, "eigenfunction iteration did not reach residual " + fmt_g(tol));
  for (double v : h)
    if (!(v > 0)) fail(ErrorKind::NotPositive, "leading eigenfunction is not positive");
  r.lambda = lam;
  r.h = std::move(h);
  r.iterations = it;
  return r;
}

inline RPF rpf_solve(const Grid& g, const RealField& g_edge, double tol = 1e-12, int max_iter = 100000,
                     const RealField* warm_h = nullptr) {
  RealField w = exp_field(g_edge);
  int n = g.size();
  RPF r;
  LeadingEigen le = leading_eigen(g, w, tol, max_iter, warm_h);
  double lam = le.lambda;
  RealField h = std::move(le.h);
  int it = le.iterations;
  r.residual = le.residual;
  // The L1 residual of a probability vector cannot go below summation rounding.
  double adj_tol = std::max(tol, 8 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(n)));
  RealField nu(n, 1.0 / n);
  int it2 = 0;
  for (; it2 < max_iter; ++it2) {
    RealField Ln = transfer_adjoint(g, w, nu);
    double mass = 0;
    for (double v : Ln) mass += v;
    double res = 0;
    for (int i = 0; i < n; ++i) res += std::fabs(Ln[i] - mass * nu[i]);
    res /= mass;
    for (int i = 0; i < n; ++i) nu[i] = Ln[i] / mass;
    if (res < adj_tol) {
      r.adjoint_residual = res;
      break;
    }
  }
  if (it2 >= max_iter) fail(ErrorKind::NoConvergence, "adjoint iteration did not reach residual " + fmt_g(adj_tol));
  double ih = 0;
  for (int i = 0; i < n; ++i) ih += h[i] * nu[i];
  for (double& v : h) v /= ih;
  r.lambda = lam;
  r.h = std::move(h);
  r.nu_hat = std::move(nu);
  r.iterations = it + it2;
  return r;
}

inline double pressure(const Grid& g, const RealField& g_edge, double tol = 1e-12) {
  return std::log(leading_eigen(g, exp_field(g_edge), tol).lambda);
}

struct PressureReport {
  double value = 0;        // at depth d
  double value_fine = 0;   // at depth d+2 (equal to value when exact)
  double error_proxy = 0;  // |value - value_fine|
  bool exact = false;      // potential locally constant at depth <= d+1
  int depth = 0;
};

inline PressureReport pressure_report(const System& sys, const Potential& pot, int depth, double tol = 1e-12) {
  PressureReport r;
  r.depth = depth;
  Grid g(sys, depth);
  r.value = pressure(g, pot.on_edges(g), tol);
  int lc = pot.lc_depth();
  r.exact = lc >= 0 && lc <= depth + 1;
  if (r.exact) r.value_fine = r.value;
  else {
    Grid g2(sys, depth + 2);
    r.value_fine = pressure(g2, pot.on_edges(g2), tol);
  }
  r.error_proxy = std::fabs(r.value - r.value_fine);
  return r;
}

inline RealField combine(const RealField& f, const RealField& tau, double s) {
  RealField o(f.size());
  for (size_t i = 0; i < f.size(); ++i) o[i] = f[i] - s * tau[i];
  return o;
}

// Unique P with Pr(f - P tau) = 0, by bisection.
inline double solve_pressure_root(const Grid& g, const RealField& f_edge, const RealField& tau_edge, double tol = 1e-12) {
  double tmin = 1e300, tmax = -1e300;
  for (double t : tau_edge) tmin = std::min(tmin, t), tmax = std::max(tmax, t);
  if (!(tmin > 0)) fail(ErrorKind::BracketFailure, "roof must be positive (min " + fmt_g(tmin) + ")");
  RealField warm;
  auto Pr = [&](double P) {
    auto r = leading_eigen(g, exp_field(combine(f_edge, tau_edge, P)), std::max(tol * 1e-2, 1e-13), 100000,
                           warm.empty() ? nullptr : &warm);
    warm = r.h;
    return std::log(r.lambda);
  };
  double pf = Pr(0.0);
  double lo = pf / tmax - 1, hi = pf / tmin + 1;
  for (int t = 0; Pr(lo) < 0; ++t) {
    if (t > 60) fail(ErrorKind::BracketFailure, "cannot bracket pressure root from below");
    lo -= (hi - lo);
  }
  for (int t = 0; Pr(hi) > 0; ++t) {
    if (t > 60) fail(ErrorKind::BracketFailure, "cannot bracket pressure root from above");
    hi += (hi - lo);
  }
  auto stop = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
  auto res = boost::math::tools::bisect(Pr, lo, hi, stop);
  return 0.5 * (res.first + res.second);
}

// RPF data for the normalized family f^(a) = f - (P+a) tau + ln h_a - ln h_a o sigma - ln lambda_a.
struct ThermoState {
  int depth = 0;
  double a = 0, P = 0;
  double lambda = 1;
  RealField h, nu_hat;
  RealField mu;        // h nu_hat: equilibrium measure of f - (P+a) tau, as cell masses
  RealField f_edge, tau_edge;
  RealField fa_edge;   // normalized potential on edges
  double normalization_error = 0;  // sup |M_a 1 - 1|
  int iterations = 0;
};

inline ThermoState thermo_state(const Grid& g, const RealField& f_edge, const RealField& tau_edge, double P, double a,
                                double tol = 1e-12) {
  ThermoState s;
  s.depth = g.depth();
  s.a = a;
  s.P = P;
  s.f_edge = f_edge;
  s.tau_edge = tau_edge;
  RPF r = rpf_solve(g, combine(f_edge, tau_edge, P + a), tol);
  s.lambda = r.lambda;
  s.h = r.h;
  s.nu_hat = r.nu_hat;
  s.iterations = r.iterations;
  s.mu.resize(g.size());
  double tot = 0;
  for (int i = 0; i < g.size(); ++i) tot += (s.mu[i] = s.h[i] * s.nu_hat[i]);
  for (double& v : s.mu) v /= tot;
  s.fa_edge.resize(g.num_edges());
  double ll = std::log(s.lambda);
  for (int i = 0; i < g.size(); ++i)
    for (int e = g.row_begin(i); e < g.row_end(i); ++e)
      s.fa_edge[e] = f_edge[e] - (P + a) * tau_edge[e] + std::log(s.h[g.edge(e).col]) - std::log(s.h[i]) - ll;
  RealField one(g.size(), 1.0);
  RealField m1 = transfer_apply(g, exp_field(s.fa_edge), one);
  for (double v : m1) s.normalization_error = std::max(s.normalization_error, std::fabs(v - 1));
  if (s.normalization_error > 1e-9)
    fail(ErrorKind::NonNormalized, "sup|M_a 1 - 1| = " + std::to_string(s.normalization_error));
  return s;
}

// Mass of every cylinder of n symbols (n <= depth), in lexicographic order.
inline RealField cylinder_masses(const Grid& g, const RealField& m, int n) {
  RealField out;
  g.for_each_group(n, [&](int b, int e) {
    double s = 0;
    for (int i = b; i < e; ++i) s += m[i];
    out.push_back(s);
  });
  return out;
}

// max over cylinders of up to n_max symbols of |nu(C) - integral of M_0 chi_C d nu|.
inline double adjoint_invariance_error(const Grid& g, const ThermoState& s0, int n_max) {
  RealField q = transfer_adjoint(g, exp_field(s0.fa_edge), s0.mu);
  double worst = 0;
  for (int n = 1; n <= std::min(n_max, g.depth()); ++n)
    g.for_each_group(n, [&](int b, int e) {
      double diff = 0;
      for (int i = b; i < e; ++i) diff += q[i] - s0.mu[i];
      worst = std::max(worst, std::fabs(diff));
    });
  return worst;
}

struct GibbsReport {
  double c1 = 0, c2 = 0;
  std::vector<double> c1_by_length, c2_by_length;
  int n_max = 0;
};

// Ratios nu(C)/exp(g_n(rep C)) with g = f - P tau over cylinders of n <= n_max
// symbols; the Birkhoff sum has n terms.
inline GibbsReport gibbs_bounds(const Grid& g, const ThermoState& s0, const Potential& f, const Potential& tau, int n_max) {
  const System& sys = g.system();
  if (n_max > g.depth()) fail(ErrorKind::DepthTooLarge, "cylinder length exceeds grid depth");
  GibbsReport r;
  r.n_max = n_max;
  r.c1 = 1e300;
  for (int n = 1; n <= n_max; ++n) {
    RealField masses = cylinder_masses(g, s0.mu, n);
    auto ws = sys.sym().words(n);
    double lo = 1e300, hi = 0;
    for (size_t c = 0; c < ws.size(); ++c) {
      PointRep x{ws[c]};
      double gn = birkhoff_sum(sys, f, n, x) - s0.P * birkhoff_sum(sys, tau, n, x);
      double ratio = masses[c] / std::exp(gn);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    r.c1_by_length.push_back(lo);
    r.c2_by_length.push_back(hi);
    r.c1 = std::min(r.c1, lo);
    r.c2 = std::max(r.c2, hi);
  }
  return r;
}

// Edge field re-indexed as a cell field on a grid one level deeper.
inline RealField edges_as_cells(const Grid& g, const Grid& g1, const RealField& edge_vals) {
  if (g1.depth() != g.depth() + 1) fail(ErrorKind::PreconditionViolation, "need a grid one level deeper");
  RealField out(g1.size());
  Word v(g1.depth());
  for (int i = 0; i < g.size(); ++i)
    for (int e = g.row_begin(i); e < g.row_end(i); ++e) {
      v[0] = g.edge(e).sym;
      for (int t = 0; t < g.depth(); ++t) v[t + 1] = g.symbol(i, t);
      out[g1.index_of(v)] = edge_vals[e];
    }
  return out;
}

// C0 with |lambda_a - 1|, ||h_a - h_0||_0, ||f^(a) - f^(0)||_0 <= C0 |a|.
inline double fit_C0(const Grid& g, const ThermoState& s0, const std::vector<double>& a_list) {
  double C0 = 0;
  for (double a : a_list) {
    if (a == 0) continue;
    ThermoState s = thermo_state(g, s0.f_edge, s0.tau_edge, s0.P, a);
    double dl = std::fabs(s.lambda - s0.lambda);
    double dh = 0, df = 0;
    for (int i = 0; i < g.size(); ++i) dh = std::max(dh, std::fabs(s.h[i] - s0.h[i]));
    for (int e = 0; e < g.num_edges(); ++e) df = std::max(df, std::fabs(s.fa_edge[e] - s0.fa_edge[e]));
    C0 = std::max(C0, std::max({dl, dh, df}) / std::fabs(a));
  }
  return C0;
}

}  // namespace ruelle
