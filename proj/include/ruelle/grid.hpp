/**
 * @file grid.hpp
 * @brief Depth-d cylinder partition: representatives, ancestor diameters,
 *        the transfer-operator edge structure, and exact Lipschitz / cone
 *        measurements for piecewise-constant fields.
 */
#pragma once
#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "symbolic.hpp"

namespace ruelle {

using cplx = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<cplx>;

class Grid {
 public:
  // One edge per admissible word v = s.w of d+1 symbols; w is the row cell,
  // col is the cell of the first d symbols of v.
  struct Edge {
    int col;
    int sym;
    double coord;  // representative coordinate of [v]
  };

  Grid(const System& sys, int depth) : sys_(&sys), d_(depth) {
    if (depth < 1) fail(ErrorKind::PreconditionViolation, "depth must be >= 1");
    std::uint64_t count = sys.sym().count_words(depth);
    if (count > (1u << 24)) fail(ErrorKind::DepthTooLarge, "depth " + std::to_string(depth) + " gives " + std::to_string(count) + " cells");
    int k = sys.k();
    auto ws = sys.sym().words(depth);
    n_ = static_cast<int>(ws.size());
    syms_.resize(static_cast<size_t>(n_) * d_);
    for (int i = 0; i < n_; ++i)
      for (int t = 0; t < d_; ++t) syms_[static_cast<size_t>(i) * d_ + t] = static_cast<std::uint8_t>(ws[i][t]);
    double codes = std::pow(static_cast<double>(k), d_);
    dense_ = codes <= static_cast<double>(1u << 26);
    if (dense_) dense_index_.assign(static_cast<size_t>(codes), -1);
    for (int i = 0; i < n_; ++i) {
      std::uint64_t c = code(ws[i].data(), d_);
      if (dense_) dense_index_[c] = i;
      else sparse_index_[c] = i;
    }
    // Representatives and ancestor diameters.
    rep_.resize(n_);
    anc_.resize(static_cast<size_t>(n_) * (d_ + 1));
    lcp_next_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
      rep_[i] = sys.rep_coord(ws[i]);
      anc_[static_cast<size_t>(i) * (d_ + 1)] = 1.0;
      int shared = 0;
      if (i > 0) {
        while (shared < d_ && ws[i][shared] == ws[i - 1][shared]) ++shared;
        lcp_next_[i - 1] = shared;
      }
      for (int l = 1; l <= d_; ++l) {
        double v;
        if (i > 0 && l <= shared) v = anc_[static_cast<size_t>(i - 1) * (d_ + 1) + l];
        else v = sys.diam(Word(ws[i].begin(), ws[i].begin() + l));
        anc_[static_cast<size_t>(i) * (d_ + 1) + l] = v;
      }
    }
    sym_start_.assign(k + 1, n_);
    for (int i = n_ - 1; i >= 0; --i) sym_start_[ws[i][0]] = i;
    for (int s = k - 1; s >= 0; --s) sym_start_[s] = std::min(sym_start_[s], sym_start_[s + 1]);
    // Edges.
    row_ptr_.assign(n_ + 1, 0);
    Word v(d_ + 1);
    for (int i = 0; i < n_; ++i) {
      row_ptr_[i] = static_cast<int>(edges_.size());
      int w0 = ws[i][0];
      for (int s = 0; s < k; ++s) {
        if (!sys.sym().allowed(s, w0)) continue;
        v[0] = s;
        std::copy(ws[i].begin(), ws[i].end(), v.begin() + 1);
        int col = index_of(v.data(), d_);
        edges_.push_back({col, s, sys.branch(s, w0)(rep_[i])});
      }
    }
    row_ptr_[n_] = static_cast<int>(edges_.size());
  }

  const System& system() const { return *sys_; }
  int depth() const { return d_; }
  int size() const { return n_; }
  int symbol(int cell, int t) const { return syms_[static_cast<size_t>(cell) * d_ + t]; }
  Word word(int cell) const {
    Word w(d_);
    for (int t = 0; t < d_; ++t) w[t] = symbol(cell, t);
    return w;
  }
  double rep(int cell) const { return rep_[cell]; }
  double diam(int cell) const { return anc_diam(cell, d_); }
  // Diameter of the ancestor cylinder of l symbols (l = 0 gives 1).
  double anc_diam(int cell, int l) const { return anc_[static_cast<size_t>(cell) * (d_ + 1) + l]; }
  int lcp_next(int cell) const { return lcp_next_[cell]; }
  int sym_begin(int s) const { return sym_start_[s]; }
  int sym_end(int s) const { return sym_start_[s + 1]; }

  int index_of(const int* w, int len) const {
    if (len != d_) return -1;
    std::uint64_t c = code(w, len);
    if (dense_) return c < dense_index_.size() ? dense_index_[c] : -1;
    auto it = sparse_index_.find(c);
    return it == sparse_index_.end() ? -1 : it->second;
  }
  int index_of(const Word& w) const { return index_of(w.data(), static_cast<int>(w.size())); }
  // Cell containing the point with the given prefix (prefix longer than d is truncated).
  int cell_of(const Word& prefix) const {
    PointRep p{prefix};
    Word w(d_);
    for (int t = 0; t < d_; ++t) w[t] = p.symbol(sys_->sym(), t);
    return index_of(w);
  }

  int row_begin(int cell) const { return row_ptr_[cell]; }
  int row_end(int cell) const { return row_ptr_[cell + 1]; }
  const Edge& edge(int e) const { return edges_[e]; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  // Edge of row `cell` that prepends symbol s, or -1.
  int edge_of(int cell, int s) const {
    for (int e = row_ptr_[cell]; e < row_ptr_[cell + 1]; ++e)
      if (edges_[e].sym == s) return e;
    return -1;
  }
  // Row cell of edge e (binary search on row_ptr).
  int row_of(int e) const {
    auto it = std::upper_bound(row_ptr_.begin(), row_ptr_.end(), e);
    return static_cast<int>(it - row_ptr_.begin()) - 1;
  }
  // The (d+1)-symbol word of edge e.
  Word edge_word(int e) const {
    Word w = word(row_of(e));
    w.insert(w.begin(), edges_[e].sym);
    return w;
  }

  // Cylinder-tree groups at level l: maximal runs of cells sharing l symbols.
  template <class F>
  void for_each_group(int l, F&& f) const {
    int b = 0;
    for (int i = 0; i < n_; ++i) {
      bool last = i + 1 == n_ || lcp_next_[i] < l;
      if (last) {
        f(b, i + 1);
        b = i + 1;
      }
    }
  }

  // All unordered pairs of distinct cells with the same first symbol.
  template <class F>
  void for_each_pair(F&& f) const {
    for (int i = 0; i < n_; ++i) {
      int l = d_;
      for (int j = i + 1; j < n_; ++j) {
        l = std::min(l, lcp_next_[j - 1]);
        if (l == 0) break;
        f(i, j, anc_diam(i, l));
      }
    }
  }

  // D between the representatives of two cells.
  double D(int i, int j) const {
    if (i == j) return 0.0;
    int a = std::min(i, j), b = std::max(i, j);
    int l = d_;
    for (int t = a; t < b; ++t) l = std::min(l, lcp_next_[t]);
    return l == 0 ? 1.0 : anc_diam(a, l);
  }

 private:
  std::uint64_t code(const int* w, int len) const {
    std::uint64_t c = 0;
    for (int t = 0; t < len; ++t) c = c * sys_->k() + static_cast<std::uint64_t>(w[t]);
    return c;
  }

  const System* sys_;
  int d_, n_ = 0;
  std::vector<std::uint8_t> syms_;
  bool dense_ = true;
  std::vector<int> dense_index_;
  std::unordered_map<std::uint64_t, int> sparse_index_;
  std::vector<double> rep_, anc_;
  std::vector<int> lcp_next_, sym_start_, row_ptr_;
  std::vector<Edge> edges_;
};

inline double sup_norm(const RealField& h) {
  double m = 0;
  for (double v : h) m = std::max(m, std::fabs(v));
  return m;
}
inline double sup_norm(const ComplexField& h) {
  double m = 0;
  for (const auto& v : h) m = std::max(m, std::abs(v));
  return m;
}

namespace detail {

inline double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Convex hull (counter-clockwise, no collinear points).
inline std::vector<cplx> hull(std::vector<cplx> p) {
  std::sort(p.begin(), p.end(), [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<cplx> h(2 * p.size());
  size_t k = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// Largest pairwise distance of a convex polygon (rotating calipers).
inline double hull_diameter(const std::vector<cplx>& h) {
  size_t n = h.size();
  if (n < 2) return 0;
  if (n == 2) return std::abs(h[0] - h[1]);
  double best = 0;
  size_t j = 1;
  for (size_t i = 0; i < n; ++i) {
    size_t ni = (i + 1) % n;
    while (std::fabs(cross(h[i], h[ni], h[(j + 1) % n])) > std::fabs(cross(h[i], h[ni], h[j]))) j = (j + 1) % n;
    best = std::max({best, std::abs(h[i] - h[j]), std::abs(h[ni] - h[j])});
  }
  return best;
}

}  // namespace detail

// Lip_D of a piecewise-constant real field: max over cylinder-tree nodes of
// (range over the subtree)/diam(node), the root having diameter 1.
inline double lip_D(const Grid& g, const RealField& h) {
  double best = 0;
  // Bottom-up: groups at level l are unions of groups at level l+1.
  std::vector<double> glo(h), ghi(h);
  std::vector<int> gbeg(g.size());
  for (int i = 0; i < g.size(); ++i) gbeg[i] = i;
  for (int l = g.depth() - 1; l >= 0; --l) {
    std::vector<double> nlo, nhi;
    std::vector<int> nbeg;
    size_t c = 0;
    g.for_each_group(l, [&](int b, int e) {
      double mn = 1e300, mx = -1e300;
      while (c < gbeg.size() && gbeg[c] < e) {
        mn = std::min(mn, glo[c]);
        mx = std::max(mx, ghi[c]);
        ++c;
      }
      nlo.push_back(mn);
      nhi.push_back(mx);
      nbeg.push_back(b);
      double dm = l == 0 ? 1.0 : g.anc_diam(b, l);
      if (mx > mn) best = std::max(best, (mx - mn) / dm);
    });
    glo.swap(nlo);
    ghi.swap(nhi);
    gbeg.swap(nbeg);
  }
  return best;
}

inline double lip_D(const Grid& g, const ComplexField& h) {
  double best = 0;
  std::vector<std::vector<cplx>> hulls(g.size());
  std::vector<int> gbeg(g.size());
  for (int i = 0; i < g.size(); ++i) hulls[i] = {h[i]}, gbeg[i] = i;
  for (int l = g.depth() - 1; l >= 0; --l) {
    std::vector<std::vector<cplx>> nh;
    std::vector<int> nbeg;
    size_t c = 0;
    g.for_each_group(l, [&](int b, int e) {
      std::vector<cplx> pts;
      while (c < gbeg.size() && gbeg[c] < e) {
        pts.insert(pts.end(), hulls[c].begin(), hulls[c].end());
        ++c;
      }
      auto hh = detail::hull(std::move(pts));
      double dm = l == 0 ? 1.0 : g.anc_diam(b, l);
      best = std::max(best, detail::hull_diameter(hh) / dm);
      nh.push_back(std::move(hh));
      nbeg.push_back(b);
    });
    hulls.swap(nh);
    gbeg.swap(nbeg);
  }
  return best;
}

// Brute-force Lip_D over all cell pairs; test oracle and small-depth checks.
template <class Field>
double lip_D_pairs(const Grid& g, const Field& h) {
  double best = 0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) best = std::max(best, std::abs(h[i] - h[j]) / g.D(i, j));
  return best;
}

// ||h||_{Lip,b} = ||h||_0 + Lip_D(h)/|b|.
template <class Field>
double lip_norm_b(const Grid& g, const Field& h, double b) {
  if (std::fabs(b) < 1) fail(ErrorKind::PreconditionViolation, "|b| must be >= 1");
  return sup_norm(h) + lip_D(g, h) / std::fabs(b);
}

// Smallest A with H in the cone K_A: over nodes below the root,
// (max/min - 1)/diam(node). Exact for piecewise-constant H > 0.
inline double cone_constant(const Grid& g, const RealField& H) {
  for (double v : H)
    if (!(v > 0)) fail(ErrorKind::NotPositive, "cone functions must be positive");
  double best = 0;
  std::vector<double> glo(H), ghi(H);
  std::vector<int> gbeg(g.size());
  for (int i = 0; i < g.size(); ++i) gbeg[i] = i;
  for (int l = g.depth() - 1; l >= 1; --l) {
    std::vector<double> nlo, nhi;
    std::vector<int> nbeg;
    size_t c = 0;
    g.for_each_group(l, [&](int b, int e) {
      double mn = 1e300, mx = 0;
      while (c < gbeg.size() && gbeg[c] < e) {
        mn = std::min(mn, glo[c]);
        mx = std::max(mx, ghi[c]);
        ++c;
      }
      nlo.push_back(mn);
      nhi.push_back(mx);
      nbeg.push_back(b);
      best = std::max(best, (mx / mn - 1.0) / g.anc_diam(b, l));
    });
    glo.swap(nlo);
    ghi.swap(nhi);
    gbeg.swap(nbeg);
  }
  return best;
}

inline bool cone_membership(const Grid& g, const RealField& H, double A) {
  return cone_constant(g, H) <= A * (1 + 1e-12);
}

}  // namespace ruelle
