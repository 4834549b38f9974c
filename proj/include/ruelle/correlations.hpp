/**
 * @file correlations.hpp
 * @brief Correlation functions of the suspension flow under the equilibrium
 *        measure, estimated along sampled orbits, with exponential-decay fits.
 */
#pragma once
#include <memory>

#include "ruelle_operator.hpp"

namespace ruelle {

// Backward Markov chain on depth-d cells: from cell w, prepend symbol s with
// probability e^{f^(0)(s.w)}. The normalized operator fixes nu, so nu on cells
// is stationary.
struct MarkovApprox {
  std::shared_ptr<const Grid> grid;
  int depth = 0;
  double P = 0;
  RealField stationary;  // nu on cells
  RealField prob;        // per edge
  RealField tau_edge;
  double row_error = 0;           // max |row sum - 1| before renormalizing
  double stationarity_error = 0;  // max |nu P - nu|
};

inline MarkovApprox markov_approximation(std::shared_ptr<const Grid> g, const ThermoState& s) {
  if (s.a != 0) fail(ErrorKind::PreconditionViolation, "Markov approximation needs the state at a = 0");
  MarkovApprox m;
  m.grid = g;
  m.depth = g->depth();
  m.P = s.P;
  m.stationary = s.mu;
  m.tau_edge = s.tau_edge;
  m.prob = exp_field(s.fa_edge);
  for (int i = 0; i < g->size(); ++i) {
    double sum = 0;
    for (int e = g->row_begin(i); e < g->row_end(i); ++e) sum += m.prob[e];
    m.row_error = std::max(m.row_error, std::fabs(sum - 1));
    for (int e = g->row_begin(i); e < g->row_end(i); ++e) m.prob[e] /= sum;
  }
  RealField next(g->size(), 0.0);
  for (int i = 0; i < g->size(); ++i)
    for (int e = g->row_begin(i); e < g->row_end(i); ++e) next[g->edge(e).col] += m.stationary[i] * m.prob[e];
  for (int i = 0; i < g->size(); ++i) m.stationarity_error = std::max(m.stationarity_error, std::fabs(next[i] - m.stationary[i]));
  return m;
}

inline MarkovApprox markov_approximation(const System& sys, const Potential& f, const Potential& tau, int depth) {
  auto g = std::make_shared<const Grid>(sys, depth);
  RealField fe = f.on_edges(*g), te = tau.on_edges(*g);
  double P = solve_pressure_root(*g, fe, te);
  return markov_approximation(g, thermo_state(*g, fe, te, P, 0.0));
}

// Forward orbit x_0, ..., x_{L-1} with roof values and flow clock times[j] = sum_{i<j} roof[i].
struct OrbitSample {
  std::vector<std::uint8_t> symbols;
  std::vector<double> coords;
  std::vector<double> roof;
  std::vector<double> times;
  double tau_min = 0, tau_max = 0;
  std::size_t size() const { return symbols.size(); }
  double total_time() const { return times.back(); }
};

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Stationary start, then L prepending steps; the forward orbit is the reversed
// chain. Coordinates are exact compositions of the branches.
inline OrbitSample sample_orbit(const MarkovApprox& m, const Potential& tau, std::size_t L, std::uint64_t seed) {
  if (L < 1) fail(ErrorKind::PreconditionViolation, "L must be >= 1");
  const Grid& g = *m.grid;
  const System& sys = g.system();
  if (tau.is_table() && tau.table_depth() > m.depth + 1)
    fail(ErrorKind::PreconditionViolation, "roof table depth exceeds sampler depth + 1");
  bool coord_roof = !tau.is_table() && !tau.is_constant();
  std::mt19937_64 rng(seed);
  int cur = 0;
  {
    double u = uniform01(rng), acc = 0;
    for (cur = 0; cur < g.size() - 1; ++cur)
      if ((acc += m.stationary[cur]) > u) break;
  }
  OrbitSample o;
  o.symbols.resize(L);
  o.coords.resize(L);
  o.roof.resize(L);
  double c = g.rep(cur);
  for (std::size_t t = 1; t <= L; ++t) {
    double u = uniform01(rng), acc = 0;
    int e = g.row_begin(cur), last = g.row_end(cur) - 1;
    for (; e < last; ++e)
      if ((acc += m.prob[e]) > u) break;
    int s = g.edge(e).sym;
    c = sys.branch(s, g.symbol(cur, 0))(c);
    cur = g.edge(e).col;
    std::size_t j = L - t;
    o.symbols[j] = static_cast<std::uint8_t>(s);
    o.coords[j] = c;
    o.roof[j] = coord_roof ? tau.at_coord(c) : m.tau_edge[e];
  }
  o.times.resize(L + 1);
  o.times[0] = 0;
  for (std::size_t j = 0; j < L; ++j) o.times[j + 1] = o.times[j] + o.roof[j];
  auto [lo, hi] = std::minmax_element(o.roof.begin(), o.roof.end());
  o.tau_min = *lo;
  o.tau_max = *hi;
  if (!(o.tau_min > 0)) fail(ErrorKind::NotPositive, "roof is not positive along the sample");
  return o;
}

struct DecayFit {
  double amp = 0, rate = 0, r2 = 0;
  bool passes(double min_r2 = 0.9) const { return rate > 0 && r2 >= min_r2; }
};

struct CorrelationCurve {
  std::vector<double> t, C, stderr_;
  std::size_t samples = 0;  // anchor points of the time average
  double dt = 0;            // flow sampling step
  double total_time = 0;
  std::uint64_t seed = 0;
  double window_lo = 0, window_hi = 0;
  bool fitted = false;
  DecayFit fit;
  std::string fit_error;
};

// Time average along the flow at step dt <= tau_min/10 (dt divides lag_step),
// with batch-means standard errors.
inline CorrelationCurve suspension_correlation(const OrbitSample& o, const Expr& A, const Expr& B, double t_max,
                                               double lag_step, int batches = 20) {
  if (!(lag_step > 0) || !(t_max >= 0)) fail(ErrorKind::PreconditionViolation, "need lag_step > 0 and t_max >= 0");
  if (batches < 2) fail(ErrorKind::PreconditionViolation, "need at least 2 batches");
  double T = o.total_time();
  if (t_max > 0.01 * T)
    fail(ErrorKind::InsufficientSample, "t_max " + fmt_g(t_max) + " exceeds 1% of total flow time " + fmt_g(T));
  long stride = static_cast<long>(std::ceil(lag_step / (o.tau_min / 10) - 1e-9));
  double dt = lag_step / stride;
  int n_lags = static_cast<int>(std::floor(t_max / lag_step + 1e-9)) + 1;
  long lmax = (n_lags - 1) * stride;
  long K = static_cast<long>(std::ceil(T / dt));
  while (K > 0 && (K - 1) * dt >= T) --K;
  long M = K - lmax;
  if (M < batches) fail(ErrorKind::InsufficientSample, "too few flow samples");
  bool same = A.source() == B.source();

  // Products A_k B_j (j = k + lag) are binned by j for the batch means; the
  // totals are exact sums over anchors k < M.
  std::vector<long> bound(batches + 1);
  for (int b = 0; b <= batches; ++b) bound[b] = static_cast<long>(static_cast<__int128>(M) * b / batches);
  bound[batches] = K;
  std::vector<double> Sa(batches, 0.0), Sab(static_cast<size_t>(batches) * n_lags, 0.0), Sb(Sab.size(), 0.0);
  std::vector<long> na(batches, 0);
  const long W = lmax + 1;
  std::vector<double> ring(2 * W);
  std::size_t idx = 0;
  int bj = 0;
  for (long j = 0; j < K; ++j) {
    double u = j * dt;
    while (idx + 1 < o.size() && o.times[idx + 1] <= u) ++idx;
    double x = o.coords[idx], y = u - o.times[idx], tau = o.roof[idx];
    double a = A(x, y, tau), b = same ? a : B(x, y, tau);
    long p = j % W;
    ring[p] = ring[p + W] = a;
    while (j >= bound[bj + 1]) ++bj;
    if (j < M) {
      Sa[bj] += a;
      ++na[bj];
    }
    double* sab = &Sab[static_cast<size_t>(bj) * n_lags];
    double* sb = &Sb[static_cast<size_t>(bj) * n_lags];
    const double* r = &ring[p + W];
    if (j >= lmax && j < M) {
      for (int i = 0; i < n_lags; ++i) {
        sab[i] += r[-i * stride] * b;
        sb[i] += b;
      }
    } else {
      for (int i = 0; i < n_lags; ++i) {
        long k = j - i * stride;
        if (k < 0 || k >= M) continue;
        sab[i] += r[-i * stride] * b;
        sb[i] += b;
      }
    }
  }

  CorrelationCurve cv;
  cv.samples = static_cast<std::size_t>(M);
  cv.dt = dt;
  cv.total_time = T;
  double sa = 0;
  for (double v : Sa) sa += v;
  for (int i = 0; i < n_lags; ++i) {
    double sab = 0, sb = 0;
    std::vector<double> cb(batches);
    for (int b = 0; b < batches; ++b) {
      double n = static_cast<double>(na[b]);
      double xab = Sab[static_cast<size_t>(b) * n_lags + i], xb = Sb[static_cast<size_t>(b) * n_lags + i];
      sab += xab;
      sb += xb;
      cb[b] = xab / n - (Sa[b] / n) * (xb / n);
    }
    double Md = static_cast<double>(M);
    double mean = 0, var = 0;
    for (double v : cb) mean += v / batches;
    for (double v : cb) var += (v - mean) * (v - mean) / (batches - 1);
    cv.t.push_back(i * lag_step);
    cv.C.push_back(sab / Md - (sa / Md) * (sb / Md));
    cv.stderr_.push_back(std::sqrt(var / batches));
  }
  return cv;
}

// Least squares of ln|C| on the window; refuses points within 2 stderr of zero.
inline DecayFit fit_decay_rate(const CorrelationCurve& cv, double lo, double hi) {
  std::vector<double> ts, ls;
  for (size_t i = 0; i < cv.t.size(); ++i) {
    if (cv.t[i] < lo - 1e-9 || cv.t[i] > hi + 1e-9) continue;
    double se = i < cv.stderr_.size() ? cv.stderr_[i] : 0.0;
    if (!(std::fabs(cv.C[i]) > 2 * se) || cv.C[i] == 0)
      fail(ErrorKind::BelowNoiseFloor, "|C(" + fmt_g(cv.t[i]) + ")| = " + fmt_g(std::fabs(cv.C[i])) +
                                           " is within 2 stderr (" + fmt_g(se) + ")");
    ts.push_back(cv.t[i]);
    ls.push_back(std::log(std::fabs(cv.C[i])));
  }
  if (ts.size() < 3) fail(ErrorKind::FitFailure, "fewer than 3 points in the fit window");
  double n = static_cast<double>(ts.size()), mt = 0, ml = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i] / n;
    ml += ls[i] / n;
  }
  double stt = 0, stl = 0, sll = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
    sll += (ls[i] - ml) * (ls[i] - ml);
  }
  DecayFit f;
  double slope = stl / stt;
  f.rate = -slope;
  f.amp = std::exp(ml - slope * mt);
  double res = sll - slope * stl;
  f.r2 = sll > 0 ? 1 - std::max(0.0, res) / sll : 1.0;
  return f;
}

inline void fit_curve(CorrelationCurve& cv, double lo, double hi) {
  cv.window_lo = lo;
  cv.window_hi = hi;
  try {
    cv.fit = fit_decay_rate(cv, lo, hi);
    cv.fitted = true;
  } catch (const Error& e) {
    cv.fitted = false;
    cv.fit_error = e.what();
  }
}

// sup|A| + Lip(A) in (x, y) over the suspension region, estimated on a sample grid.
inline double observable_norm(const System& sys, const Potential& tau, const Expr& A, int depth = 8, int ny = 64) {
  Grid g(sys, depth);
  RealField tc = tau.on_cells(g);
  double tmax = *std::max_element(tc.begin(), tc.end());
  double dy = tmax / ny, sup = 0, lip = 0;
  std::vector<double> prev;
  double prev_x = 0;
  for (int c = 0; c < g.size(); ++c) {
    double x = g.rep(c);
    std::vector<double> col;
    for (int j = 0; j * dy < tc[c]; ++j) {
      double v = A(x, j * dy, tc[c]);
      sup = std::max(sup, std::fabs(v));
      if (j > 0) lip = std::max(lip, std::fabs(v - col.back()) / dy);
      col.push_back(v);
    }
    if (c > 0 && x > prev_x)
      for (size_t j = 0; j < std::min(col.size(), prev.size()); ++j)
        lip = std::max(lip, std::fabs(col[j] - prev[j]) / (x - prev_x));
    prev = std::move(col);
    prev_x = x;
  }
  return sup + lip;
}

struct CorrelationOptions {
  int depth = 10;
  std::size_t L = 10'000'000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double t_max = 8.0;
  double lag_step = 0.2;
  double window_lo = 1.0, window_hi = 6.0;
  int batches = 20;
  int threads = 1;
};

struct CorrelationRun {
  std::vector<CorrelationCurve> curves;  // one per seed
  double norm_A = 0, norm_B = 0;
  double P = 0;
  bool all_pass(double min_r2 = 0.9) const {
    for (const auto& c : curves)
      if (!c.fitted || !c.fit.passes(min_r2)) return false;
    return !curves.empty();
  }
  bool any_pass(double min_r2 = 0.9) const {
    for (const auto& c : curves)
      if (c.fitted && c.fit.passes(min_r2)) return true;
    return false;
  }
};

inline CorrelationRun correlation_run(const System& sys, const Potential& f, const Potential& tau, const Expr& A,
                                      const Expr& B, const CorrelationOptions& opt) {
  MarkovApprox m = markov_approximation(sys, f, tau, opt.depth);
  CorrelationRun run;
  run.P = m.P;
  run.norm_A = observable_norm(sys, tau, A);
  run.norm_B = observable_norm(sys, tau, B);
  run.curves.resize(opt.seeds.size());
  parallel_for(static_cast<int>(opt.seeds.size()), opt.threads, [&](int i) {
    OrbitSample o = sample_orbit(m, tau, opt.L, opt.seeds[i]);
    CorrelationCurve cv = suspension_correlation(o, A, B, opt.t_max, opt.lag_step, opt.batches);
    cv.seed = opt.seeds[i];
    fit_curve(cv, opt.window_lo, opt.window_hi);
    run.curves[i] = std::move(cv);
  });
  return run;
}

inline const char* kDefaultObservable = "x + 0.2*sin(pi*y/tau)^2";

}  // namespace ruelle
