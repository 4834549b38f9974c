/**
 * @file cli.hpp
 * @brief Command-line front end: option parsing, subcommand dispatch, result
 *        caching and JSON/CSV emission. `run` is callable in-process.
 */
#pragma once
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "cache.hpp"
#include "config.hpp"
#include "correlations.hpp"
#include "dolgopyat.hpp"
#include "orbits.hpp"
#include "selftest.hpp"

namespace ruelle::cli {

using json = nlohmann::ordered_json;

struct Options {
  std::string system, potential = "zero", roof, out;
  int depth = 0;  // 0 = command default
  std::uint64_t seed = 1;
  int threads = 1;
  bool no_cache = false;
  std::string a = "0", b = "10:100:10", s = "1", lambda;
  int N = 6, m = 8, n = 0;
  double eps1 = 1;
  int q0 = 2, cone_trials = 50, l2_trials = 20;
  std::string obs_A, obs_B;
  std::size_t L = 10'000'000;
  std::string seeds = "1,2,3";
  double t_max = 8, lag_step = 0.2, window_lo = 1, window_hi = 6;
};

struct Output {
  std::string summary;  // human-readable lines for stdout
  std::string report;   // JSON or CSV document
};

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& t, const std::string& key) {
  try {
    size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "cannot parse number '" + t + "'");
  }
}

// "x", "x,y,z" or "lo:hi:step" (inclusive).
inline std::vector<double> parse_grid(const std::string& s, const std::string& key) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> p;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ':');) p.push_back(t);
    if (p.size() != 3) throw ConfigError(key, "range must be lo:hi:step");
    double lo = parse_double(p[0], key), hi = parse_double(p[1], key), st = parse_double(p[2], key);
    if (!(st > 0) || hi < lo) throw ConfigError(key, "range needs step > 0 and hi >= lo");
    long n = static_cast<long>(std::floor((hi - lo) / st + 1e-9));
    if (n > 100000) throw ConfigError(key, "range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(lo + i * st);
    return out;
  }
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');) out.push_back(parse_double(t, key));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

// "1.5", "1.5+2i", "1-0.5i", "2i".
inline cplx parse_complex(std::string t, const std::string& key) {
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t.empty()) throw ConfigError(key, "empty complex number");
  if (t.back() != 'i') return {parse_double(t, key), 0.0};
  t.pop_back();
  size_t cut = std::string::npos;
  for (size_t i = t.size(); i-- > 1;)
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      cut = i;
      break;
    }
  if (cut == std::string::npos) return {0.0, t == "" || t == "+" ? 1.0 : t == "-" ? -1.0 : parse_double(t, key)};
  std::string im = t.substr(cut);
  double iv = im == "+" ? 1.0 : im == "-" ? -1.0 : parse_double(im, key);
  return {parse_double(t.substr(0, cut), key), iv};
}

inline Potential resolve_roof(const Config& cfg, const std::string& name) {
  if (name.empty()) throw ConfigError("roof", "this command needs --roof");
  if (!cfg.roofs.count(name) && name == "const1") {
    auto p = Potential::constant(1.0);
    p.set_name("const1");
    p.set_declared_min(1.0);
    return p;
  }
  return cfg.roof(name);
}

inline double roof_min(const System& sys, const Potential& tau) {
  if (tau.declared_min() > 0) return tau.declared_min();
  if (tau.is_constant()) return tau.constant_value();
  Grid g(sys, std::min(10, std::max(1, static_cast<int>(std::log(4096.0) / std::log(static_cast<double>(sys.k()))))));
  RealField t = tau.on_edges(g);
  return *std::min_element(t.begin(), t.end());
}

inline Expr resolve_observable(const Config& cfg, const std::string& name, const std::string& key) {
  if (name.empty()) return Expr(kDefaultObservable);
  try {
    auto it = cfg.observables.find(name);
    return Expr(it != cfg.observables.end() ? it->second : name);
  } catch (const Error& e) {
    throw ConfigError(key, "'" + name + "' is neither an observable in the system file nor a valid expression");
  }
}

inline void need_range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

// ---- subcommands ----

inline Output cmd_pressure(const Config& cfg, const Options& o, bool with_roof) {
  int d = o.depth ? o.depth : 10;
  const Potential& f = cfg.potential(o.potential);
  auto pr = pressure_report(cfg.system, f, d);
  json j;
  j["command"] = "pressure";
  j["potential"] = o.potential;
  j["depth"] = d;
  j["pressure"] = pr.value;
  j["pressure_depth_plus_2"] = pr.value_fine;
  j["error_proxy"] = pr.error_proxy;
  j["exact"] = pr.exact;
  Output out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15f", pr.value);
  out.summary = std::string(buf) + "\n";
  if (with_roof) {
    Potential tau = resolve_roof(cfg, o.roof);
    Grid g(cfg.system, d);
    double P = solve_pressure_root(g, f.on_edges(g), tau.on_edges(g));
    j["roof"] = o.roof;
    j["pressure_root"] = P;
    std::snprintf(buf, sizeof buf, "%.15f", P);
    out.summary += "root P with Pr(f - P tau) = 0: " + std::string(buf) + "\n";
  }
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_rpf(const Config& cfg, const Options& o) {
  int d = o.depth ? o.depth : 10;
  const Potential& f = cfg.potential(o.potential);
  Potential tau = resolve_roof(cfg, o.roof.empty() ? "const1" : o.roof);
  Grid g(cfg.system, d);
  RealField fe = f.on_edges(g), te = tau.on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  json j;
  j["command"] = "rpf";
  j["potential"] = o.potential;
  j["roof"] = tau.name();
  j["depth"] = d;
  j["P"] = P;
  json states = json::array();
  Output out;
  for (double a : parse_grid(o.a, "a")) {
    ThermoState s = thermo_state(g, fe, te, P, a);
    json e;
    e["a"] = a;
    e["lambda"] = s.lambda;
    e["normalization_error"] = s.normalization_error;
    e["iterations"] = s.iterations;
    e["h_min"] = *std::min_element(s.h.begin(), s.h.end());
    e["h_max"] = *std::max_element(s.h.begin(), s.h.end());
    e["adjoint_invariance_error"] = adjoint_invariance_error(g, s, std::min(d, 8));
    states.push_back(e);
    out.summary += "a = " + num(a) + ": lambda = " + num(s.lambda) + ", sup|M_a 1 - 1| = " + num(s.normalization_error) + "\n";
  }
  j["states"] = states;
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_gibbs(const Config& cfg, const Options& o) {
  int d = o.depth ? o.depth : 12;
  int n = o.n ? o.n : std::min(d, 12);
  need_range(n >= 1 && n <= d, "n", "cylinder length must be in [1, depth]");
  const Potential& f = cfg.potential(o.potential);
  Potential tau = resolve_roof(cfg, o.roof.empty() ? "const1" : o.roof);
  Grid g(cfg.system, d);
  RealField fe = f.on_edges(g), te = tau.on_edges(g);
  double P = solve_pressure_root(g, fe, te);
  ThermoState s = thermo_state(g, fe, te, P, 0.0);
  auto r = gibbs_bounds(g, s, f, tau, n);
  json j;
  j["command"] = "gibbs";
  j["potential"] = o.potential;
  j["roof"] = tau.name();
  j["depth"] = d;
  j["P"] = P;
  j["c1"] = r.c1;
  j["c2"] = r.c2;
  j["c2_over_c1"] = r.c2 / r.c1;
  j["c1_by_length"] = r.c1_by_length;
  j["c2_by_length"] = r.c2_by_length;
  j["length_convention"] = "n-symbol cylinders, Birkhoff sums of n terms";
  Output out;
  out.summary = "c1 = " + num(r.c1) + ", c2 = " + num(r.c2) + "\n";
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_sweep(const Config& cfg, const Options& o) {
  SweepOptions so;
  so.depth = o.depth ? o.depth : 12;
  so.N = o.N;
  so.m_max = o.m;
  so.track_lip = true;
  so.threads = o.threads;
  need_range(o.N >= 1, "N", "N must be >= 1");
  need_range(o.m >= 3, "m", "m must be >= 3 for the rate fit");
  const Potential& f = cfg.potential(o.potential);
  Potential tau = resolve_roof(cfg, o.roof);
  auto sw = contraction_sweep(cfg.system, f, tau, parse_grid(o.a, "a"), parse_grid(o.b, "b"), so);
  std::string csv = "a,b,m,l2_norm,rho_hat,lip_b_norm,monotone_flag\n";
  double worst = 0;
  bool mono = true;
  for (const auto& c : sw.cells) {
    const NormSeries& s = c.series[c.worst_h];
    for (size_t m = 0; m < s.l2.size(); ++m)
      csv += num(c.a) + "," + num(c.b) + "," + std::to_string(m + 1) + "," + num(s.l2[m]) + "," + num(c.rho_hat) + "," +
             num(m < s.lip_b.size() ? s.lip_b[m] : 0.0) + "," + (c.monotone ? "1" : "0") + "\n";
    worst = std::max(worst, c.rho_hat);
    mono = mono && c.monotone;
  }
  Output out;
  out.summary = "P = " + num(sw.P) + "; cells = " + std::to_string(sw.cells.size()) + "; worst rho_hat = " + num(worst) +
                "; all monotone = " + (mono ? "yes" : "no") + "; depth+2 relative change = " + num(sw.refinement_delta) + "\n";
  out.report = csv;
  return out;
}

inline json params_json(const DolgopyatParams& p) {
  json j;
  j["E"] = p.E;
  j["N"] = p.N;
  j["eps1"] = p.eps1;
  j["q0"] = p.q0;
  j["mu"] = p.mu;
  j["c2"] = p.c2;
  j["S"] = p.S;
  j["d_S"] = p.d_S;
  j["eps_prime"] = p.eps_prime;
  j["eps2"] = p.eps2;
  j["a0"] = p.a0;
  j["gamma_N_required"] = p.gamma_N_required;
  j["certified"] = p.certified;
  j["overrides"] = p.overrides;
  return j;
}

inline Output cmd_dolgopyat(const Config& cfg, const Options& o) {
  SuiteOptions so;
  so.N = o.N;
  so.b = parse_grid(o.b, "b").front();
  so.eps1 = o.eps1;
  so.a = parse_grid(o.a, "a").front();
  so.q0 = o.q0;
  so.depth = o.depth ? o.depth : 12;
  so.cone_trials = o.cone_trials;
  so.l2_trials = o.l2_trials;
  so.seed = o.seed;
  need_range(so.N >= 2, "N", "N must be >= 2");
  need_range(std::fabs(so.b) >= 1, "b", "|b| must be >= 1");
  need_range(so.eps1 > 0, "eps1", "eps1 must be positive");
  const Potential& f = cfg.potential(o.potential);
  Potential tau = resolve_roof(cfg, o.roof);
  auto R = dolgopyat_suite(cfg.system, f, tau, so);
  json j;
  j["command"] = "dolgopyat";
  if (!R.desk.certified) j["banner"] = "constants not certified";
  json k;
  k["c0"] = R.k.c0;
  k["gamma"] = R.k.gamma;
  k["gamma1"] = R.k.gamma1;
  k["rho"] = R.k.rho;
  k["p0"] = R.k.p0;
  k["c0r0"] = R.k.c0r0;
  k["C0"] = R.k.C0;
  k["c1"] = R.k.c1;
  k["c2"] = R.k.c2;
  k["T"] = R.k.T;
  k["A0"] = R.k.A0;
  k["A0_measured"] = R.k.A0_measured;
  k["delta_hat"] = R.k.delta_hat;
  j["measured"] = k;
  j["temporal_increment"] = {{"delta_hat", R.inc.delta_hat}, {"grid_points", R.inc.grid_points}, {"history", R.inc.history}};
  j["certified"] = params_json(R.certified);
  j["desk"] = params_json(R.desk);
  j["branch_pair"] = {word_str(R.pair.v1), word_str(R.pair.v2)};
  j["partition"] = {{"C_blocks", R.ps.C.size()},
                    {"D_blocks", R.ps.D.size()},
                    {"exact_rational", R.ps.exact},
                    {"ineq_C", R.ps.ineq_C},
                    {"ineq_D", R.ps.ineq_D},
                    {"violation", R.ps.violation}};
  j["Gamma"] = R.Gamma;
  j["beta"] = {{"min", R.beta_min}, {"max", R.beta_max}, {"lip", R.beta_lip}, {"ok", R.beta_ok}};
  j["cone"] = {{"trials", so.cone_trials}, {"worst", R.cone_worst}, {"bound", R.cone_bound}, {"ok", R.cone_ok}};
  j["l2_contraction"] = {{"trials", so.l2_trials}, {"dense_failures", R.dense_failures}, {"max_ratio", R.l2_max}, {"ok", R.l2_ok}};
  j["domination"] = {{"violations", R.domination_violations}, {"lipschitz_worst", R.lipschitz_worst}, {"ok", R.domination_ok}};
  j["phase"] = {{"min_gap_ratio", R.phase.min_gap_ratio}, {"max_spread", R.phase.max_spread}, {"ok", R.phase_ok}};
  j["chain"] = {{"h2", R.chain_h2}, {"H2", R.chain_H2}, {"ok", R.chain_ok}};
  j["all_ok"] = R.all_ok();
  Output out;
  if (!R.desk.certified) out.summary = "constants not certified (desk overrides)\n";
  out.summary += std::string("partition ") + (R.partition_ok() ? "ok" : "FAILED") + ", beta " + (R.beta_ok ? "ok" : "FAILED") +
                 ", cone " + (R.cone_ok ? "ok" : "FAILED") + ", L2 " + (R.l2_ok ? "ok" : "FAILED") + ", domination " +
                 (R.domination_ok ? "ok" : "FAILED") + "\n";
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_orbits(const Config& cfg, const Options& o) {
  int n = o.n ? o.n : 12;
  need_range(n >= 1 && n <= 40, "n", "n must be in [1, 40]");
  Potential tau = resolve_roof(cfg, o.roof);
  auto orbits = primitive_orbits(cfg.system, tau, n);
  std::sort(orbits.begin(), orbits.end(), [](const PeriodicOrbit& x, const PeriodicOrbit& y) {
    return x.word.size() != y.word.size() ? x.word.size() < y.word.size() : x.word < y.word;
  });
  std::string csv = "length,word,period\n";
  for (const auto& p : orbits) csv += std::to_string(p.word.size()) + "," + word_str(p.word) + "," + num(p.period) + "\n";
  Output out;
  out.summary = std::to_string(orbits.size()) + " primitive orbits up to length " + std::to_string(n) + "\n";
  out.report = csv;
  return out;
}

inline Output cmd_zeta(const Config& cfg, const Options& o, std::ostream& err) {
  int n = o.n ? o.n : 40;
  need_range(n >= 1, "n", "n must be >= 1");
  Potential tau = resolve_roof(cfg, o.roof);
  cplx s = parse_complex(o.s, "s");
  double hT = flow_entropy(cfg.system, tau);
  auto z = zeta_truncated(cfg.system, tau, s, n, hT);
  json j;
  j["command"] = "zeta";
  j["roof"] = o.roof;
  j["s"] = {s.real(), s.imag()};
  j["n_max"] = n;
  j["h_T"] = hT;
  j["value"] = {z.value.real(), z.value.imag()};
  j["log_value"] = {z.log_value.real(), z.log_value.imag()};
  j["tail_bound"] = z.tail_bound;
  j["method"] = z.method;
  j["divergent"] = z.divergent;
  if (z.divergent) {
    std::string w = "DivergentRegion: Re s = " + num(s.real()) + " <= h_T = " + num(hT) + "; truncated value only";
    j["warning"] = w;
    err << w << "\n";
  }
  Output out;
  out.summary = "zeta(" + num(s.real()) + (s.imag() < 0 ? "" : "+") + num(s.imag()) + "i) = " + num(z.value.real()) +
                (z.value.imag() < 0 ? "" : "+") + num(z.value.imag()) + "i, log tail bound " + num(z.tail_bound) + "\n";
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_count(const Config& cfg, const Options& o) {
  int n = o.n ? o.n : 16;
  need_range(n >= 1 && n <= 40, "n", "n must be in [1, 40]");
  Potential tau = resolve_roof(cfg, o.roof);
  double tmin = roof_min(cfg.system, tau);
  std::vector<double> grid = o.lambda.empty() ? default_lambda_grid(n, tmin) : parse_grid(o.lambda, "lambda");
  auto r = counting_report(cfg.system, tau, grid, n, tmin, 16, o.threads);
  json j;
  j["command"] = "count";
  j["roof"] = o.roof;
  j["n_max"] = n;
  j["h_T"] = r.h_T;
  j["tau_min"] = r.tau_min;
  j["lattice"] = r.lattice;
  if (r.lattice) {
    j["span"] = r.span;
    j["oscillation_flag"] = "lattice roof: pi(lambda)/li(e^{h_T lambda}) oscillates; no ratio claim";
  }
  j["truncation_bias"] = r.truncation_bias;
  j["orbits"] = r.orbits;
  j["words_enumerated"] = r.words_enumerated;
  json rows = json::array();
  Output out;
  for (size_t i = 0; i < r.lambda.size(); ++i) {
    json e;
    e["lambda"] = r.lambda[i];
    e["pi"] = r.pi[i];
    e["li"] = r.li_values[i];
    if (!r.lattice) e["ratio"] = r.ratios[i];
    e["unbiased"] = static_cast<bool>(r.unbiased[i]);
    rows.push_back(e);
    out.summary += "pi(" + num(r.lambda[i]) + ") = " + num(r.pi[i]) + (r.lattice ? "" : ", ratio " + num(r.ratios[i])) +
                   (r.unbiased[i] ? "" : " (biased by truncation)") + "\n";
  }
  if (r.lattice) out.summary += "lattice roof (span " + num(r.span) + "): oscillation flag, no ratio claim\n";
  j["counts"] = rows;
  out.report = j.dump(2) + "\n";
  return out;
}

inline Output cmd_corr(const Config& cfg, const Options& o) {
  CorrelationOptions co;
  co.depth = o.depth ? o.depth : 10;
  co.L = o.L;
  co.seeds.clear();
  for (double v : parse_grid(o.seeds, "seeds")) co.seeds.push_back(static_cast<std::uint64_t>(v));
  co.t_max = o.t_max;
  co.lag_step = o.lag_step;
  co.window_lo = o.window_lo;
  co.window_hi = o.window_hi;
  co.threads = o.threads;
  need_range(o.L >= 1, "L", "L must be >= 1");
  need_range(o.window_lo < o.window_hi && o.window_hi <= o.t_max, "window", "window must satisfy lo < hi <= t_max");
  const Potential& f = cfg.potential(o.potential);
  Potential tau = resolve_roof(cfg, o.roof);
  Expr A = resolve_observable(cfg, o.obs_A, "A"), B = resolve_observable(cfg, o.obs_B, "B");
  auto run = correlation_run(cfg.system, f, tau, A, B, co);
  std::string csv = "seed,t,C,stderr\n";
  Output out;
  out.summary = "||A|| = " + num(run.norm_A) + ", ||B|| = " + num(run.norm_B) + "\n";
  for (const auto& c : run.curves) {
    for (size_t i = 0; i < c.t.size(); ++i)
      csv += std::to_string(c.seed) + "," + num(c.t[i]) + "," + num(c.C[i]) + "," + num(c.stderr_[i]) + "\n";
    out.summary += "seed " + std::to_string(c.seed) + ": ";
    if (c.fitted)
      out.summary += "c_rate = " + num(c.fit.rate) + ", C_amp = " + num(c.fit.amp) + ", r2 = " + num(c.fit.r2) + "\n";
    else
      out.summary += "no fit (" + c.fit_error + ")\n";
  }
  out.report = csv;
  return out;
}

inline Output cmd_distortion(const Config& cfg, const Options& o) {
  int n = o.n ? o.n : 10;
  need_range(n >= 2 && n <= 20, "n", "n must be in [2, 20]");
  auto r = distortion_ratios(cfg.system, n);
  json j;
  j["command"] = "distortion";
  j["n_max"] = n;
  j["ratio_min"] = r.ratio_min;
  j["ratio_max"] = r.ratio_max;
  j["rho"] = r.rho;
  j["p0"] = r.p0;
  j["C1"] = r.C1;
  j["rho1"] = r.rho1;
  j["c0r0"] = r.c0r0;
  Output out;
  out.summary = "co-length-1 ratios in [" + num(r.ratio_min) + ", " + num(r.ratio_max) + "], p0 = " + std::to_string(r.p0) + "\n";
  out.report = j.dump(2) + "\n";
  return out;
}

// Every option value in a fixed order, numbers canonicalized.
inline std::vector<std::pair<std::string, std::string>> key_params(const std::string& cmd, const Options& o,
                                                                    bool roof_given) {
  return {{"potential", o.potential},
          {"roof", roof_given ? o.roof : ""},
          {"depth", std::to_string(o.depth)},
          {"seed", std::to_string(o.seed)},
          {"threads", std::to_string(o.threads)},
          {"a", o.a},
          {"b", o.b},
          {"s", o.s},
          {"lambda", o.lambda},
          {"N", std::to_string(o.N)},
          {"m", std::to_string(o.m)},
          {"n", std::to_string(o.n)},
          {"eps1", num(o.eps1)},
          {"q0", std::to_string(o.q0)},
          {"cone_trials", std::to_string(o.cone_trials)},
          {"l2_trials", std::to_string(o.l2_trials)},
          {"A", o.obs_A},
          {"B", o.obs_B},
          {"L", std::to_string(o.L)},
          {"seeds", o.seeds},
          {"t_max", num(o.t_max)},
          {"lag_step", num(o.lag_step)},
          {"window", num(o.window_lo) + ":" + num(o.window_hi)},
          {"command", cmd}};
}

inline std::string default_out(const std::string& cmd) {
  bool csv = cmd == "sweep" || cmd == "orbits" || cmd == "corr";
  return cmd + (csv ? ".csv" : ".json");
}

// Summary to stdout, report to the --out file; "--out -" sends the report to stdout instead.
inline int emit(const Output& r, const std::string& path, std::ostream& out, std::ostream& err) {
  if (path == "-") {
    out << r.report;
    return 0;
  }
  std::ofstream f(path);
  if (!(f << r.report)) {
    err << "IoError: cannot write '" << path << "'\n";
    return 1;
  }
  out << r.summary;
  return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Thermodynamic formalism workbench for subshifts of finite type and suspension flows"};
  app.require_subcommand(1);
  Options o;
  std::string cmd;

  auto common = [&](CLI::App* c, bool needs_roof) {
    c->add_option("--system", o.system, "System file")->required();
    c->add_option("--out", o.out, "Report path (JSON or CSV; default <command>.json|csv, '-' for stdout)");
    c->add_option("--depth", o.depth, "Grid depth (cells of this many symbols)")->check(CLI::Range(1, 24));
    c->add_option("--threads", o.threads, "Worker cap")->check(CLI::Range(1, 256));
    c->add_option("--seed", o.seed, "RNG seed");
    c->add_flag("--no-cache", o.no_cache, "Ignore and do not write the result cache");
    auto* r = c->add_option("--roof", o.roof, "Roof function name");
    if (needs_roof) r->required();
  };
  auto* pressure = app.add_subcommand("pressure", "Topological pressure of a potential");
  common(pressure, false);
  pressure->add_option("--potential", o.potential, "Potential name");
  auto* rpf = app.add_subcommand("rpf", "Normalized RPF data of f - (P+a) tau");
  common(rpf, false);
  rpf->add_option("--potential", o.potential);
  rpf->add_option("--a", o.a, "a values (list or lo:hi:step)");
  auto* gibbs = app.add_subcommand("gibbs", "Gibbs ratio bounds");
  common(gibbs, false);
  gibbs->add_option("--potential", o.potential);
  gibbs->add_option("--n", o.n, "Longest cylinder");
  auto* sweep = app.add_subcommand("sweep", "Iterate norms of L_ab over an (a, b) grid");
  common(sweep, true);
  sweep->add_option("--potential", o.potential);
  sweep->add_option("--a", o.a);
  sweep->add_option("--b", o.b, "b values (list or lo:hi:step)");
  sweep->add_option("--N", o.N, "Block length");
  sweep->add_option("--m", o.m, "Number of blocks");
  auto* dolg = app.add_subcommand("dolgopyat", "Cancellation-lemma suite");
  common(dolg, true);
  dolg->add_option("--potential", o.potential);
  dolg->add_option("--a", o.a);
  dolg->add_option("--b", o.b);
  dolg->add_option("--N", o.N);
  dolg->add_option("--eps1", o.eps1);
  dolg->add_option("--q0", o.q0);
  dolg->add_option("--cone-trials", o.cone_trials);
  dolg->add_option("--l2-trials", o.l2_trials);
  auto* orbits = app.add_subcommand("orbits", "Primitive periodic orbits with periods (CSV)");
  common(orbits, true);
  orbits->add_option("--n", o.n, "Longest word");
  auto* zeta = app.add_subcommand("zeta", "Truncated Ruelle zeta function");
  common(zeta, true);
  zeta->add_option("--s", o.s, "Complex argument, e.g. 1.2+3i");
  zeta->add_option("--n", o.n, "Truncation length");
  auto* count = app.add_subcommand("count", "Prime orbit counting against li(e^{h_T lambda})");
  common(count, true);
  count->add_option("--lambda", o.lambda, "lambda values (list or lo:hi:step)");
  count->add_option("--n", o.n, "Longest word enumerated");
  auto* corr = app.add_subcommand("corr", "Flow correlation functions and decay fits (CSV)");
  common(corr, true);
  corr->add_option("--potential", o.potential);
  corr->add_option("--A", o.obs_A, "Observable name or expression in x, y, tau");
  corr->add_option("--B", o.obs_B, "Observable name or expression in x, y, tau");
  corr->add_option("--L", o.L, "Orbit length");
  corr->add_option("--seeds", o.seeds, "Seed list");
  corr->add_option("--t-max", o.t_max);
  corr->add_option("--lag-step", o.lag_step);
  corr->add_option("--window-lo", o.window_lo);
  corr->add_option("--window-hi", o.window_hi);
  auto* dist = app.add_subcommand("distortion", "Sub-cylinder diameter ratios");
  common(dist, false);
  dist->add_option("--n", o.n, "Longest word");
  auto* self = app.add_subcommand("selftest", "Run the built-in example checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(argc > 1 && app.get_subcommands().size() ? app.get_subcommands().front()->get_name() : "");
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ConfigError: " << e.what() << "\n";
    return 2;
  }
  cmd = app.get_subcommands().front()->get_name();
  if (cmd == "selftest") {
    (void)self;
    return run_selftest(out);
  }

  try {
    Config cfg = load_config(o.system);
    std::string path = o.out.empty() ? default_out(cmd) : o.out;
    bool roof_given = app.get_subcommands().front()->count("--roof") > 0;
    std::string key = cache_key(cfg.canonical, cmd, key_params(cmd, o, roof_given));
    if (!o.no_cache)
      if (auto hit = cache_load(key)) {
        err << "cache hit " << key.substr(0, 16) << "\n";
        return emit(Output{hit->summary, hit->report}, path, out, err);
      }
    Output r;
    if (cmd == "pressure") r = cmd_pressure(cfg, o, roof_given);
    else if (cmd == "rpf") r = cmd_rpf(cfg, o);
    else if (cmd == "gibbs") r = cmd_gibbs(cfg, o);
    else if (cmd == "sweep") r = cmd_sweep(cfg, o);
    else if (cmd == "dolgopyat") r = cmd_dolgopyat(cfg, o);
    else if (cmd == "orbits") r = cmd_orbits(cfg, o);
    else if (cmd == "zeta") r = cmd_zeta(cfg, o, err);
    else if (cmd == "count") r = cmd_count(cfg, o);
    else if (cmd == "corr") r = cmd_corr(cfg, o);
    else r = cmd_distortion(cfg, o);
    if (!o.no_cache) cache_store(key, CacheEntry{r.summary, r.report});
    return emit(r, path, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "Error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ruelle::cli
