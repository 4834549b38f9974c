/**
 * @file config.hpp
 * @brief Line-oriented system file parser.
 *
 *   version 1
 *   alphabet 2
 *   matrix
 *     1 1
 *     1 1
 *   intervals            (optional, one "lo hi" line per symbol)
 *   branches
 *     0 * affine 0.5 0   ('*' = every allowed successor)
 *     1 0 expr "0.5 + 0.4*x" deriv 0.4 0.4
 *   constants c0 1 gamma 2 gamma1 2
 *   potential bern depth 1 values -1.0986 -0.4055
 *   roof quad expr "1 + x^2/2" tau_min 1
 *   observable A expr "x + 0.2*sin(pi*y/tau)^2"
 *
 * '#' starts a comment.
 */
#pragma once
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "thermo.hpp"

namespace ruelle {

struct Config {
  int version = 1;
  std::vector<std::string> alphabet;
  System system;
  std::map<std::string, Potential> potentials;
  std::map<std::string, Potential> roofs;
  std::map<std::string, std::string> observables;
  std::string canonical;  // comment- and whitespace-free form, used for cache keys

  const Potential& potential(const std::string& name) const {
    auto it = potentials.find(name);
    if (it == potentials.end()) throw ConfigError("potential", "unknown potential '" + name + "'");
    return it->second;
  }
  const Potential& roof(const std::string& name) const {
    auto it = roofs.find(name);
    if (it == roofs.end()) throw ConfigError("roof", "unknown roof '" + name + "'");
    return it->second;
  }
  const std::string& observable(const std::string& name) const {
    auto it = observables.find(name);
    if (it == observables.end()) throw ConfigError("observable", "unknown observable '" + name + "'");
    return it->second;
  }
};

namespace detail {

struct Line {
  int no;
  std::vector<std::string> tok;
};

inline std::vector<std::string> tokenize(const std::string& s, int line_no) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
    if (s[i] == '#') break;
    if (s[i] == '"') {
      size_t j = s.find('"', i + 1);
      if (j == std::string::npos) throw ConfigError("syntax", "unterminated string", line_no);
      out.push_back(s.substr(i, j - i + 1));
      i = j + 1;
      continue;
    }
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '#') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool numeric_start(const std::string& t) {
  return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '.' || t[0] == '+');
}

// Decimal literal or a fraction "p/q".
inline double to_num(const std::string& t, const std::string& key, int line) {
  if (auto slash = t.find('/'); slash != std::string::npos && slash > 0 && t.find('/', slash + 1) == std::string::npos)
    return to_num(t.substr(0, slash), key, line) / to_num(t.substr(slash + 1), key, line);
  try {
    size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + t + "'", line);
  }
}

inline std::string unquote(const std::string& t, const std::string& key, int line) {
  if (t.size() < 2 || t.front() != '"' || t.back() != '"') throw ConfigError(key, "expected a quoted expression", line);
  return t.substr(1, t.size() - 2);
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  using namespace detail;
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string s;
    int no = 0;
    while (std::getline(in, s)) {
      ++no;
      auto t = tokenize(s, no);
      if (!t.empty()) lines.push_back({no, std::move(t)});
    }
  }
  Config cfg;
  for (const auto& l : lines) {
    for (size_t i = 0; i < l.tok.size(); ++i) cfg.canonical += (i ? " " : "") + l.tok[i];
    cfg.canonical += "\n";
  }

  std::vector<std::vector<int>> A;
  std::vector<Interval> U;
  std::vector<std::pair<Rational, Rational>> Ue;
  struct BranchSpec { int i; int j; Branch br; int line; };
  std::vector<BranchSpec> branches;
  std::vector<double> constants;
  int constants_line = 0;
  struct PotSpec { std::vector<std::string> tok; int line; bool roof; };
  std::vector<PotSpec> pots;
  bool have_version = false;

  size_t p = 0;
  auto block = [&](size_t& q) {
    std::vector<Line> rows;
    while (q < lines.size() && numeric_start(lines[q].tok[0])) rows.push_back(lines[q++]);
    return rows;
  };
  while (p < lines.size()) {
    const Line& l = lines[p++];
    const std::string& key = l.tok[0];
    if (key == "version") {
      if (l.tok.size() != 2) throw ConfigError("version", "expected 'version <n>'", l.no);
      cfg.version = static_cast<int>(to_num(l.tok[1], "version", l.no));
      if (cfg.version != 1) throw ConfigError("version", "unsupported version " + l.tok[1], l.no);
      have_version = true;
    } else if (key == "alphabet") {
      if (l.tok.size() == 2 && std::isdigit(static_cast<unsigned char>(l.tok[1][0]))) {
        int k = static_cast<int>(to_num(l.tok[1], "alphabet", l.no));
        for (int s = 0; s < k; ++s) cfg.alphabet.push_back(std::to_string(s));
      } else {
        cfg.alphabet.assign(l.tok.begin() + 1, l.tok.end());
      }
      if (cfg.alphabet.size() < 2) throw ConfigError("alphabet", "need at least two symbols", l.no);
    } else if (key == "matrix") {
      std::vector<Line> rows = block(p);
      if (l.tok.size() > 1) rows.insert(rows.begin(), Line{l.no, {l.tok.begin() + 1, l.tok.end()}});
      for (const auto& r : rows) {
        std::vector<int> row;
        for (const auto& t : r.tok) {
          if (t != "0" && t != "1") throw ConfigError("matrix", "entries must be 0 or 1, got '" + t + "'", r.no);
          row.push_back(t == "1");
        }
        A.push_back(row);
      }
    } else if (key == "intervals") {
      for (const auto& r : block(p)) {
        if (r.tok.size() != 2) throw ConfigError("intervals", "expected 'lo hi'", r.no);
        U.push_back({to_num(r.tok[0], "intervals", r.no), to_num(r.tok[1], "intervals", r.no)});
        try {
          Ue.push_back({parse_rational(r.tok[0]), parse_rational(r.tok[1])});
        } catch (const ConfigError&) {
          throw ConfigError("intervals", "bad number", r.no);
        }
      }
    } else if (key == "branches") {
      for (const auto& r : block(p)) {
        if (r.tok.size() < 3) throw ConfigError("branches", "expected 'i j affine a b' or 'i j expr \"...\" deriv lo hi'", r.no);
        int i = static_cast<int>(to_num(r.tok[0], "branches", r.no));
        int j = r.tok[1] == "*" ? -1 : static_cast<int>(to_num(r.tok[1], "branches", r.no));
        Branch br;
        if (r.tok[2] == "affine") {
          if (r.tok.size() != 5) throw ConfigError("branches", "affine needs slope and offset", r.no);
          to_num(r.tok[3], "branches", r.no);
          to_num(r.tok[4], "branches", r.no);
          br = Branch::affine(r.tok[3], r.tok[4]);
        } else if (r.tok[2] == "expr") {
          if (r.tok.size() != 7 || r.tok[4] != "deriv")
            throw ConfigError("branches", "expr branch needs 'deriv lo hi'", r.no);
          try {
            br = Branch::expression(unquote(r.tok[3], "branches", r.no), to_num(r.tok[5], "branches", r.no),
                                    to_num(r.tok[6], "branches", r.no));
          } catch (const ConfigError& e) {
            if (e.line() > 0) throw;
            throw ConfigError("branches", e.what(), r.no);
          }
        } else {
          throw ConfigError("branches", "unknown branch kind '" + r.tok[2] + "'", r.no);
        }
        branches.push_back({i, j, br, r.no});
      }
    } else if (key == "constants") {
      constants_line = l.no;
      std::map<std::string, double> kv;
      for (size_t t = 1; t + 1 < l.tok.size(); t += 2) kv[l.tok[t]] = to_num(l.tok[t + 1], "constants", l.no);
      if (l.tok.size() != 7 || !kv.count("c0") || !kv.count("gamma") || !kv.count("gamma1"))
        throw ConfigError("constants", "expected 'constants c0 <v> gamma <v> gamma1 <v>'", l.no);
      constants = {kv["c0"], kv["gamma"], kv["gamma1"]};
    } else if (key == "potential" || key == "roof") {
      pots.push_back({l.tok, l.no, key == "roof"});
    } else if (key == "observable") {
      if (l.tok.size() != 4 || l.tok[2] != "expr") throw ConfigError("observable", "expected 'observable <name> expr \"...\"'", l.no);
      std::string src = unquote(l.tok[3], "observable", l.no);
      try {
        Expr check(src);
      } catch (const ConfigError& e) {
        throw ConfigError("observable", e.what(), l.no);
      }
      cfg.observables[l.tok[1]] = src;
    } else if (numeric_start(key)) {
      throw ConfigError("syntax", "stray numeric line", l.no);
    } else {
      throw ConfigError(key, "unknown key", l.no);
    }
  }
  if (!have_version) throw ConfigError("version", "missing 'version' line");
  if (A.empty()) throw ConfigError("matrix", "missing transition matrix");
  int k = static_cast<int>(A.size());
  if (!cfg.alphabet.empty() && static_cast<int>(cfg.alphabet.size()) != k)
    throw ConfigError("alphabet", "alphabet size does not match matrix");
  if (cfg.alphabet.empty())
    for (int s = 0; s < k; ++s) cfg.alphabet.push_back(std::to_string(s));
  SymbolicSystem sym(A);

  std::vector<std::vector<std::optional<Branch>>> g(k, std::vector<std::optional<Branch>>(k));
  std::vector<bool> star(k, false);
  for (const auto& b : branches) {
    if (b.i < 0 || b.i >= k || b.j < -1 || b.j >= k) throw ConfigError("branches", "symbol out of range", b.line);
    if (b.j == -1) {
      star[b.i] = true;
      for (int j : sym.successors(b.i)) g[b.i][j] = b.br;
    } else {
      if (!sym.allowed(b.i, b.j)) throw ConfigError("branches", "branch for a forbidden transition", b.line);
      g[b.i][b.j] = b.br;
    }
  }
  for (int i = 0; i < k; ++i)
    for (int j : sym.successors(i))
      if (!g[i][j]) throw ConfigError("branches", "missing branch for transition " + std::to_string(i) + " " + std::to_string(j));
  if (U.empty()) {
    bool ifs = std::all_of(star.begin(), star.end(), [](bool b) { return b; });
    for (int i = 0; i < k; ++i) {
      if (ifs) {
        const Branch& br = *g[i][sym.first_successor(i)];
        U.push_back({br(0.0), br(1.0)});
        if (br.exact()) Ue.push_back({br.apply_exact(0), br.apply_exact(1)});
      } else {
        U.push_back({static_cast<double>(i) / k, static_cast<double>(i + 1) / k});
        Ue.push_back({Rational(i, k), Rational(i + 1, k)});
      }
    }
    if (static_cast<int>(Ue.size()) != k) Ue.clear();
  } else if (static_cast<int>(U.size()) != k) {
    throw ConfigError("intervals", "need one interval per symbol");
  }
  cfg.system = System(sym, U, g, Ue);
  if (!constants.empty()) {
    try {
      cfg.system.set_constants(constants[0], constants[1], constants[2]);
    } catch (const ConfigError& e) {
      throw ConfigError("constants", e.what(), constants_line);
    }
  }

  cfg.potentials["zero"] = Potential::constant(0.0);
  cfg.potentials["zero"].set_name("zero");
  for (const auto& ps : pots) {
    const std::string key = ps.roof ? "roof" : "potential";
    const auto& t = ps.tok;
    if (t.size() < 4) throw ConfigError(key, "expected '" + key + " <name> depth <d> values ...' or '" + key + " <name> expr \"...\"'", ps.line);
    std::string name = t[1];
    Potential pot;
    size_t next = 0;
    try {
      if (t[2] == "expr") {
        pot = Potential::expression(unquote(t[3], key, ps.line), name);
        next = 4;
      } else if (t[2] == "depth" || t[2].rfind("depth", 0) == 0) {
        size_t q = 3;
        int depth;
        if (t[2] == "depth") depth = static_cast<int>(to_num(t[q++], key, ps.line));
        else depth = static_cast<int>(to_num(t[2].substr(5), key, ps.line));
        if (q >= t.size() || t[q] != "values") throw ConfigError(key, "expected 'values' after depth", ps.line);
        ++q;
        std::vector<double> vals;
        while (q < t.size() && numeric_start(t[q])) vals.push_back(to_num(t[q++], key, ps.line));
        pot = Potential::table(sym, depth, vals, name);
        next = q;
      } else {
        throw ConfigError(key, "expected 'depth' or 'expr' after the name", ps.line);
      }
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(key, e.what(), ps.line);
    }
    if (ps.roof) {
      if (next + 2 != t.size() || t[next] != "tau_min") throw ConfigError("tau_min", "roof '" + name + "' must declare 'tau_min <value>'", ps.line);
      double tm = to_num(t[next + 1], "tau_min", ps.line);
      if (!(tm > 0)) throw ConfigError("tau_min", "tau_min must be positive", ps.line);
      pot.set_declared_min(tm);
      // The declared minimum must not exceed the sampled roof.
      Grid probe(cfg.system, std::min(10, std::max(1, static_cast<int>(std::log(4096.0) / std::log(static_cast<double>(k))))));
      for (double v : pot.on_edges(probe))
        if (v < tm - 1e-12) throw ConfigError("tau_min", "roof '" + name + "' takes value " + fmt_g(v) + " below tau_min", ps.line);
      cfg.roofs[name] = pot;
    } else {
      if (next != t.size()) throw ConfigError(key, "unexpected trailing tokens", ps.line);
      cfg.potentials[name] = pot;
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("system", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ruelle
