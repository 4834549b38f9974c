#pragma once
#include <random>

#include "ruelle/config.hpp"
#include "ruelle/thermo.hpp"

namespace fx {

using namespace ruelle;

inline SymbolicSystem full2() { return SymbolicSystem({{1, 1}, {1, 1}}); }
inline SymbolicSystem golden() { return SymbolicSystem({{1, 1}, {1, 0}}); }

// Doubling map: g_0 = x/2, g_1 = (x+1)/2.
inline System dyadic() {
  return System::ifs(full2(), {Branch::affine("0.5", "0"), Branch::affine("0.5", "0.5")});
}

// Golden-mean shift on U_0 = [0,1/2], U_1 = [1/2,1] with sub-interval ratios 0.4 and 0.5.
inline System golden_cantor() {
  std::vector<std::vector<std::optional<Branch>>> g(2, std::vector<std::optional<Branch>>(2));
  g[0][0] = Branch::affine("0.4", "0");
  g[0][1] = Branch::affine("0.5", "0");
  g[1][0] = Branch::affine("0.4", "0.5");
  std::vector<Interval> U{{0, 0.5}, {0.5, 1}};
  std::vector<std::pair<Rational, Rational>> Ue{{Rational(0), Rational(1, 2)}, {Rational(1, 2), Rational(1)}};
  return System(golden(), U, g, Ue);
}

// Full 2-shift with branches of derivative in [0.4, 0.6].
inline System nonlinear() {
  return System::ifs(full2(), {Branch::expression("0.4*x + 0.1*x^2", 0.4, 0.6),
                               Branch::expression("0.5 + 0.4*x + 0.1*x^2", 0.4, 0.6)});
}

inline Potential quad_roof() {
  auto p = Potential::expression("1 + x^2/2", "quad");
  p.set_declared_min(1.0);
  return p;
}
inline Potential affine_roof() {
  auto p = Potential::expression("1 + x/2", "affine");
  p.set_declared_min(1.0);
  return p;
}

inline RealField random_real(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  RealField v(n);
  for (auto& x : v) x = N(rng);
  return v;
}

}  // namespace fx
