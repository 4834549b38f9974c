// Pressure and flow entropy on the bundled systems.
//   demo_pressure [configs-dir]
#include <cstdio>

#include "ruelle/config.hpp"
#include "ruelle/orbits.hpp"

using namespace ruelle;

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "configs";
  try {
    for (const char* name : {"full2.cfg", "golden.cfg", "nonlinear.cfg"}) {
      Config cfg = load_config(dir + "/" + name);
      auto P = pressure_report(cfg.system, Potential::constant(0.0), 12);
      std::printf("%-14s h_top = %.15f (depth %d, depth+2 change %.2e)\n", name, P.value, P.depth, P.error_proxy);
      for (const auto& [rname, roof] : cfg.roofs)
        std::printf("%-14s   roof %-8s h_T = %.12f\n", "", rname.c_str(), flow_entropy(cfg.system, roof, 12));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
