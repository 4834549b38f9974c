#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ruelle/cli.hpp"

namespace fs = std::filesystem;
using namespace ruelle;

namespace {

std::string cfg_path(const std::string& name) { return std::string(RUELLE_SOURCE_DIR) + "/configs/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("ruelle_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir / "cache");
    setenv("RUELLE_CACHE_DIR", (dir / "cache").c_str(), 1);
  }
  void TearDown() override { fs::remove_all(dir); }

  Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "ruelle");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }
  std::string write(const std::string& name, const std::string& text) {
    auto p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

}  // namespace

TEST_F(Cli, PressureOfFullShift) {
  auto r = run({"pressure", "--system", cfg_path("full2.cfg"), "--potential", "zero", "--depth", "10", "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.693147180559945"), std::string::npos);
  auto j = nlohmann::json::parse(r.out.substr(r.out.find('{')));
  EXPECT_NEAR(j["pressure"].get<double>(), std::log(2.0), 1e-12);
}

TEST_F(Cli, DefaultReportFile) {
  auto old = fs::current_path();
  fs::current_path(dir);
  auto r = run({"count", "--system", cfg_path("full2.cfg"), "--roof", "const1", "--lambda", "3.5"});
  fs::current_path(old);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pi(3.5) = 5"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "count.json"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"selftest"}).code, 0);
  // Unknown potential is a configuration error.
  auto r = run({"pressure", "--system", cfg_path("full2.cfg"), "--potential", "nope", "--out", "-"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ConfigError"), std::string::npos);
  EXPECT_NE(r.err.find("potential"), std::string::npos);
  // Out-of-range and missing arguments.
  EXPECT_EQ(run({"pressure", "--system", cfg_path("full2.cfg"), "--depth", "0"}).code, 2);
  EXPECT_EQ(run({"sweep", "--system", cfg_path("full2.cfg")}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"pressure", "--system", (dir / "missing.cfg").string()}).code, 2);
  // A constant roof has no temporal increment: numerical failure, exit 1.
  r = run({"dolgopyat", "--system", cfg_path("full2.cfg"), "--roof", "const1", "--out", "-"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("DegenerateRoof"), std::string::npos);
}

TEST_F(Cli, ConfigErrorNamesKeyAndLine) {
  auto p = write("bad.cfg",
                 "version 1\n"
                 "alphabet 2\n"
                 "matrix\n"
                 "  1 1\n"
                 "  1 1\n"
                 "branches\n"
                 "  0 * affine 0.5 zero\n"
                 "  1 * affine 0.5 0.5\n");
  auto r = run({"pressure", "--system", p, "--out", "-"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("branches"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.find("line 7: line 7"), std::string::npos) << r.err;
}

TEST_F(Cli, CacheKeyIgnoresFormatting) {
  std::string text = slurp(cfg_path("golden.cfg"));
  std::string spaced;
  // Pad whitespace between tokens; quoted expressions stay as written.
  bool quoted = false;
  for (char c : text) {
    if (c == '"') quoted = !quoted;
    spaced += c == ' ' && !quoted ? std::string("  \t ") : std::string(1, c);
  }
  spaced = "# leading comment\n\n" + spaced;
  auto a = parse_config(text), b = parse_config(spaced);
  EXPECT_EQ(a.canonical, b.canonical);
  cli::Options o;
  o.depth = 10;
  auto k10 = cache_key(a.canonical, "pressure", cli::key_params("pressure", o, false));
  EXPECT_EQ(k10, cache_key(b.canonical, "pressure", cli::key_params("pressure", o, false)));
  o.depth = 11;
  EXPECT_NE(k10, cache_key(a.canonical, "pressure", cli::key_params("pressure", o, false)));
  EXPECT_NE(k10, cache_key(a.canonical, "rpf", cli::key_params("rpf", cli::Options{}, false)));
}

TEST_F(Cli, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Cli, DeterministicAndCached) {
  std::vector<std::string> args = {"sweep", "--system", cfg_path("full2.cfg"), "--roof", "quad", "--b", "10,20",
                                   "--m", "4", "--out", "-"};
  auto first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.err.find("cache hit"), std::string::npos);
  EXPECT_NE(first.out.find("a,b,m,l2_norm,rho_hat,lip_b_norm,monotone_flag"), std::string::npos);
  auto second = run(args);
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.err.find("cache hit"), std::string::npos);
  EXPECT_EQ(first.out, second.out);
  args.push_back("--no-cache");
  auto third = run(args);
  EXPECT_EQ(third.err.find("cache hit"), std::string::npos);
  EXPECT_EQ(first.out, third.out);
}

TEST_F(Cli, CorrelationSeedsReproduce) {
  std::vector<std::string> args = {"corr", "--system", cfg_path("full2.cfg"), "--roof", "quad", "--L", "100000",
                                   "--seeds", "3", "--t-max", "2", "--window-hi", "2", "--no-cache", "--out", "-"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  args[7] = "4";
  EXPECT_NE(run(args).out, a.out);
}

TEST_F(Cli, ZetaDivergentRegionWarns) {
  auto r = run({"zeta", "--system", cfg_path("full2.cfg"), "--roof", "quad", "--s", "0.5+1i", "--n", "10", "--out", "-"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("DivergentRegion"), std::string::npos);
  auto j = nlohmann::json::parse(r.out.substr(r.out.find('{')));
  EXPECT_TRUE(j["divergent"].get<bool>());
}

TEST_F(Cli, BinaryRuns) {
  std::string cmd = std::string(RUELLE_CLI) + " selftest > " + (dir / "st.txt").string() + " 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  auto txt = slurp(dir / "st.txt");
  EXPECT_EQ(txt.find("FAIL"), std::string::npos) << txt;
}
