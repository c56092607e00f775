#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "golden_fixture.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string binary() {
  const char* b = std::getenv("WLD_BINARY");
  return b ? b : "wld";
}

// Runs the CLI with stderr discarded; cache overrides WLD_CACHE_DIR when set.
Run run_wld(const std::string& args, const std::string& cache = "") {
  std::string cmd;
  if (!cache.empty()) cmd = "WLD_CACHE_DIR='" + cache + "' ";
  cmd += "'" + binary() + "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("wld_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(Cli, VerifyIdentitiesPasses) {
  const auto r = run_wld("verify-identities --k-max 8");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r.out);
  EXPECT_TRUE(j["result"]["all_pass"].get<bool>());
  EXPECT_EQ(j["config"]["k_max"], 8);
  EXPECT_FALSE(j["version"].get<std::string>().empty());
}

TEST(Cli, DensityFromCacheIsReproducible) {
  const auto a = run_wld("density --k 1 --T 1000");
  ASSERT_EQ(a.code, 0) << "needs the T = 1000 window in WLD_CACHE_DIR";
  auto ja = parse(a.out);
  const auto& res = ja["result"];
  EXPECT_NEAR(res["rhs_k1"].get<double>(), golden().real("rhs_k1|T=1000,delta=0.45"),
              1e-6 * golden().real("rhs_k1|T=1000,delta=0.45"));
  EXPECT_LT(std::fabs(res["lhs"].get<double>() / res["rhs_k1"].get<double>() - 1), 0.15);
  EXPECT_TRUE(res.contains("ratio"));
  EXPECT_EQ(ja["config"]["T"], 1000.0);

  auto jb = parse(run_wld("density --k 1 --T 1000 --threads 1").out);
  ja.erase("generated_at");
  jb.erase("generated_at");
  ja["config"].erase("threads");
  jb["config"].erase("threads");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, MissingCacheLeavesNoOutput) {
  const auto empty = scratch("empty_cache");
  fs::create_directories(empty);
  const auto out = scratch("density.json");
  fs::remove(out);
  const auto r = run_wld("density --T 1000 --out '" + out.string() + "'", empty.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run_wld("density --k 3 --T 1000").code, 2);
  EXPECT_EQ(run_wld("density --T 10").code, 2);
  EXPECT_EQ(run_wld("rmt --samples 10").code, 2);
  EXPECT_EQ(run_wld("rmt --n 500").code, 2);
  EXPECT_EQ(run_wld("density --shape square").code, 2);
  EXPECT_EQ(run_wld("--no-such-flag").code, 2);
  EXPECT_EQ(run_wld("").code, 2);
  EXPECT_EQ(run_wld("--help").code, 0);
}

TEST(Cli, RmtWritesCsvAndSummary) {
  const auto csv = scratch("hist.csv");
  const auto r = run_wld("rmt --n 12 --k 0 --samples 10000 --bins 10 --seed 3 --csv '" + csv.string() + "'");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r.out);
  EXPECT_TRUE(j["result"].contains("kernel_deviation"));
  EXPECT_EQ(j["config"]["seed"], 3);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x_lo,x_hi,density,stderr");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 10);
  // same seed, same bytes
  auto again = parse(run_wld("rmt --n 12 --k 0 --samples 10000 --bins 10 --seed 3").out);
  auto first = j;
  first.erase("generated_at");
  again.erase("generated_at");
  EXPECT_EQ(first.dump(), again.dump());
}

TEST(Cli, RmtSignalsThinBins) {
  EXPECT_EQ(run_wld("rmt --n 10 --k 2 --sampling direct --samples 10000 --bins 20 --x-min -0.5 --x-max 0.5")
                .code,
            4);
}

TEST(Cli, LargeValuesTable) {
  const auto csv = scratch("large.csv");
  const auto r = run_wld("largevalues --k 1 --T 1000 --U 1 --U 2 --U 3 --csv '" + csv.string() + "'");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r.out)["result"];
  EXPECT_TRUE(j["monotone"].get<bool>());
  ASSERT_EQ(j["counts"].size(), 3u);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "gamma,max_abs_zeta,log_excess");
}

TEST(Cli, ReportExitsOnToleranceViolation) {
  const auto loose = run_wld("report --T 1000 --tol-k0 1 --tol-k1 1 --tol-k2 1");
  EXPECT_EQ(loose.code, 0);
  EXPECT_TRUE(parse(loose.out)["result"]["pass"].get<bool>());
  const auto tight = run_wld("report --T 1000 --tol-k1 1e-9");
  EXPECT_EQ(tight.code, 4);
  EXPECT_FALSE(parse(tight.out)["result"]["pass"].get<bool>());
}

TEST(Cli, PredictAndOracleList) {
  const auto p = parse(run_wld("predict --k 0 --T 1000").out)["result"];
  EXPECT_DOUBLE_EQ(p["prediction"].get<double>(), 1.0);
  const auto o = run_wld("oracle --list");
  ASSERT_EQ(o.code, 0);
  EXPECT_GT(parse(o.out)["result"]["entries"].get<int>(), 100);
}
