#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "farey/report_io.hpp"
#include "farey/testing/oracles.hpp"

namespace fs = std::filesystem;
using namespace farey;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs fareystat with `args`; stderr goes to `err_file` when given.
Run fareystat(const std::string& args, const std::string& env = "", const fs::path& err_file = {}) {
  std::string cmd = env + (env.empty() ? "" : " ") + "\"" FAREYSTAT_PATH "\" " + args;
  cmd += err_file.empty() ? " 2>/dev/null" : " 2>\"" + err_file.string() + "\"";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fareystat_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FareyCountMatchesTotientSum) {
  const auto r = fareystat("farey count --n 1 --q 100");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::stoll(r.out), oracle::totient_sum(100));
}

TEST_F(Cli, RestrictedCountMatchesOracle) {
  const auto r = fareystat("farey count --n 2 --q 12 --modulus 2 --class 1,1,1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::stoll(r.out), oracle::farey_count(2, 12, ResidueSystem(2, 2, {{1, 1, 1}})));
}

TEST_F(Cli, BadRatioNamesTheField) {
  const auto err = dir_ / "err.txt";
  const auto r = fareystat("dio est --n 1 --q 10 --c 1", "", err);
  EXPECT_EQ(r.code, 2);
  const auto j = io::json::parse(slurp(err));
  EXPECT_EQ(j.at("error").get<std::string>(), "validation");
  EXPECT_EQ(j.at("field").get<std::string>(), "--c");
}

TEST_F(Cli, ModulusWithoutClassIsRejected) {
  const auto err = dir_ / "err.txt";
  const auto r = fareystat("farey count --n 1 --q 10 --modulus 3", "", err);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(io::json::parse(slurp(err)).at("field").get<std::string>(), "--class");
}

TEST_F(Cli, SameSeedGivesIdenticalBytes) {
  const std::string args = "stats p --n 1 --q 300 --window box:0,0.5 --samples 5000 --seed 77";
  const auto a = fareystat(args + " --threads 1");
  const auto b = fareystat(args + " --threads 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  const auto report = io::spacing_from_json(io::json::parse(a.out));
  EXPECT_EQ(report.seed, 77u);
  EXPECT_EQ(report.samples, 5000);
  EXPECT_NE(fareystat("stats p --n 1 --q 300 --window box:0,0.5 --samples 5000 --seed 78").out, a.out);
}

TEST_F(Cli, CensusCsvRoundTripsThroughOutDir) {
  const auto r = fareystat("frob census --n 2 --t 30 --modulus 2 --class 1,1,1 --rgrid 0:2:0.5 "
                           "--format csv --out census.csv",
                           "FAREYSTAT_OUT_DIR=\"" + dir_.string() + "\"");
  EXPECT_EQ(r.code, 0);
  const auto path = dir_ / "census.csv";
  ASSERT_TRUE(fs::exists(path));
  const auto table = io::census_from_csv(slurp(path));
  EXPECT_EQ(table.T, 30);
  EXPECT_EQ(table.modulus, 2);
  EXPECT_EQ(table.classes, (std::vector<IntRow>{{1, 1, 1}}));
  EXPECT_EQ(table.rows.size(), 5u);
  EXPECT_GT(table.full_total, table.restricted_total);
  EXPECT_GT(table.restricted_total, 0);
}

TEST_F(Cli, AbsoluteOutIgnoresOutDir) {
  const auto target = dir_ / "orbit.json";
  const auto r = fareystat("congr --n 1 --modulus 2 --class 0,1 --out \"" + target.string() + "\"",
                           "FAREYSTAT_OUT_DIR=/nonexistent");
  EXPECT_EQ(r.code, 0);
  const auto c = io::orbit_from_json(io::json::parse(slurp(target)));
  EXPECT_EQ(c.astar, 2);
  EXPECT_EQ(c.index, 6);
}

TEST_F(Cli, FrobeniusNumber) {
  const auto r = fareystat("frob number --a 6,9,20");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::stoll(r.out), 43);
  EXPECT_EQ(fareystat("frob number --a 4,6").code, 2);
}
