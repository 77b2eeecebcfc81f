#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LUINV_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe)
    return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe))
    r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("luinv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, RandomThenInvariant) {
  auto r = run("random --dims 2,2,2 --seed 3 --out " + at("s.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("# config"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(at("s.json")));
  EXPECT_EQ(j["kind"], "pure");
  EXPECT_EQ(j["amp"].size(), 8u);

  r = run("invariant --state " + at("s.json") + " --path 1,2,3 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto inv = nlohmann::json::parse(r.out);
  EXPECT_EQ(inv["eigenvalues"].size(), 4u);
  EXPECT_EQ(inv["retracing"], false);
  EXPECT_NEAR(-inv["charpoly"][1].get<double>(), inv["trace"].get<double>(), 1e-12);

  r = run("invariant --state " + at("s.json") + " --path 1,2,3,2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("retracing true"), std::string::npos);
  EXPECT_NE(r.out.find("positive true"), std::string::npos);
}

TEST_F(Cli, SameSeedSameState) {
  ASSERT_EQ(run("random --dims 3,2 --seed 9 --out " + at("a.json")).code, 0);
  ASSERT_EQ(run("random --dims 3,2 --seed 9 --out " + at("b.json")).code, 0);
  EXPECT_EQ(slurp(at("a.json")), slurp(at("b.json")));
}

TEST_F(Cli, SpectrumCsv) {
  ASSERT_EQ(run("random --dims 2,3,2 --seed 1 --out " + at("s.json")).code, 0);
  const auto r = run("spectrum --state " + at("s.json") + " --path 1,2,3 --out " + at("e.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(at("e.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,re,im");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  EXPECT_EQ(rows, 4);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  auto r = run("random --dims 0,2 --out " + at("s.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("invalid dimension: 0"), std::string::npos) << r.out;
  EXPECT_EQ(run("random --dims 2,2 --out /nonexistent_dir/q/s.json").code, 2);
  ASSERT_EQ(run("random --dims 2,2,2 --seed 1 --out " + at("s.json")).code, 0);
  EXPECT_EQ(run("invariant --state " + at("s.json") + " --path 1,1,2").code, 2);
  EXPECT_EQ(run("invariant --state " + at("s.json") + " --path 1,4").code, 2);
  EXPECT_EQ(run("invariant --state " + at("missing.json") + " --path 1,2").code, 2);
  EXPECT_EQ(run("verify --suite bogus").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("survey --dims 2,2 --out " + at("sv")).code, 2);
}

TEST_F(Cli, VerifyPasses) {
  const auto r = run("verify --suite all --trials 3 --seed 5 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("checks"));
  for (const auto& c : j["checks"])
    EXPECT_TRUE(c["passed"].get<bool>()) << c.dump();
}

TEST_F(Cli, SurveyWritesCsvAndJson) {
  const auto r = run("survey --dims 2,2,3 --samples 5 --seed 2 --threads 1 --out " + at("sv"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(at("sv.csv")));
  std::string line;
  int rows = -1;
  while (std::getline(in, line))
    ++rows;
  EXPECT_EQ(rows, 5 * 4);
  const auto j = nlohmann::json::parse(slurp(at("sv.json")));
  EXPECT_EQ(j["samples"], 5);
  EXPECT_TRUE(j.contains("dominant_real_check"));
  EXPECT_TRUE(j.contains("magnitude_law"));
}

TEST_F(Cli, EquivOnQubits) {
  ASSERT_EQ(run("random --dims 2,2,2 --seed 4 --out " + at("s.json")).code, 0);
  auto r = run("equiv --state " + at("s.json") + " --pair 1,3 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["max_defect"].get<double>(), 1e-12);
  EXPECT_NEAR(j["pauli_link"][0][0].get<double>(), 0.5, 1e-15);
  ASSERT_EQ(run("random --dims 3,2 --seed 4 --out " + at("q.json")).code, 0);
  EXPECT_EQ(run("equiv --state " + at("q.json")).code, 2);
}
