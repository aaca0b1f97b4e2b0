#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smallnoise/cli.hpp"

using namespace smallnoise;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("smallnoise_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, ValidateExitCodes) {
  EXPECT_EQ(cli({"validate", "--model", "wright_fisher", "--a", "1.0"}).code, 0);
  EXPECT_EQ(cli({"validate", "--model", "nosuch"}).code, 2);
  const auto neg = cli({"validate", "--model", "wright_fisher", "--a", "-1"});
  EXPECT_EQ(neg.code, 2);
  EXPECT_NE(neg.err.find("a must be positive"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"sample", "--target", "nonsense"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, SampleW) {
  const auto r = cli({"sample", "--target", "w", "--a", "1", "--n", "100000", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(dir_ / "samples_w.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "w");
  std::size_t n = 0, zeros = 0;
  while (std::getline(is, line)) {
    ++n;
    zeros += std::stod(line) == 0.0;
  }
  ASSERT_EQ(n, 100000u);
  const double p = std::exp(-2.0);
  EXPECT_NEAR(zeros / double(n), p, 3 * std::sqrt(p * (1 - p) / n));
}

TEST_F(CliTest, SampleX0RangeAndDeterminism) {
  const std::vector<std::string> args{"sample", "--target", "x0", "--model", "wright_fisher", "--a", "1",
                                      "--n",    "2000",     "--out", dir_.string()};
  ASSERT_EQ(cli(args).code, 0);
  const auto first = slurp(dir_ / "samples_x0.csv");
  ASSERT_EQ(cli(args).code, 0);
  EXPECT_EQ(first, slurp(dir_ / "samples_x0.csv"));
  std::istringstream is(first);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    const double v = std::stod(line);
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST_F(CliTest, SampleFellerEndpoint) {
  EXPECT_EQ(cli({"sample", "--target", "feller_endpoint", "--t", "0.5", "--n", "100", "--out", dir_.string()}).code,
            0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "samples_feller_endpoint.csv"));
}

TEST_F(CliTest, UnwritableOutputIsRuntimeFailure) {
  std::ofstream(dir_ / "blocker") << "x";
  EXPECT_EQ(cli({"sample", "--target", "w", "--n", "10", "--out", (dir_ / "blocker").string()}).code, 1);
}

TEST_F(CliTest, ExperimentFromConfig) {
  const auto cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"experiment": "lemma_l1", "model": "wright_fisher", "a": 1,
    "epsilon_ladder": [0.1, 0.01], "n_paths": 200, "seed": 2, "bootstrap": 20, "t_grid": [0, 1]})";
  const auto out = dir_ / "out";
  const auto r = cli({"experiment", "--config", cfg.string(), "--out", out.string(), "--threads", "2"});
  EXPECT_TRUE(r.code == 0 || r.code == 1) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out / "report.json"));
  const auto csv = slurp(out / "metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "experiment,epsilon,metric,value,stderr,n");

  const auto out2 = dir_ / "out2";
  cli({"experiment", "--config", cfg.string(), "--out", out2.string(), "--threads", "1"});
  EXPECT_EQ(csv, slurp(out2 / "metrics.csv"));
  EXPECT_EQ(slurp(out / "report.json"), slurp(out2 / "report.json"));
}

TEST_F(CliTest, ExperimentConfigErrors) {
  const auto bad_c = dir_ / "c.json";
  std::ofstream(bad_c) << R"({"experiment": "theorem2_pathwise", "model": "wright_fisher", "a": 1,
    "epsilon_ladder": [0.01], "n_paths": 10, "seed": 1, "c_split": 1.2})";
  const auto r = cli({"experiment", "--config", bad_c.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("c must lie in (1/2,1)"), std::string::npos);

  const auto empty = dir_ / "e.json";
  std::ofstream(empty) << R"({"experiment": "lemma_l1", "model": "wright_fisher", "a": 1,
    "epsilon_ladder": [], "n_paths": 10, "seed": 1})";
  EXPECT_EQ(cli({"experiment", "--config", empty.string()}).code, 2);

  const auto broken = dir_ / "b.json";
  std::ofstream(broken) << "{\n \"experiment\": \"lemma_l1\"\n \"a\": 1}";
  const auto rb = cli({"experiment", "--config", broken.string()});
  EXPECT_EQ(rb.code, 2);
  EXPECT_NE(rb.err.find("line 3"), std::string::npos) << rb.err;

  EXPECT_EQ(cli({"experiment", "--config", (dir_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"experiment"}).code, 2);
}

TEST_F(CliTest, ExperimentFromFlags) {
  const auto out = dir_ / "flags";
  const auto r = cli({"experiment", "--experiment", "lemma_l1", "--epsilon", "0.1", "--epsilon", "0.05",
                      "--n-paths", "100", "--out", out.string()});
  EXPECT_TRUE(r.code == 0 || r.code == 1) << r.err;
  const auto csv = slurp(out / "metrics.csv");
  EXPECT_NE(csv.find("lemma_l1,0.050000000000000003,"), std::string::npos);
}

TEST_F(CliTest, Paths) {
  const auto r = cli({"paths", "--epsilon", "0.01", "--n-paths", "2", "--dt", "0.01", "--stride", "50", "--out",
                      dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "paths.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "path_index,t,x,y,absorbed");
}
