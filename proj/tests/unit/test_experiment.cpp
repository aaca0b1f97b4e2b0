#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smallnoise/experiment.hpp"

using namespace smallnoise;

namespace {

const char* kMinimal = R"({
  "experiment": "lemma_l1",
  "model": "wright_fisher",
  "a": 1.0,
  "epsilon_ladder": [0.01, 0.001],
  "n_paths": 500,
  "seed": 3
})";

std::string config_error(const std::string& text, const ConfigOverrides& ov = {}) {
  try {
    load_experiment_config(text, ov);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.epsilon_ladder = {1e-1, 1e-2};
  c.n_paths = 300;
  c.bootstrap = 20;
  c.threads = 1;
  c.seed = 11;
  c.t_grid = {0.0, 1.0};
  c.sup_grid_dt = 0.1;
  return c;
}

}  // namespace

TEST(Config, LoadsMinimal) {
  const auto c = load_experiment_config(kMinimal);
  EXPECT_EQ(c.kind, ExperimentKind::lemma_l1);
  EXPECT_EQ(c.epsilon_ladder.size(), 2u);
  EXPECT_EQ(c.n_paths, 500u);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.c_split, 0.75);
  EXPECT_FALSE(c.dt.has_value());
  EXPECT_DOUBLE_EQ(c.dt_for(1e-4), 1e-4);
  EXPECT_DOUBLE_EQ(c.dt_for(1e-2), 1e-3);
}

TEST(Config, Overrides) {
  ConfigOverrides ov;
  ov.n_paths = 7;
  ov.epsilon_ladder = {0.05};
  ov.c_split = 0.6;
  ov.threads = 2;
  const auto c = load_experiment_config(kMinimal, ov);
  EXPECT_EQ(c.n_paths, 7u);
  EXPECT_EQ(c.epsilon_ladder, std::vector<double>{0.05});
  EXPECT_EQ(c.c_split, 0.6);
  EXPECT_EQ(c.threads, 2u);
}

TEST(Config, MalformedReportsLine) {
  const auto msg = config_error("{\n  \"experiment\": \"lemma_l1\",\n  \"a\": ,\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, UnknownAndMissingKeys) {
  std::string text = kMinimal;
  text.insert(text.find('{') + 1, "\"bogus\": 1,");
  EXPECT_NE(config_error(text).find("unknown config key 'bogus'"), std::string::npos);
  EXPECT_NE(config_error(R"({"experiment": "lemma_l1", "model": "wright_fisher", "a": 1, "n_paths": 10, "seed": 1})")
                .find("missing required config key 'epsilon_ladder'"),
            std::string::npos);
}

TEST(Config, TypeErrors) {
  std::string text = kMinimal;
  text.replace(text.find("500"), 3, "\"many\"");
  EXPECT_NE(config_error(text).find("'n_paths'"), std::string::npos);
}

TEST(Config, InvalidValues) {
  std::string text = kMinimal;
  text.insert(text.find('{') + 1, "\"c_split\": 1.2,");
  EXPECT_NE(config_error(text).find("c must lie in (1/2,1)"), std::string::npos);
  std::string empty = kMinimal;
  empty.replace(empty.find("[0.01, 0.001]"), 13, "[]");
  EXPECT_NE(config_error(empty).find("epsilon_ladder"), std::string::npos);
  std::string rising = kMinimal;
  rising.replace(rising.find("[0.01, 0.001]"), 13, "[0.001, 0.01]");
  EXPECT_NE(config_error(rising).find("decreasing"), std::string::npos);
  std::string model = kMinimal;
  model.replace(model.find("wright_fisher"), 13, "nosuch");
  EXPECT_FALSE(config_error(model).empty());
}

TEST(Config, HashIgnoresThreadsAndOutput) {
  auto c = load_experiment_config(kMinimal);
  const auto h = config_hash(c);
  EXPECT_EQ(h.size(), 16u);
  c.threads = 5;
  c.output_dir = "/elsewhere";
  EXPECT_EQ(config_hash(c), h);
  c.seed = 4;
  EXPECT_NE(config_hash(c), h);
}

TEST(Report, CsvFormat) {
  ExperimentReport r;
  r.experiment = "lemma_l1";
  r.metrics.push_back({"l1_t=1", 0.001, 0.25, 0.125, 10});
  r.metrics.push_back({"slope", std::nullopt, 0.5, 0.0, 3});
  EXPECT_EQ(metrics_csv(r),
            "experiment,epsilon,metric,value,stderr,n\n"
            "lemma_l1,0.001,l1_t=1,0.25,0.125,10\n"
            "lemma_l1,,slope,0.5,0,3\n");
}

TEST(Report, PassedLogic) {
  ExperimentReport r;
  r.verdicts.push_back({"gate", true, true, ""});
  r.verdicts.push_back({"soft", false, false, ""});
  EXPECT_TRUE(r.passed());
  r.partial = true;
  EXPECT_FALSE(r.passed());
  r.partial = false;
  r.verdicts.push_back({"gate2", false, true, ""});
  EXPECT_FALSE(r.passed());
}

TEST(Experiment, LemmaL1Runs) {
  const auto r = run_lemma_l1(small(ExperimentKind::lemma_l1));
  EXPECT_FALSE(r.partial);
  const Metric* zero = r.find("l1_t=0", 1e-2);
  ASSERT_NE(zero, nullptr);
  EXPECT_EQ(zero->value, 0.0);
  ASSERT_NE(r.verdict("l1_zero_at_t=0"), nullptr);
  EXPECT_TRUE(r.verdict("l1_zero_at_t=0")->passed);
  const Metric* m = r.find("martingale_t=1", 1e-2);
  ASSERT_NE(m, nullptr);
  EXPECT_NEAR(m->value, 1.0, 4 * m->std_error);
  for (const auto& metric : r.metrics) EXPECT_GT(metric.n, 0u);
}

TEST(Experiment, FluidRuns) {
  auto cfg = small(ExperimentKind::theorem1_fluid);
  cfg.t_horizon = 3.0;
  const auto r = run_theorem1_fluid(cfg, 0.2);
  ASSERT_NE(r.find("sup_error_median", 1e-1), nullptr);
  EXPECT_GT(r.find("sup_error_median", 1e-1)->value, r.find("sup_error_median", 1e-2)->value);
  ASSERT_NE(r.find("loglog_slope"), nullptr);
  const Metric* floor = r.find("scheme_floor", 1e-2);
  ASSERT_NE(floor, nullptr);
  EXPECT_LT(floor->value, 1e-3);
}

TEST(Experiment, DistributionalRuns) {
  const auto r = run_theorem2_distributional(small(ExperimentKind::theorem2_distributional));
  EXPECT_FALSE(r.partial);
  for (const double eps : {1e-1, 1e-2}) {
    ASSERT_NE(r.find("w1_t0", eps), nullptr);
    EXPECT_GE(r.find("w1_t0", eps)->value, 0.0);
    EXPECT_GT(r.find("w1_t0", eps)->std_error, 0.0);
    EXPECT_LE(r.find("ks_t0", eps)->value, 1.0);
  }
  EXPECT_NE(r.verdict("w1_decreasing"), nullptr);
  EXPECT_NE(r.verdict("atom_smallest_eps"), nullptr);
}

TEST(Experiment, PathwiseRuns) {
  const auto r = run_theorem2_pathwise(small(ExperimentKind::theorem2_pathwise));
  EXPECT_FALSE(r.partial);
  ASSERT_NE(r.find("sup_error_median", 1e-2), nullptr);
  ASSERT_NE(r.find("w_hat_mean", 1e-2), nullptr);
  const double coarse = r.find("w_hat_mean", 1e-1)->value;
  const double fine = r.find("w_hat_mean", 1e-2)->value;
  EXPECT_GT(fine, 0.4);
  EXPECT_LT(fine, 1.1);
  EXPECT_GT(fine, coarse);
  EXPECT_NE(r.find("decomp_stochastic_msq", 1e-2), nullptr);
}

TEST(Experiment, ThreadCountDoesNotChangeMetrics) {
  for (const auto kind : {ExperimentKind::theorem2_distributional, ExperimentKind::theorem2_pathwise,
                          ExperimentKind::theorem1_fluid, ExperimentKind::lemma_l1}) {
    auto cfg = small(kind);
    cfg.n_paths = 150;
    cfg.threads = 1;
    const auto one = metrics_csv(run_experiment(cfg));
    cfg.threads = 3;
    EXPECT_EQ(one, metrics_csv(run_experiment(cfg))) << to_string(kind);
  }
}

TEST(Experiment, WriteReport) {
  const auto dir = std::filesystem::temp_directory_path() / "smallnoise_report_test";
  std::filesystem::remove_all(dir);
  auto cfg = small(ExperimentKind::lemma_l1);
  cfg.n_paths = 50;
  const auto r = run_experiment(cfg);
  write_report(r, dir);
  std::ifstream is(dir / "metrics.csv");
  std::stringstream ss;
  ss << is.rdbuf();
  EXPECT_EQ(ss.str(), metrics_csv(r));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  const auto json = report_json(r);
  EXPECT_NE(json.find("\"config_hash\": \"" + r.config_hash + "\""), std::string::npos);
  EXPECT_EQ(json.find("wall_clock"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, KindNames) {
  for (const auto kind : {ExperimentKind::theorem2_distributional, ExperimentKind::theorem2_pathwise,
                          ExperimentKind::theorem1_fluid, ExperimentKind::lemma_l1})
    EXPECT_EQ(parse_experiment_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_experiment_kind("nope"), UsageError);
}
