#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "smallnoise/errors.hpp"
#include "smallnoise/flow.hpp"
#include "smallnoise/sde.hpp"
#include "smallnoise/stats.hpp"
#include "smallnoise/wlaw.hpp"

using namespace smallnoise;

namespace {

SimConfig sim(double dt, double horizon, std::uint64_t seed = 1, std::size_t stride = 1) {
  SimConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.seed = seed;
  c.record_stride = stride;
  return c;
}

}  // namespace

TEST(SimulateX, Deterministic) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const auto p1 = simulate_X(m, 1e-2, 0.1, sim(1e-3, 2.0, 5), 3);
  const auto p2 = simulate_X(m, 1e-2, 0.1, sim(1e-3, 2.0, 5), 3);
  EXPECT_EQ(p1.values, p2.values);
  EXPECT_EQ(p1.times, p2.times);
  const auto p3 = simulate_X(m, 1e-2, 0.1, sim(1e-3, 2.0, 5), 4);
  EXPECT_NE(p1.values, p3.values);
}

TEST(SimulateX, GridAndStride) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const auto p = simulate_X(m, 1e-2, 0.1, sim(0.3, 1.0, 1, 2));
  // h = 1/ceil(1/0.3) = 0.25: steps 0, 2, 4 recorded.
  ASSERT_EQ(p.times.size(), 3u);
  EXPECT_DOUBLE_EQ(p.times[1], 0.5);
  EXPECT_DOUBLE_EQ(p.times.back(), 1.0);
  const auto q = simulate_X(m, 1e-2, 0.1, sim(0.25, 1.0, 1, 3));
  EXPECT_DOUBLE_EQ(q.times.back(), 1.0);
}

TEST(SimulateX, AbsorbedFromZero) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const auto p = simulate_X(m, 1e-2, 0.0, sim(1e-2, 1.0));
  ASSERT_TRUE(p.absorbed_at.has_value());
  EXPECT_EQ(*p.absorbed_at, 0.0);
  for (const double v : p.values) EXPECT_EQ(v, 0.0);
}

TEST(SimulateX, PositivityAndAbsorption) {
  const auto m = builtin_model("wright_fisher", 1.0);
  int absorbed = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto p = simulate_X(m, 1e-2, 1e-2, sim(1e-2, 5.0, 2), i);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      ASSERT_GE(p.values[k], 0.0);
      ASSERT_LE(p.values[k], 1.0);
      if (p.absorbed_at && p.times[k] >= *p.absorbed_at) ASSERT_EQ(p.values[k], 0.0);
    }
    absorbed += p.absorbed_at.has_value();
  }
  EXPECT_GT(absorbed, 0);
}

TEST(SimulateX, NoiselessMatchesFlow) {
  const auto m = without_noise(builtin_model("wright_fisher", 1.0));
  double prev = 0.0;
  for (const double dt : {1e-2, 5e-3, 2.5e-3}) {
    const auto p = simulate_X(m, 1e-2, 0.2, sim(dt, 3.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < p.times.size(); ++k)
      worst = std::max(worst, std::abs(p.values[k] - m.closed_form_flow(p.times[k], 0.2)));
    EXPECT_LE(worst, 0.1 * dt);
    if (prev > 0.0) EXPECT_NEAR(worst / prev, 0.5, 0.05);
    prev = worst;
  }
}

TEST(SimulateX, FirstMomentBound) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const double eps = 1e-3;
  const std::vector<double> cp{1.0};
  std::vector<double> scaled(10000);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    auto rng = path_stream(17, i);
    scaled[i] = simulate_X_at(m, eps, eps, cp, 1e-3, rng).values[0] / eps;
  }
  const auto e = mean_estimate(scaled);
  EXPECT_LE(e.value, std::exp(1.0) + 3 * e.std_error);
}

TEST(SimulateX, CheckpointsMatchFullPath) {
  const auto m = builtin_model("balancing_selection", 1.0);
  const auto p = simulate_X(m, 1e-2, 0.05, sim(1e-2, 1.0, 9), 2);
  const std::vector<double> cp{0.5, 1.0};
  auto rng = path_stream(9, 2);
  const auto s = simulate_X_at(m, 1e-2, 0.05, cp, 1e-2, rng);
  EXPECT_EQ(s.values[0], p.values[50]);
  EXPECT_EQ(s.values[1], p.values.back());
}

TEST(SimulateX, Validation) {
  const auto m = builtin_model("wright_fisher", 1.0);
  EXPECT_THROW(simulate_X(m, -1.0, 0.1, sim(1e-2, 1.0)), UsageError);
  EXPECT_THROW(simulate_X(m, 1e-2, 2.0, sim(1e-2, 1.0)), DomainError);
  EXPECT_THROW(simulate_X(m, 1e-2, 0.1, sim(-1.0, 1.0)), UsageError);
}

TEST(SimulateX, NonFiniteIsNumericalFailure) {
  auto m = builtin_model("linear_feller", 1.0);
  m.drift = [](double x) { return x > 0.5 ? std::nan("") : x; };
  try {
    simulate_X(m, 1e-6, 0.4, sim(1e-2, 2.0));
    FAIL();
  } catch (const NumericalFailure& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
    EXPECT_GT(e.time(), 0.0);
  }
}

TEST(PlanSegments, CheckpointsOnGrid) {
  const std::vector<double> cp{0.0, 0.35, 1.0, 1.0};
  const auto segs = plan_segments(cp, 0.1);
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[0].steps, 0u);
  EXPECT_EQ(segs[1].steps, 4u);
  EXPECT_NEAR(segs[1].h * segs[1].steps, 0.35, 1e-15);
  EXPECT_EQ(segs[2].steps, 7u);
  EXPECT_EQ(segs[3].steps, 0u);
}

TEST(SimulateCoupled, SharedIncrements) {
  // With a linear model the two coupled paths are the same SDE up to scaling.
  const auto m = builtin_model("linear_feller", 1.0);
  const double eps = 1e-3;
  const auto pair = simulate_coupled(m, eps, sim(1e-3, 1.0, 4), 11);
  ASSERT_EQ(pair.x_path.values.size(), pair.y_path.values.size());
  for (std::size_t k = 0; k < pair.x_path.values.size(); ++k)
    ASSERT_NEAR(pair.x_path.values[k] / eps, pair.y_path.values[k], 1e-9 * (1 + pair.y_path.values[k]));
  EXPECT_EQ(pair.path_index, 11u);
  EXPECT_EQ(pair.x_path.values.front(), eps);
  EXPECT_EQ(pair.y_path.values.front(), 1.0);
}

TEST(SimulateCoupled, FellerMartingale) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const std::vector<double> cp{3.0};
  std::vector<double> w(10000);
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto rng = path_stream(23, i);
    w[i] = std::exp(-3.0) * simulate_coupled_at(m, 1e-3, cp, 1e-3, rng).y[0];
  }
  const auto e = mean_estimate(w);
  EXPECT_NEAR(e.value, 1.0, 3 * e.std_error);
}

TEST(SimulateCoupled, CheckpointsAgreeWithPaths) {
  const auto m = builtin_model("wright_fisher", 1.0);
  const auto pair = simulate_coupled(m, 1e-2, sim(1e-2, 1.0, 8), 5);
  const std::vector<double> cp{0.0, 1.0};
  auto rng = path_stream(8, 5);
  const auto c = simulate_coupled_at(m, 1e-2, cp, 1e-2, rng);
  EXPECT_EQ(c.x_scaled[0], 1.0);
  EXPECT_EQ(c.y[0], 1.0);
  EXPECT_DOUBLE_EQ(c.x_scaled[1], pair.x_path.values.back() / 1e-2);
  EXPECT_EQ(c.y[1], pair.y_path.values.back());
}

TEST(FellerEndpoint, Rate) {
  EXPECT_NEAR(feller_endpoint_rate(1.0, 1.0, 1e6), 2.0, 1e-12);
  EXPECT_NEAR(feller_endpoint_rate(2.0, 0.5, 0.5), 8.0 / (1 - std::exp(-1.0)), 1e-12);
}

TEST(FellerEndpoint, MomentsAndAtom) {
  const double t = 1.0;
  const auto w = exact_feller_endpoint(1.0, 1.0, t, 100000, 3);
  const auto e = mean_estimate(w);
  EXPECT_NEAR(e.value, 1.0, 3 * e.std_error);
  const double ct = feller_endpoint_rate(1.0, 1.0, t);
  const auto ci = binomial_ci(static_cast<std::size_t>(zero_fraction(w) * w.size() + 0.5), w.size(), 3.0);
  EXPECT_LE(std::abs(ci.center - std::exp(-ct)), ci.half_width());
}

TEST(FellerEndpoint, LaplaceTransform) {
  // E exp(-lambda W_t) = exp(-c_t lambda / (c_t + lambda)).
  const double t = 0.7, a = 1.3, b = 0.8;
  const auto w = exact_feller_endpoint(a, b, t, 100000, 4);
  const double ct = feller_endpoint_rate(a, b, t);
  for (const double lam : {0.5, 1.0, 3.0}) {
    const auto e = empirical_laplace_estimate(w, lam);
    EXPECT_NEAR(e.value, std::exp(-ct * lam / (ct + lam)), 3.5 * e.std_error) << lam;
  }
}

TEST(FellerEndpoint, LongTimeMatchesW) {
  const auto w_t = exact_feller_endpoint(1.0, 1.0, 50.0, 20000, 5);
  const auto w = sample_W(LimitLaw::from_slopes(1.0, 1.0), 20000, 6);
  EXPECT_GT(ks_pvalue(ks_statistic(w_t, w), w_t.size(), w.size()), 0.01);
}

TEST(FellerEndpoint, ThreadIndependent) {
  EXPECT_EQ(exact_feller_endpoint(1.0, 1.0, 1.0, 5000, 3, 1), exact_feller_endpoint(1.0, 1.0, 1.0, 5000, 3, 4));
  EXPECT_EQ(euler_feller_endpoint(1.0, 1.0, 0.5, 1e-2, 300, 3, 1),
            euler_feller_endpoint(1.0, 1.0, 0.5, 1e-2, 300, 3, 3));
}

TEST(PathsCsv, Header) {
  const auto m = builtin_model("wright_fisher", 1.0);
  std::vector<CoupledPair> pairs{simulate_coupled(m, 1e-2, sim(0.5, 1.0, 1), 0)};
  std::ostringstream os;
  write_paths_csv(os, pairs);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "path_index,t,x,y,absorbed");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}
