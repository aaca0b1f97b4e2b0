#include "smallnoise/sde.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "smallnoise/errors.hpp"
#include "smallnoise/parallel.hpp"

namespace smallnoise {

namespace {

void check_epsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw UsageError("epsilon must be positive");
}

[[noreturn]] void fail_step(std::size_t k, double t, double x) {
  throw NumericalFailure("non-finite state at step " + std::to_string(k), t, x);
}

std::size_t steps_for(double length, double dt) {
  if (length <= 0.0) return 0;
  const double r = length / dt;
  const double n = std::ceil(r - 1e-9 * std::max(1.0, r));
  return static_cast<std::size_t>(std::max(1.0, n));
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw UsageError("dt must be positive");
  if (!(horizon > 0.0)) throw UsageError("horizon must be positive");
  if (dt > horizon) throw UsageError("dt must not exceed the horizon");
  if (record_stride < 1) throw UsageError("record_stride must be at least 1");
}

std::vector<Segment> plan_segments(std::span<const double> checkpoints, double dt) {
  if (!(dt > 0.0)) throw UsageError("dt must be positive");
  std::vector<Segment> out;
  out.reserve(checkpoints.size());
  double prev = 0.0;
  for (const double c : checkpoints) {
    if (!(c >= prev)) throw UsageError("checkpoints must be nonnegative and nondecreasing");
    const std::size_t n = steps_for(c - prev, dt);
    out.push_back({n, n > 0 ? (c - prev) / static_cast<double>(n) : 0.0});
    prev = c;
  }
  return out;
}

CheckpointSample simulate_X_at(const ModelSpec& model, double epsilon, double x0,
                               std::span<const double> checkpoints, double dt, CounterRng& rng) {
  check_epsilon(epsilon);
  if (!(x0 >= 0.0) || !(x0 <= model.state_upper)) throw DomainError("x0 outside the state space");
  const auto segments = plan_segments(checkpoints, dt);
  TruncatedEuler x(model, epsilon, x0);
  CheckpointSample out;
  out.values.reserve(checkpoints.size());
  if (x.absorbed()) out.absorbed_at = 0.0;
  double t = 0.0;
  std::size_t k = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto [n, h] = segments[s];
    if (!x.absorbed()) {
      const double sqrt_h = std::sqrt(h);
      for (std::size_t i = 0; i < n; ++i, ++k) {
        if (!x.step(h, sqrt_h, rng.normal())) fail_step(k, t, x.value());
        t = (s > 0 ? checkpoints[s - 1] : 0.0) + static_cast<double>(i + 1) * h;
        if (x.absorbed()) {
          out.absorbed_at = t;
          break;
        }
      }
    }
    t = checkpoints[s];
    out.values.push_back(x.value());
  }
  return out;
}

Path simulate_X(const ModelSpec& model, double epsilon, double x0, const SimConfig& cfg,
                std::uint64_t path_index) {
  cfg.validate();
  check_epsilon(epsilon);
  if (!(x0 >= 0.0) || !(x0 <= model.state_upper)) throw DomainError("x0 outside the state space");
  auto rng = path_stream(cfg.seed, path_index);
  const std::size_t n = steps_for(cfg.horizon, cfg.dt);
  const double h = cfg.horizon / static_cast<double>(n);
  const double sqrt_h = std::sqrt(h);

  Path p;
  p.epsilon = epsilon;
  TruncatedEuler x(model, epsilon, x0);
  if (x.absorbed()) p.absorbed_at = 0.0;
  p.times.push_back(0.0);
  p.values.push_back(x.value());
  for (std::size_t k = 0; k < n; ++k) {
    if (!x.step(h, sqrt_h, rng.normal())) fail_step(k, static_cast<double>(k) * h, x.value());
    const double t = k + 1 == n ? cfg.horizon : static_cast<double>(k + 1) * h;
    if (x.absorbed() && !p.absorbed_at) p.absorbed_at = t;
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == n) {
      p.times.push_back(t);
      p.values.push_back(x.value());
    }
  }
  return p;
}

CoupledPair simulate_coupled(const ModelSpec& model, double epsilon, const SimConfig& cfg,
                             std::uint64_t path_index) {
  cfg.validate();
  check_epsilon(epsilon);
  auto rng = path_stream(cfg.seed, path_index);
  const std::size_t n = steps_for(cfg.horizon, cfg.dt);
  const double h = cfg.horizon / static_cast<double>(n);
  const double sqrt_h = std::sqrt(h);
  const double x0 = model.clamp(epsilon);

  CoupledPair pair;
  pair.seed = cfg.seed;
  pair.path_index = path_index;
  pair.x_path.epsilon = epsilon;
  pair.y_path.epsilon = epsilon;
  TruncatedEuler x(model, epsilon, x0);
  TruncatedFeller y(model.a, model.b, 1.0);
  auto record = [&](double t) {
    pair.x_path.times.push_back(t);
    pair.x_path.values.push_back(x.value());
    pair.y_path.times.push_back(t);
    pair.y_path.values.push_back(y.value());
  };
  record(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = rng.normal();
    const double t0 = static_cast<double>(k) * h;
    if (!x.step(h, sqrt_h, z)) fail_step(k, t0, x.value());
    if (!y.step(h, sqrt_h, z)) fail_step(k, t0, y.value());
    const double t = k + 1 == n ? cfg.horizon : static_cast<double>(k + 1) * h;
    if (x.absorbed() && !pair.x_path.absorbed_at) pair.x_path.absorbed_at = t;
    if (y.absorbed() && !pair.y_path.absorbed_at) pair.y_path.absorbed_at = t;
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == n) record(t);
  }
  return pair;
}

CoupledCheckpoints simulate_coupled_at(const ModelSpec& model, double epsilon,
                                       std::span<const double> checkpoints, double dt,
                                       CounterRng& rng) {
  check_epsilon(epsilon);
  const auto segments = plan_segments(checkpoints, dt);
  TruncatedEuler x(model, epsilon, model.clamp(epsilon));
  TruncatedFeller y(model.a, model.b, 1.0);
  CoupledCheckpoints out;
  out.x_scaled.reserve(checkpoints.size());
  out.y.reserve(checkpoints.size());
  std::size_t k = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto [n, h] = segments[s];
    const double sqrt_h = std::sqrt(h);
    for (std::size_t i = 0; i < n && !(x.absorbed() && y.absorbed()); ++i, ++k) {
      const double z = rng.normal();
      if (!x.step(h, sqrt_h, z)) fail_step(k, checkpoints[s], x.value());
      if (!y.step(h, sqrt_h, z)) fail_step(k, checkpoints[s], y.value());
    }
    out.x_scaled.push_back(x.value() / epsilon);
    out.y.push_back(y.value());
  }
  return out;
}

double sample_compound_poisson_exp(double c, CounterRng& rng) {
  const std::uint64_t n = rng.poisson(c);
  double sum = 0.0;
  for (std::uint64_t j = 0; j < n; ++j) sum += rng.exponential(c);
  return sum;
}

double feller_endpoint_rate(double a, double b, double t) {
  if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0)) throw UsageError("a, b and t must be positive");
  return 2.0 * a / (b * -std::expm1(-a * t));
}

std::vector<double> exact_feller_endpoint(double a, double b, double t, std::size_t n, std::uint64_t seed,
                                          unsigned threads) {
  const double c = feller_endpoint_rate(a, b, t);
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    CounterRng rng(seed, StreamTag::feller_endpoint, i);
    out[i] = sample_compound_poisson_exp(c, rng);
  }, 1024);
  return out;
}

std::vector<double> euler_feller_endpoint(double a, double b, double t, double dt, std::size_t n,
                                          std::uint64_t seed, unsigned threads) {
  if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0) || !(dt > 0.0)) throw UsageError("a, b, t, dt must be positive");
  const std::size_t steps = steps_for(t, dt);
  const double h = t / static_cast<double>(steps);
  const double sqrt_h = std::sqrt(h);
  const double scale = std::exp(-a * t);
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto rng = path_stream(seed, i);
    TruncatedFeller y(a, b, 1.0);
    for (std::size_t k = 0; k < steps && !y.absorbed(); ++k)
      if (!y.step(h, sqrt_h, rng.normal())) fail_step(k, static_cast<double>(k) * h, y.value());
    out[i] = scale * y.value();
  });
  return out;
}

void write_paths_csv(std::ostream& os, std::span<const CoupledPair> pairs) {
  os << "path_index,t,x,y,absorbed\n";
  char buf[160];
  for (const auto& p : pairs) {
    const auto& xt = p.x_path;
    const auto& yt = p.y_path;
    for (std::size_t k = 0; k < xt.times.size(); ++k) {
      const double t = xt.times[k];
      const bool absorbed = xt.absorbed_at && *xt.absorbed_at <= t;
      std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%d\n",
                    static_cast<unsigned long long>(p.path_index), t, xt.values[k], yt.values[k],
                    absorbed ? 1 : 0);
      os << buf;
    }
  }
}

}  // namespace smallnoise
