#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "smallnoise/model.hpp"
#include "smallnoise/rng.hpp"

namespace smallnoise {

enum class Scheme { full_truncation_euler };

struct SimConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  Scheme scheme = Scheme::full_truncation_euler;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;

  void validate() const;
};

/// A recorded trajectory. After absorbed_at every value is exactly 0.
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> absorbed_at;
  double epsilon = 0.0;
};

/// Nonlinear path and linear Feller path driven by the same normal draws.
struct CoupledPair {
  Path x_path;  // X^eps from x0 = eps
  Path y_path;  // Y from Y0 = 1
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// One full-truncation Euler path of dX = f(X)dt + sqrt(eps sigma(X)) dB.
///
/// The diffusion argument is clamped into the state space; a proposal <= 0
/// absorbs the path at 0 for good; proposals above state_upper are clamped.
class TruncatedEuler {
 public:
  TruncatedEuler(const ModelSpec& model, double epsilon, double x0)
      : model_(&model), eps_(epsilon), x_(x0), absorbed_(x0 <= 0.0) {
    if (absorbed_) x_ = 0.0;
  }

  /// Advances by h with standard normal draw z. Returns false if the
  /// proposal was not finite (the state is left unchanged).
  bool step(double h, double sqrt_h, double z) {
    if (absorbed_) return true;
    const double s = model_->sigma(x_);
    const double next = x_ + model_->f(x_) * h + std::sqrt(eps_ * (s > 0.0 ? s : 0.0)) * sqrt_h * z;
    if (!std::isfinite(next)) return false;
    if (next <= 0.0) {
      x_ = 0.0;
      absorbed_ = true;
    } else {
      x_ = next < model_->state_upper ? next : model_->state_upper;
    }
    return true;
  }

  double value() const { return x_; }
  bool absorbed() const { return absorbed_; }

 private:
  const ModelSpec* model_;
  double eps_;
  double x_;
  bool absorbed_;
};

/// Full-truncation Euler for the Feller diffusion dY = aY dt + sqrt(bY) dB.
class TruncatedFeller {
 public:
  TruncatedFeller(double a, double b, double y0) : a_(a), b_(b), y_(y0), absorbed_(y0 <= 0.0) {
    if (absorbed_) y_ = 0.0;
  }

  bool step(double h, double sqrt_h, double z) {
    if (absorbed_) return true;
    const double next = y_ + a_ * y_ * h + std::sqrt(b_ * y_) * sqrt_h * z;
    if (!std::isfinite(next)) return false;
    if (next <= 0.0) {
      y_ = 0.0;
      absorbed_ = true;
    } else {
      y_ = next;
    }
    return true;
  }

  double value() const { return y_; }
  bool absorbed() const { return absorbed_; }

 private:
  double a_, b_;
  double y_;
  bool absorbed_;
};

/// Uniform sub-steps for one interval between consecutive checkpoints.
struct Segment {
  std::size_t steps = 0;
  double h = 0.0;
};

/// Splits [0, c_1], [c_1, c_2], ... into equal steps no longer than dt, so
/// that every checkpoint falls on the time grid. Checkpoints must be
/// nondecreasing and nonnegative.
std::vector<Segment> plan_segments(std::span<const double> checkpoints, double dt);

/// Stream of path `path_index` under `seed`.
inline CounterRng path_stream(std::uint64_t seed, std::uint64_t path_index) {
  return CounterRng(seed, StreamTag::sde_path, path_index);
}

/// X at each checkpoint, plus the absorption time if any.
struct CheckpointSample {
  std::vector<double> values;
  std::optional<double> absorbed_at;
};

/// Simulates X^eps from x0 and reports it at the given checkpoints.
/// Stops stepping once the path is absorbed.
CheckpointSample simulate_X_at(const ModelSpec& model, double epsilon, double x0,
                               std::span<const double> checkpoints, double dt, CounterRng& rng);

/// Full recorded path on the grid t_k = k * horizon / ceil(horizon / dt).
/// Values are stored every record_stride steps and at the horizon.
/// Throws NumericalFailure (with the step index in the message) on a non-finite state.
Path simulate_X(const ModelSpec& model, double epsilon, double x0, const SimConfig& cfg,
                std::uint64_t path_index = 0);

/// X^eps from eps and Y from 1 on identical normal draws.
CoupledPair simulate_coupled(const ModelSpec& model, double epsilon, const SimConfig& cfg,
                             std::uint64_t path_index = 0);

/// Coupled values (eps^{-1} X_t, Y_t) at checkpoints.
struct CoupledCheckpoints {
  std::vector<double> x_scaled;
  std::vector<double> y;
};
CoupledCheckpoints simulate_coupled_at(const ModelSpec& model, double epsilon,
                                       std::span<const double> checkpoints, double dt,
                                       CounterRng& rng);

/// Sum of Poisson(c) many independent Exponential(rate c) variables.
double sample_compound_poisson_exp(double c, CounterRng& rng);

/// Rate c_t = 2a / (b (1 - e^{-a t})) of the compound-Poisson law of e^{-at} Y_t.
double feller_endpoint_rate(double a, double b, double t);

/// Exact samples of W_t = e^{-at} Y_t for the Feller diffusion from Y_0 = 1.
std::vector<double> exact_feller_endpoint(double a, double b, double t, std::size_t n, std::uint64_t seed,
                                          unsigned threads = 1);

/// Euler samples of e^{-at} Y_t (the oracle for exact_feller_endpoint).
std::vector<double> euler_feller_endpoint(double a, double b, double t, double dt, std::size_t n,
                                          std::uint64_t seed, unsigned threads = 1);

/// CSV with header path_index,t,x,y,absorbed at the recorded resolution.
void write_paths_csv(std::ostream& os, std::span<const CoupledPair> pairs);

}  // namespace smallnoise
