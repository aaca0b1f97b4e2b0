#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smallnoise/flow.hpp"
#include "smallnoise/model.hpp"

namespace smallnoise {

/// Law of W = lim e^{-at} Y_t: a Poisson(c) number of independent
/// Exponential(rate c) jumps, c = 2a/b. Atom at zero of mass e^{-c}.
struct LimitLaw {
  double a = 1.0;
  double b = 1.0;
  double c = 2.0;

  static LimitLaw from_slopes(double a, double b);
  static LimitLaw for_model(const ModelSpec& model) { return from_slopes(model.a, model.b); }

  double atom_at_zero() const;
  double mean() const { return 1.0; }
  double variance() const { return 2.0 / c; }
};

/// n samples of W; sample i is drawn from its own stream, so the result is
/// independent of `threads`.
std::vector<double> sample_W(const LimitLaw& law, std::size_t n, std::uint64_t seed, unsigned threads = 1);

/// E exp(-lambda W) = exp(-c lambda / (c + lambda)).
double laplace_W(const LimitLaw& law, double lambda);

/// H applied to sample_W output; zeros map to exactly 0.
/// Throws UsageError if the law was not built from the model's slopes.
std::vector<double> sample_initial_condition(const FlowTable& table, const LimitLaw& law, std::size_t n,
                                             std::uint64_t seed, unsigned threads = 1);
std::vector<double> sample_initial_condition(const ModelSpec& model, const LimitLaw& law, std::size_t n,
                                             std::uint64_t seed, unsigned threads = 1);

}  // namespace smallnoise
