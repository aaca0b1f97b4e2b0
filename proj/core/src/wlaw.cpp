#include "smallnoise/wlaw.hpp"

#include <cmath>

#include "smallnoise/errors.hpp"
#include "smallnoise/parallel.hpp"
#include "smallnoise/rng.hpp"
#include "smallnoise/sde.hpp"

namespace smallnoise {

LimitLaw LimitLaw::from_slopes(double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a)) throw UsageError("a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw UsageError("b must be positive");
  return {a, b, 2.0 * a / b};
}

double LimitLaw::atom_at_zero() const { return std::exp(-c); }

std::vector<double> sample_W(const LimitLaw& law, std::size_t n, std::uint64_t seed, unsigned threads) {
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    CounterRng rng(seed, StreamTag::limit_w, i);
    out[i] = sample_compound_poisson_exp(law.c, rng);
  }, 1024);
  return out;
}

double laplace_W(const LimitLaw& law, double lambda) {
  if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
  if (std::isinf(lambda)) return law.atom_at_zero();
  return std::exp(-law.c * lambda / (law.c + lambda));
}

std::vector<double> sample_initial_condition(const FlowTable& table, const LimitLaw& law, std::size_t n,
                                             std::uint64_t seed, unsigned threads) {
  const auto& m = table.model();
  if (std::abs(law.a - m.a) > 1e-12 * m.a || std::abs(law.b - m.b) > 1e-12 * m.b)
    throw UsageError("limit law slopes do not match the model");
  auto w = sample_W(law, n, seed, threads);
  parallel_for(n, threads, [&](std::size_t i) { w[i] = w[i] > 0.0 ? table.H(w[i]) : 0.0; });
  return w;
}

std::vector<double> sample_initial_condition(const ModelSpec& model, const LimitLaw& law, std::size_t n,
                                             std::uint64_t seed, unsigned threads) {
  return sample_initial_condition(FlowTable(model), law, n, seed, threads);
}

}  // namespace smallnoise
