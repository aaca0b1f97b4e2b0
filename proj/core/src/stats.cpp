#include "smallnoise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smallnoise/errors.hpp"
#include "smallnoise/rng.hpp"

namespace smallnoise {

namespace {

void require_nonempty(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw UsageError(std::string(what) + ": empty sample");
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

// Fills `out` with a sorted bootstrap resample of `sorted`.
void sorted_resample(std::span<const double> sorted, CounterRng& rng, std::vector<std::uint32_t>& counts,
                     std::vector<double>& out) {
  const std::size_t n = sorted.size();
  counts.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    ++counts[std::min(j, n - 1)];
  }
  out.clear();
  for (std::size_t i = 0; i < n; ++i) out.insert(out.end(), counts[i], sorted[i]);
}

double stddev_of(const std::vector<double>& v) {
  return std::sqrt(variance(v));
}

}  // namespace

double mean(std::span<const double> xs) {
  require_nonempty(xs, "mean");
  long double s = 0.0L;
  for (const double x : xs) s += x;
  return static_cast<double>(s / static_cast<long double>(xs.size()));
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  long double s = 0.0L;
  for (const double x : xs) s += (x - m) * (x - m);
  return static_cast<double>(s / static_cast<long double>(xs.size() - 1));
}

Estimate mean_estimate(std::span<const double> xs) {
  return {mean(xs), std::sqrt(variance(xs) / static_cast<double>(xs.size())), xs.size()};
}

Estimate variance_estimate(std::span<const double> xs) {
  require_nonempty(xs, "variance_estimate");
  const double m = mean(xs);
  const double s2 = variance(xs);
  long double m4 = 0.0L;
  for (const double x : xs) {
    const double d2 = (x - m) * (x - m);
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(xs.size());
  const double fourth = static_cast<double>(m4 / xs.size());
  return {s2, std::sqrt(std::max(0.0, fourth - s2 * s2) / n), xs.size()};
}

double quantile_sorted(std::span<const double> sorted, double p) {
  require_nonempty(sorted, "quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize(std::span<const double> xs) {
  require_nonempty(xs, "summarize");
  SampleSummary s;
  s.n = xs.size();
  s.mean = mean(xs);
  s.variance = variance(xs);
  s.standard_error = std::sqrt(s.variance / static_cast<double>(s.n));
  s.zero_fraction = zero_fraction(xs);
  const auto v = sorted_copy(xs);
  for (std::size_t i = 0; i < SampleSummary::kLevels.size(); ++i)
    s.quantiles[i] = quantile_sorted(v, SampleSummary::kLevels[i]);
  return s;
}

double wasserstein1_sorted(std::span<const double> xs, std::span<const double> ys) {
  require_nonempty(xs, "wasserstein1");
  require_nonempty(ys, "wasserstein1");
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  if (n == m) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(xs[i] - ys[i]);
    return static_cast<double>(s / static_cast<long double>(n));
  }
  // Walk the merged breakpoints i/n and j/m; compare with integer arithmetic.
  long double s = 0.0L;
  std::size_t i = 0, j = 0;
  long double p = 0.0L;
  while (i < n && j < m) {
    const unsigned long long ni = (i + 1) * static_cast<unsigned long long>(m);
    const unsigned long long mj = (j + 1) * static_cast<unsigned long long>(n);
    const long double next = ni <= mj ? static_cast<long double>(i + 1) / n : static_cast<long double>(j + 1) / m;
    s += (next - p) * std::abs(xs[i] - ys[j]);
    p = next;
    if (ni <= mj) ++i;
    if (mj <= ni) ++j;
  }
  return static_cast<double>(s);
}

double wasserstein1(std::span<const double> xs, std::span<const double> ys) {
  require_nonempty(xs, "wasserstein1");
  require_nonempty(ys, "wasserstein1");
  return wasserstein1_sorted(sorted_copy(xs), sorted_copy(ys));
}

double ks_statistic_sorted(std::span<const double> xs, std::span<const double> ys) {
  require_nonempty(xs, "ks_statistic");
  require_nonempty(ys, "ks_statistic");
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_statistic(std::span<const double> xs, std::span<const double> ys) {
  require_nonempty(xs, "ks_statistic");
  require_nonempty(ys, "ks_statistic");
  return ks_statistic_sorted(sorted_copy(xs), sorted_copy(ys));
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw UsageError("ks_pvalue: empty sample");
  const double en = std::sqrt(static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m));
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

double empirical_laplace(std::span<const double> xs, double lambda) {
  require_nonempty(xs, "empirical_laplace");
  long double s = 0.0L;
  for (const double x : xs) s += std::exp(-lambda * x);
  return static_cast<double>(s / static_cast<long double>(xs.size()));
}

Estimate empirical_laplace_estimate(std::span<const double> xs, double lambda) {
  require_nonempty(xs, "empirical_laplace");
  std::vector<double> e(xs.size());
  std::transform(xs.begin(), xs.end(), e.begin(), [lambda](double x) { return std::exp(-lambda * x); });
  return mean_estimate(e);
}

Interval binomial_ci(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw UsageError("binomial_ci: n must be positive");
  if (k > n) throw UsageError("binomial_ci: k exceeds n");
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double hw = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {p - hw, p + hw, p};
}

double zero_fraction(std::span<const double> xs) {
  require_nonempty(xs, "zero_fraction");
  const auto zeros = std::count(xs.begin(), xs.end(), 0.0);
  return static_cast<double>(zeros) / static_cast<double>(xs.size());
}

double bootstrap_se(std::span<const double> sorted, const SortedStatistic& stat, std::size_t replicates,
                    std::uint64_t seed) {
  require_nonempty(sorted, "bootstrap_se");
  if (replicates < 2) throw UsageError("bootstrap_se: need at least two replicates");
  std::vector<double> stats;
  stats.reserve(replicates);
  std::vector<std::uint32_t> counts;
  std::vector<double> buf;
  buf.reserve(sorted.size());
  for (std::size_t r = 0; r < replicates; ++r) {
    CounterRng rng(seed, StreamTag::bootstrap, r);
    sorted_resample(sorted, rng, counts, buf);
    stats.push_back(stat(buf));
  }
  return stddev_of(stats);
}

double bootstrap_se(std::span<const double> xs_sorted, std::span<const double> ys_sorted,
                    const SortedPairStatistic& stat, std::size_t replicates, std::uint64_t seed) {
  require_nonempty(xs_sorted, "bootstrap_se");
  require_nonempty(ys_sorted, "bootstrap_se");
  if (replicates < 2) throw UsageError("bootstrap_se: need at least two replicates");
  std::vector<double> stats;
  stats.reserve(replicates);
  std::vector<std::uint32_t> counts;
  std::vector<double> bx, by;
  bx.reserve(xs_sorted.size());
  by.reserve(ys_sorted.size());
  for (std::size_t r = 0; r < replicates; ++r) {
    CounterRng rng(seed, StreamTag::bootstrap, 2 * r);
    sorted_resample(xs_sorted, rng, counts, bx);
    CounterRng rng2(seed, StreamTag::bootstrap, 2 * r + 1);
    sorted_resample(ys_sorted, rng2, counts, by);
    stats.push_back(stat(bx, by));
  }
  return stddev_of(stats);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_line: need at least two paired points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace smallnoise
