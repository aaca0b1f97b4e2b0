#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace smallnoise {

/// Point estimate with its Monte Carlo standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct SampleSummary {
  static constexpr std::array<double, 7> kLevels{0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double standard_error = 0.0;
  double zero_fraction = 0.0;
  std::array<double, 7> quantiles{};
};

SampleSummary summarize(std::span<const double> xs);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased, 0 for n < 2
Estimate mean_estimate(std::span<const double> xs);
/// Sample variance with SE sqrt((m4 - s^4) / n).
Estimate variance_estimate(std::span<const double> xs);

/// Linear-interpolation quantile (type 7) of an already sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// Wasserstein-1 distance between two empirical laws: the L1 distance of
/// their quantile functions, integrated exactly over the merged breakpoints.
double wasserstein1(std::span<const double> xs, std::span<const double> ys);
double wasserstein1_sorted(std::span<const double> xs, std::span<const double> ys);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y|, ties handled.
double ks_statistic(std::span<const double> xs, std::span<const double> ys);
double ks_statistic_sorted(std::span<const double> xs, std::span<const double> ys);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Large-sample p-value for a two-sample KS statistic d with sizes n and m.
double ks_pvalue(double d, std::size_t n, std::size_t m);

/// Mean of exp(-lambda x).
double empirical_laplace(std::span<const double> xs, double lambda);
Estimate empirical_laplace_estimate(std::span<const double> xs, double lambda);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Wald interval p +- z sqrt(p(1-p)/n). No continuity correction; not clipped to [0, 1].
Interval binomial_ci(std::size_t k, std::size_t n, double z);

/// Fraction of exact zeros.
double zero_fraction(std::span<const double> xs);

using SortedStatistic = std::function<double(std::span<const double>)>;
using SortedPairStatistic = std::function<double(std::span<const double>, std::span<const double>)>;

/// Bootstrap standard error of a statistic of one sorted sample. Resamples
/// are generated already sorted (multinomial counts), so no re-sorting.
double bootstrap_se(std::span<const double> sorted, const SortedStatistic& stat, std::size_t replicates,
                    std::uint64_t seed);
double bootstrap_se(std::span<const double> xs_sorted, std::span<const double> ys_sorted,
                    const SortedPairStatistic& stat, std::size_t replicates, std::uint64_t seed);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares fit of y on x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace smallnoise
