#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smallnoise/errors.hpp"

namespace smallnoise {

enum class ExperimentKind { theorem2_distributional, theorem2_pathwise, theorem1_fluid, lemma_l1 };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::theorem2_distributional;
  std::string model = "wright_fisher";
  double a = 1.0;
  double b = 1.0;
  std::vector<double> epsilon_ladder{1e-2, 1e-3, 1e-4};
  std::size_t n_paths = 20000;
  double t_horizon = 1.0;          // T: horizon past T_eps (or past 0 for the fluid limit)
  std::optional<double> dt;        // default: min(1e-3, 1e-2 sqrt(eps)) per rung
  double c_split = 0.75;           // t_c = (c/a) log(1/eps), c in (1/2, 1)
  std::uint64_t seed = 1;
  unsigned threads = 0;            // 0: hardware concurrency
  std::string output_dir = ".";
  int verbosity = 0;
  double x0 = 0.2;                 // fluid-limit start
  std::vector<double> t_grid{0.0, 0.5, 1.0, 2.0};  // coupled-convergence times
  std::optional<double> w1_threshold;              // gate on W1 at the smallest eps
  std::size_t bootstrap = 200;
  double sup_grid_dt = 0.01;       // spacing of the grid the pathwise sup runs over

  /// Throws UsageError naming the offending field.
  void validate() const;
  double dt_for(double epsilon) const;
};

/// FNV-1a hash (hex) of the fields that determine the results.
std::string config_hash(const ExperimentConfig& cfg);

struct Metric {
  std::string name;
  std::optional<double> epsilon;  // empty for ladder-wide metrics
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct Verdict {
  std::string name;
  bool passed = false;
  bool gated = true;  // soft verdicts are reported but do not decide the exit status
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentConfig config;
  std::string config_hash;
  std::vector<Metric> metrics;
  std::vector<Verdict> verdicts;
  double wall_clock_seconds = 0.0;
  bool partial = false;
  std::vector<std::string> failures;

  bool passed() const;
  const Metric* find(std::string_view name, std::optional<double> epsilon = std::nullopt) const;
  const Verdict* verdict(std::string_view name) const;
};

/// Law of X at T_eps = log(1/eps)/a (and T_eps + T/2, T_eps + T) against
/// H(W) and its flow; atom at zero against e^{-2a/b}.
ExperimentReport run_theorem2_distributional(const ExperimentConfig& cfg);

/// Per-path extrapolation from t_c: sup error of X past T_eps against the
/// flow from H(e^{-a t_c} X_{t_c} / eps), plus both decomposition terms.
ExperimentReport run_theorem2_pathwise(const ExperimentConfig& cfg);

/// sup_{t<=T} |X_t - phi_t(x0)| for fixed x0.
ExperimentReport run_theorem1_fluid(const ExperimentConfig& cfg, double x0);
ExperimentReport run_theorem1_fluid(const ExperimentConfig& cfg);

/// E|X_t / eps - Y_t| on coupled paths at each time of t_grid.
ExperimentReport run_lemma_l1(const ExperimentConfig& cfg, const std::vector<double>& t_grid);
ExperimentReport run_lemma_l1(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Report and config I/O.

/// Config problems: bad JSON (with line and column), unknown or missing keys,
/// wrong types, invalid values.
class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Values given on the command line; they replace the config file's values.
struct ConfigOverrides {
  std::optional<std::string> experiment;
  std::optional<std::string> model;
  std::optional<double> a, b;
  std::vector<double> epsilon_ladder;
  std::optional<std::size_t> n_paths;
  std::optional<double> t_horizon, dt, c_split;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
};

/// Parses a JSON config document and applies overrides. Throws ConfigError.
ExperimentConfig load_experiment_config(std::string_view json_text, const ConfigOverrides& overrides = {});

/// CSV with header experiment,epsilon,metric,value,stderr,n.
std::string metrics_csv(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);

/// Writes report.json and metrics.csv into `dir` (created if missing).
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace smallnoise
