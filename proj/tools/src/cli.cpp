#include "smallnoise/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "smallnoise/errors.hpp"
#include "smallnoise/experiment.hpp"
#include "smallnoise/flow.hpp"
#include "smallnoise/model.hpp"
#include "smallnoise/sde.hpp"
#include "smallnoise/wlaw.hpp"

namespace smallnoise {

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

struct ModelArgs {
  std::string model = "wright_fisher";
  double a = 1.0;
  double b = 1.0;
};

void add_model_flags(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.model, "Model name (" + join(builtin_model_names()) + ")");
  cmd->add_option("--a", m.a, "Linear growth rate f'(0)");
  cmd->add_option("--b", m.b, "Diffusion slope sigma'(0)");
}

int cmd_validate(const ModelArgs& m, std::size_t grid, std::ostream& out) {
  const ModelSpec spec = builtin_model(m.model, m.a, m.b);
  const ValidationReport report = validate_model(spec, grid);
  if (report.ok()) {
    out << spec.name << ": all assumptions hold on " << report.grid_size << " grid points up to "
        << report.grid_upper << "\n";
    return exit_ok;
  }
  for (const auto& v : report.violations) out << v.assumption << ": " << v.message << "\n";
  return exit_failure;
}

struct SampleArgs {
  ModelArgs m;
  std::string target = "w";
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  std::string out = ".";
  double t = 1.0;
  unsigned threads = 0;
};

int cmd_sample(const SampleArgs& s, std::ostream& out) {
  std::vector<double> xs;
  if (s.target == "w") {
    xs = sample_W(LimitLaw::from_slopes(s.m.a, s.m.b), s.n, s.seed, s.threads);
  } else if (s.target == "x0") {
    const ModelSpec spec = builtin_model(s.m.model, s.m.a, s.m.b);
    xs = sample_initial_condition(spec, LimitLaw::for_model(spec), s.n, s.seed, s.threads);
  } else if (s.target == "feller_endpoint") {
    if (!(s.t > 0.0)) throw UsageError("--t must be positive");
    if (!(s.m.a > 0.0)) throw UsageError("a must be positive");
    if (!(s.m.b > 0.0)) throw UsageError("b must be positive");
    xs = exact_feller_endpoint(s.m.a, s.m.b, s.t, s.n, s.seed, s.threads);
  } else {
    throw UsageError("unknown target '" + s.target + "' (expected w, x0 or feller_endpoint)");
  }
  std::string text = s.target + "\n";
  for (const double x : xs) text += g17(x) + "\n";
  const auto path = std::filesystem::path(s.out) / ("samples_" + s.target + ".csv");
  write_file(path, text);
  out << "wrote " << xs.size() << " samples to " << path.string() << "\n";
  return exit_ok;
}

struct ExperimentArgs {
  std::string config_path;
  ConfigOverrides ov;
  std::string experiment, model, out;
  double a = 0, b = 0, t_horizon = 0, dt = 0, c_split = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

int cmd_experiment(CLI::App* cmd, ExperimentArgs& e, std::ostream& out) {
  auto given = [cmd](const char* flag) { return cmd->count(flag) > 0; };
  ConfigOverrides& ov = e.ov;
  if (given("--experiment")) ov.experiment = e.experiment;
  if (given("--model")) ov.model = e.model;
  if (given("--a")) ov.a = e.a;
  if (given("--b")) ov.b = e.b;
  if (given("--n-paths")) ov.n_paths = e.n_paths;
  if (given("--t-horizon")) ov.t_horizon = e.t_horizon;
  if (given("--dt")) ov.dt = e.dt;
  if (given("--c-split")) ov.c_split = e.c_split;
  if (given("--seed")) ov.seed = e.seed;
  if (given("--out")) ov.output_dir = e.out;
  if (given("--threads")) ov.threads = e.threads;

  ExperimentConfig cfg;
  if (!e.config_path.empty()) {
    std::ifstream is(e.config_path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file " + e.config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    cfg = load_experiment_config(ss.str(), ov);
  } else {
    if (!ov.experiment) throw UsageError("experiment needs --config or --experiment");
    cfg.kind = parse_experiment_kind(*ov.experiment);
    if (ov.model) cfg.model = *ov.model;
    if (ov.a) cfg.a = *ov.a;
    if (ov.b) cfg.b = *ov.b;
    if (!ov.epsilon_ladder.empty()) cfg.epsilon_ladder = ov.epsilon_ladder;
    if (ov.n_paths) cfg.n_paths = *ov.n_paths;
    if (ov.t_horizon) cfg.t_horizon = *ov.t_horizon;
    if (ov.dt) cfg.dt = *ov.dt;
    if (ov.c_split) cfg.c_split = *ov.c_split;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.threads) cfg.threads = *ov.threads;
    cfg.validate();
  }

  const ExperimentReport report = run_experiment(cfg);
  write_report(report, cfg.output_dir);
  out << report.experiment << " (config " << report.config_hash << ", seed " << cfg.seed << ")\n";
  for (const auto& v : report.verdicts) {
    out << "  " << (v.passed ? "pass" : "FAIL") << (v.gated ? "" : " (soft)") << "  " << v.name << ": " << v.detail
        << "\n";
  }
  for (const auto& f : report.failures) out << "  failure: " << f << "\n";
  char wall[64];
  std::snprintf(wall, sizeof wall, "%.2f", report.wall_clock_seconds);
  out << "  wall clock " << wall << " s; wrote " << cfg.output_dir << "/report.json and metrics.csv\n";
  return report.passed() ? exit_ok : exit_failure;
}

struct PathsArgs {
  ModelArgs m;
  double epsilon = 1e-2;
  std::size_t n_paths = 10;
  double t_horizon = 0.0;
  std::optional<double> dt;
  std::size_t stride = 10;
  std::uint64_t seed = 1;
  std::string out = ".";
};

int cmd_paths(const PathsArgs& p, std::ostream& out) {
  const ModelSpec spec = builtin_model(p.m.model, p.m.a, p.m.b);
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  SimConfig sim;
  sim.horizon = p.t_horizon > 0.0 ? p.t_horizon : std::log(1.0 / p.epsilon) / spec.a + 1.0;
  sim.dt = p.dt ? *p.dt : std::min(1e-3, 1e-2 * std::sqrt(p.epsilon));
  sim.seed = p.seed;
  sim.record_stride = p.stride;
  sim.validate();
  std::vector<CoupledPair> pairs;
  pairs.reserve(p.n_paths);
  for (std::size_t i = 0; i < p.n_paths; ++i) pairs.push_back(simulate_coupled(spec, p.epsilon, sim, i));
  std::ostringstream os;
  write_paths_csv(os, pairs);
  const auto path = std::filesystem::path(p.out) / "paths.csv";
  write_file(path, os.str());
  out << "wrote " << p.n_paths << " coupled paths to " << path.string() << "\n";
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-noise diffusions escaping an unstable fixed point"};
  app.name("smallnoise");
  app.require_subcommand(1);

  ModelArgs vm;
  std::size_t grid = 400;
  auto* validate = app.add_subcommand("validate", "Check a model against the standing assumptions");
  add_model_flags(validate, vm);
  validate->add_option("--grid", grid, "Grid points for the drift-condition check")->check(CLI::PositiveNumber);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Write samples of W, H(W) or the Feller endpoint as CSV");
  add_model_flags(sample, sa.m);
  sample->add_option("--target", sa.target, "w, x0 or feller_endpoint")
      ->check(CLI::IsMember({"w", "x0", "feller_endpoint"}));
  sample->add_option("--n", sa.n, "Number of samples")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed, "Seed");
  sample->add_option("--out", sa.out, "Output directory");
  sample->add_option("--t", sa.t, "Time for feller_endpoint");
  sample->add_option("--threads", sa.threads, "Worker threads (0: all cores)");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment and write report.json and metrics.csv");
  experiment->add_option("--config", ea.config_path, "JSON config file");
  experiment->add_option("--experiment", ea.experiment,
                         "theorem2_distributional, theorem2_pathwise, theorem1_fluid or lemma_l1");
  experiment->add_option("--model", ea.model, "Model name");
  experiment->add_option("--a", ea.a, "Linear growth rate f'(0)");
  experiment->add_option("--b", ea.b, "Diffusion slope sigma'(0)");
  experiment->add_option("--epsilon", ea.ov.epsilon_ladder, "Noise level (repeatable; forms the ladder)");
  experiment->add_option("--n-paths", ea.n_paths, "Paths per noise level");
  experiment->add_option("--t-horizon", ea.t_horizon, "Horizon T");
  experiment->add_option("--dt", ea.dt, "Euler step");
  experiment->add_option("--c-split", ea.c_split, "Split constant c in (1/2,1)");
  experiment->add_option("--seed", ea.seed, "Seed");
  experiment->add_option("--out", ea.out, "Output directory");
  experiment->add_option("--threads", ea.threads, "Worker threads (0: all cores)");

  PathsArgs pa;
  auto* paths = app.add_subcommand("paths", "Write coupled (X, Y) paths as CSV");
  add_model_flags(paths, pa.m);
  paths->add_option("--epsilon", pa.epsilon, "Noise level");
  paths->add_option("--n-paths", pa.n_paths, "Number of paths")->check(CLI::PositiveNumber);
  paths->add_option("--t-horizon", pa.t_horizon, "Horizon (default T_eps + 1)");
  paths->add_option("--dt", pa.dt, "Euler step");
  paths->add_option("--stride", pa.stride, "Record every stride-th step")->check(CLI::PositiveNumber);
  paths->add_option("--seed", pa.seed, "Seed");
  paths->add_option("--out", pa.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*validate) return cmd_validate(vm, grid, out);
    if (*sample) return cmd_sample(sa, out);
    if (*experiment) return cmd_experiment(experiment, ea, out);
    if (*paths) return cmd_paths(pa, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'smallnoise --help' for usage\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace smallnoise
