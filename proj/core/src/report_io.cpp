#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smallnoise/experiment.hpp"

namespace smallnoise {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const std::set<std::string> kKnownKeys{
    "experiment", "model",     "a",         "b",            "epsilon_ladder", "n_paths",
    "t_horizon",  "dt",        "c_split",   "seed",         "output_dir",     "verbosity",
    "threads",    "x0",        "t_grid",    "w1_threshold", "bootstrap",      "sup_grid_dt"};
const char* const kRequiredKeys[] = {"experiment", "model", "a", "epsilon_ladder", "n_paths", "seed"};

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected);
}

double get_number(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer()) throw ConfigError("config key '" + key + "': must be nonnegative");
    type_error(key, "a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_array()) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) type_error(key, "an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ordered_json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = std::string(to_string(c.kind));
  j["model"] = c.model;
  j["a"] = c.a;
  j["b"] = c.b;
  j["epsilon_ladder"] = c.epsilon_ladder;
  j["n_paths"] = c.n_paths;
  j["t_horizon"] = c.t_horizon;
  j["dt"] = c.dt ? ordered_json(*c.dt) : ordered_json(nullptr);
  j["c_split"] = c.c_split;
  j["seed"] = c.seed;
  j["x0"] = c.x0;
  j["t_grid"] = c.t_grid;
  j["w1_threshold"] = c.w1_threshold ? ordered_json(*c.w1_threshold) : ordered_json(nullptr);
  j["bootstrap"] = c.bootstrap;
  j["sup_grid_dt"] = c.sup_grid_dt;
  return j;
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
  std::string canon;
  canon += std::string(to_string(cfg.kind)) + '|' + cfg.model + '|' + g17(cfg.a) + '|' + g17(cfg.b) + '|';
  for (const double e : cfg.epsilon_ladder) canon += g17(e) + ',';
  canon += '|' + std::to_string(cfg.n_paths) + '|' + g17(cfg.t_horizon) + '|' + (cfg.dt ? g17(*cfg.dt) : "auto");
  canon += '|' + g17(cfg.c_split) + '|' + std::to_string(cfg.seed) + '|' + g17(cfg.x0) + '|';
  for (const double t : cfg.t_grid) canon += g17(t) + ',';
  canon += '|' + (cfg.w1_threshold ? g17(*cfg.w1_threshold) : "none") + '|' + std::to_string(cfg.bootstrap) + '|' +
           g17(cfg.sup_grid_dt);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig load_experiment_config(std::string_view json_text, const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("malformed config at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  for (const char* key : kRequiredKeys) {
    if (!doc.contains(key)) {
      const bool overridden = (std::string_view(key) == "experiment" && overrides.experiment) ||
                              (std::string_view(key) == "model" && overrides.model) ||
                              (std::string_view(key) == "a" && overrides.a) ||
                              (std::string_view(key) == "epsilon_ladder" && !overrides.epsilon_ladder.empty()) ||
                              (std::string_view(key) == "n_paths" && overrides.n_paths) ||
                              (std::string_view(key) == "seed" && overrides.seed);
      if (!overridden) throw ConfigError("missing required config key '" + std::string(key) + "'");
    }
  }

  ExperimentConfig c;
  if (doc.contains("experiment")) c.kind = parse_experiment_kind(get_string(doc, "experiment"));
  if (doc.contains("model")) c.model = get_string(doc, "model");
  if (doc.contains("a")) c.a = get_number(doc, "a");
  if (doc.contains("b")) c.b = get_number(doc, "b");
  if (doc.contains("epsilon_ladder")) c.epsilon_ladder = get_number_array(doc, "epsilon_ladder");
  if (doc.contains("n_paths")) c.n_paths = get_unsigned(doc, "n_paths");
  if (doc.contains("t_horizon")) c.t_horizon = get_number(doc, "t_horizon");
  if (doc.contains("dt") && !doc.at("dt").is_null()) c.dt = get_number(doc, "dt");
  if (doc.contains("c_split")) c.c_split = get_number(doc, "c_split");
  if (doc.contains("seed")) c.seed = get_unsigned(doc, "seed");
  if (doc.contains("output_dir")) c.output_dir = get_string(doc, "output_dir");
  if (doc.contains("verbosity")) c.verbosity = static_cast<int>(get_unsigned(doc, "verbosity"));
  if (doc.contains("threads")) c.threads = static_cast<unsigned>(get_unsigned(doc, "threads"));
  if (doc.contains("x0")) c.x0 = get_number(doc, "x0");
  if (doc.contains("t_grid")) c.t_grid = get_number_array(doc, "t_grid");
  if (doc.contains("w1_threshold") && !doc.at("w1_threshold").is_null())
    c.w1_threshold = get_number(doc, "w1_threshold");
  if (doc.contains("bootstrap")) c.bootstrap = get_unsigned(doc, "bootstrap");
  if (doc.contains("sup_grid_dt")) c.sup_grid_dt = get_number(doc, "sup_grid_dt");

  if (overrides.experiment) c.kind = parse_experiment_kind(*overrides.experiment);
  if (overrides.model) c.model = *overrides.model;
  if (overrides.a) c.a = *overrides.a;
  if (overrides.b) c.b = *overrides.b;
  if (!overrides.epsilon_ladder.empty()) c.epsilon_ladder = overrides.epsilon_ladder;
  if (overrides.n_paths) c.n_paths = *overrides.n_paths;
  if (overrides.t_horizon) c.t_horizon = *overrides.t_horizon;
  if (overrides.dt) c.dt = *overrides.dt;
  if (overrides.c_split) c.c_split = *overrides.c_split;
  if (overrides.seed) c.seed = *overrides.seed;
  if (overrides.output_dir) c.output_dir = *overrides.output_dir;
  if (overrides.threads) c.threads = *overrides.threads;

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string metrics_csv(const ExperimentReport& report) {
  std::string out = "experiment,epsilon,metric,value,stderr,n\n";
  for (const auto& m : report.metrics) {
    out += report.experiment + ',' + (m.epsilon ? g17(*m.epsilon) : std::string()) + ',' + m.name + ',' +
           g17(m.value) + ',' + g17(m.std_error) + ',' + std::to_string(m.n) + '\n';
  }
  return out;
}

std::string report_json(const ExperimentReport& report) {
  ordered_json j;
  j["experiment"] = report.experiment;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.config.seed;
  j["config"] = config_json(report.config);
  j["passed"] = report.passed();
  j["partial"] = report.partial;
  j["failures"] = report.failures;
  ordered_json metrics = ordered_json::array();
  for (const auto& m : report.metrics) {
    ordered_json e;
    e["metric"] = m.name;
    e["epsilon"] = m.epsilon ? ordered_json(*m.epsilon) : ordered_json(nullptr);
    e["value"] = number_or_null(m.value);
    e["stderr"] = number_or_null(m.std_error);
    e["n"] = m.n;
    metrics.push_back(std::move(e));
  }
  j["metrics"] = std::move(metrics);
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"gated", v.gated}, {"detail", v.detail}});
  }
  j["verdicts"] = std::move(verdicts);
  return j.dump(2) + '\n';
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
    os.close();
    if (!os) throw std::runtime_error("cannot write " + p.string());
  };
  write(dir / "report.json", report_json(report));
  write(dir / "metrics.csv", metrics_csv(report));
}

}  // namespace smallnoise
