#include "smallnoise/model.hpp"

#include <cmath>
#include <cstdio>

#include "smallnoise/errors.hpp"

namespace smallnoise {

namespace {

std::string fmt_coord(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, x == std::floor(x) && std::abs(x) < 1e15 ? "%.1f" : "%.6g", x);
  return buf;
}

std::string fmt_pair(double x, double y) { return "(x,y)=(" + fmt_coord(x) + "," + fmt_coord(y) + ")"; }

std::string fmt_point(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "x=%.6g", x);
  return buf;
}

void check_params(double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a)) throw UsageError("a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw UsageError("b must be positive");
}

}  // namespace

BuiltinModel parse_builtin_model(std::string_view name) {
  if (name == "wright_fisher") return BuiltinModel::wright_fisher;
  if (name == "balancing_selection") return BuiltinModel::balancing_selection;
  if (name == "linear_feller") return BuiltinModel::linear_feller;
  throw UsageError("unknown model '" + std::string(name) +
                   "' (expected wright_fisher, balancing_selection or linear_feller)");
}

std::string_view to_string(BuiltinModel m) {
  switch (m) {
    case BuiltinModel::wright_fisher: return "wright_fisher";
    case BuiltinModel::balancing_selection: return "balancing_selection";
    case BuiltinModel::linear_feller: return "linear_feller";
  }
  return "unknown";
}

std::vector<std::string> builtin_model_names() {
  return {"wright_fisher", "balancing_selection", "linear_feller"};
}

ModelSpec builtin_model(BuiltinModel which, double a, double b) {
  check_params(a, b);
  ModelSpec m;
  m.name = std::string(to_string(which));
  m.a = a;
  m.b = b;
  switch (which) {
    case BuiltinModel::wright_fisher:
      m.drift = [a](double x) { return a * x * (1.0 - x); };
      m.diffusion = [b](double x) { return b * x * (1.0 - x); };
      m.x_star = 1.0;
      m.state_upper = 1.0;
      m.closed_form_flow = [a](double t, double x) {
        const double g = std::exp(a * t);
        return x * g / (1.0 - x + x * g);
      };
      m.closed_form_H = [](double x) { return x / (1.0 + x); };
      break;
    case BuiltinModel::balancing_selection:
      m.drift = [a](double x) { return a * x * (1.0 - x) * (1.0 - 2.0 * x); };
      m.diffusion = [b](double x) { return b * x * (1.0 - x); };
      m.x_star = 0.5;
      m.state_upper = 1.0;
      m.closed_form_flow = [a](double t, double x) {
        return 0.5 - 0.5 * (1.0 - 2.0 * x) / std::sqrt(4.0 * x * (1.0 - x) * std::expm1(a * t) + 1.0);
      };
      m.closed_form_H = [](double x) { return 0.5 - 0.5 / std::sqrt(4.0 * x + 1.0); };
      break;
    case BuiltinModel::linear_feller:
      m.drift = [a](double x) { return a * x; };
      m.diffusion = [b](double x) { return b * x; };
      m.x_star = kInfinity;
      m.state_upper = kInfinity;
      m.closed_form_flow = [a](double t, double x) { return x * std::exp(a * t); };
      m.closed_form_H = [](double x) { return x; };
      break;
  }
  return m;
}

ModelSpec builtin_model(std::string_view name, double a, double b) {
  return builtin_model(parse_builtin_model(name), a, b);
}

ModelSpec without_noise(const ModelSpec& spec) {
  ModelSpec m = spec;
  m.name += "+noiseless";
  m.diffusion = [](double) { return 0.0; };
  return m;
}

bool ValidationReport::has(std::string_view assumption) const {
  for (const auto& v : violations)
    if (v.assumption == assumption) return true;
  return false;
}

double default_validation_cap(const ModelSpec& spec) {
  const double xs = spec.has_finite_x_star() ? spec.x_star : 10.0;
  return 10.0 * std::max(1.0, xs);
}

ValidationReport validate_model(const ModelSpec& spec, std::size_t grid_size) {
  return validate_model(spec, grid_size, default_validation_cap(spec));
}

ValidationReport validate_model(const ModelSpec& spec, std::size_t grid_size, double cap) {
  if (grid_size < 2) throw UsageError("grid_size must be at least 2");
  if (!spec.drift || !spec.diffusion) throw UsageError("model coefficients are not populated");

  ValidationReport report;
  report.grid_size = grid_size;
  report.grid_upper = std::min(spec.state_upper, cap);
  auto& out = report.violations;

  if (!(spec.a > 0.0)) out.push_back({"slope_positivity", "f'(0)=a must be positive"});
  if (!(spec.b > 0.0)) out.push_back({"slope_positivity", "sigma'(0)=b must be positive"});

  const double f0 = spec.drift(0.0);
  const double s0 = spec.diffusion(0.0);
  if (f0 != 0.0) out.push_back({"vanishing_at_zero", "f(0)!=0 (f(0)=" + std::to_string(f0) + ")"});
  if (s0 != 0.0)
    out.push_back({"vanishing_at_zero", "σ(0)≠0 (sigma(0)=" + std::to_string(s0) + ")"});

  const double upper = report.grid_upper;
  std::vector<double> xs(grid_size), fs(grid_size);
  bool nonfinite_reported = false;
  bool sigma_reported = false;
  bool positivity_reported = false;
  bool linear_bound_reported = false;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = upper * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    xs[i] = x;
    fs[i] = spec.f(x);
    const double s = spec.sigma(x);
    if ((!std::isfinite(fs[i]) || !std::isfinite(s)) && !nonfinite_reported) {
      out.push_back({"finite_coefficients", "non-finite f or sigma at " + fmt_point(x)});
      nonfinite_reported = true;
    }
    if (s < 0.0 && !sigma_reported) {
      out.push_back({"sigma_nonnegative", "sigma(x)<0 at " + fmt_point(x)});
      sigma_reported = true;
    }
    if (x > 0.0 && x < spec.x_star && !(fs[i] > 0.0) && !positivity_reported) {
      out.push_back({"drift_positive_below_x_star", "f(x)<=0 inside (0,x*) at " + fmt_point(x)});
      positivity_reported = true;
    }
    const double bound = spec.a * x;
    if (fs[i] > bound + 1e-12 * std::abs(bound) && !linear_bound_reported) {
      out.push_back({"linear_bound", "f(x)>a*x at " + fmt_point(x)});
      linear_bound_reported = true;
    }
  }

  // (y-x)(f(y)-f(x)) <= a (y-x)^2 on all grid pairs; the witness is the worst pair.
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    for (std::size_t j = i + 1; j < grid_size; ++j) {
      const double d = xs[j] - xs[i];
      const double lhs = d * (fs[j] - fs[i]);
      const double rhs = spec.a * d * d;
      const double slack = 1e-12 * (std::abs(lhs) + std::abs(rhs)) + 1e-300;
      const double excess = (lhs - rhs) / (d * d);
      if (lhs > rhs + slack && excess > worst) {
        worst = excess;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > 0.0) out.push_back({"drift_condition", "drift condition fails at " + fmt_pair(xs[wi], xs[wj])});
  return report;
}

}  // namespace smallnoise
