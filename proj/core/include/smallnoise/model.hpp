#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace smallnoise {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using ScalarFn = std::function<double(double)>;
using FlowFn = std::function<double(double t, double x)>;

/// A one-dimensional diffusion dX = f(X)dt + sqrt(eps * sigma(X)) dB on [0, state_upper].
///
/// Immutable after construction. Coefficients are only ever evaluated inside
/// the state space: every accessor clamps its argument into [0, state_upper].
struct ModelSpec {
  std::string name;
  ScalarFn drift;
  ScalarFn diffusion;
  double a = 1.0;                    // f'(0)
  double b = 1.0;                    // sigma'(0)
  double x_star = kInfinity;         // smallest positive root of f, or +inf
  double state_upper = kInfinity;    // hard bound of the state space
  FlowFn closed_form_flow;           // optional (t, x) -> phi_t(x)
  ScalarFn closed_form_H;            // optional

  double clamp(double x) const { return std::clamp(x, 0.0, state_upper); }
  double f(double x) const { return drift(clamp(x)); }
  double sigma(double x) const { return diffusion(clamp(x)); }
  bool has_finite_x_star() const { return x_star < kInfinity; }
};

enum class BuiltinModel { wright_fisher, balancing_selection, linear_feller };

/// Parses a builtin model name; throws UsageError for unknown names.
BuiltinModel parse_builtin_model(std::string_view name);
std::string_view to_string(BuiltinModel m);
std::vector<std::string> builtin_model_names();

/// Fully populated builtin model. `b` scales the diffusion so that sigma'(0) = b.
/// Throws UsageError unless a > 0 and b > 0.
ModelSpec builtin_model(BuiltinModel which, double a, double b = 1.0);
ModelSpec builtin_model(std::string_view name, double a, double b = 1.0);

/// Copy of `spec` with the diffusion coefficient replaced by zero.
/// Test hook: the resulting SDE is the ODE itself.
ModelSpec without_noise(const ModelSpec& spec);

struct Violation {
  std::string assumption;  // short identifier, e.g. "drift_condition"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  double grid_upper = 0.0;  // right end of the grid that was checked
  std::size_t grid_size = 0;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view assumption) const;
};

/// Grid cap used when the state space is unbounded: 10 * max(1, x*), with x* = +inf read as 10.
double default_validation_cap(const ModelSpec& spec);

/// Spot-checks the standing assumptions on a uniform grid of `grid_size`
/// points in [0, min(state_upper, cap)]. A clean report means no violation was
/// found on the grid, not a proof. Non-finite evaluations are reported as violations.
ValidationReport validate_model(const ModelSpec& spec, std::size_t grid_size);
ValidationReport validate_model(const ModelSpec& spec, std::size_t grid_size, double cap);

}  // namespace smallnoise
