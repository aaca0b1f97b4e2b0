#pragma once

#include <span>
#include <vector>

#include "smallnoise/model.hpp"

namespace smallnoise {

/// Tolerances of the adaptive Dormand-Prince 5(4) integrator used for the flow.
struct FlowSolverConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.1;

  void validate() const;
};

/// phi_t(x): solution of dx/dt = f(x) at time t from x, clamped to [0, state_upper].
/// Throws NumericalFailure carrying (t, x) if the integrator cannot make progress.
double phi(const ModelSpec& model, double t, double x, const FlowSolverConfig& cfg = {});

/// The flow from x evaluated at each of the nondecreasing, nonnegative `times`.
std::vector<double> phi_at(const ModelSpec& model, std::span<const double> times, double x,
                           const FlowSolverConfig& cfg = {});

/// Integrand 1/f(u) - 1/(a u) in the bounded form (a u - f(u)) / (a u f(u)).
/// Below u0 = 1e-8 * scale it returns the limit -f''(0)/(2a^2), with f''(0)
/// estimated by a one-sided second difference.
double g_integrand(const ModelSpec& model, double u);

/// G(x) = int_0^x (1/f(u) - 1/(a u)) du + log(x)/a by direct adaptive quadrature
/// in the state variable. Throws DomainError unless 0 < x < x*.
double G(const ModelSpec& model, double x, double quad_tol = 1e-12);

struct FlowLimitTrace {
  double value = 0.0;
  std::vector<double> times;   // schedule points actually evaluated
  std::vector<double> values;  // phi_t(x e^{-a t}) at those points
  std::vector<double> diffs;   // |values[k] - values[k-1]|, k >= 1
  bool converged = false;
};

/// t_k = (k/a) log 10 for k = 1..30.
std::vector<double> default_flow_limit_schedule(double a);

/// Cached machinery for G, its inverse and H on one model.
///
/// G is tabulated on a uniform grid of the logistic coordinate
/// z = log(x / (x* - x)) (or z = log x when x* is infinite), where
/// dG/dz is bounded at both ends of (0, x*). Between nodes the table is
/// refined by quadrature, so G is exact to quadrature tolerance everywhere.
/// The table is built eagerly in the constructor; instances are immutable
/// and safe to share across threads.
class FlowTable {
 public:
  explicit FlowTable(ModelSpec model, FlowSolverConfig cfg = {}, double quad_tol = 1e-13);

  const ModelSpec& model() const { return model_; }
  const FlowSolverConfig& solver_config() const { return cfg_; }
  double quadrature_tolerance() const { return quad_tol_; }

  double phi(double t, double x) const { return smallnoise::phi(model_, t, x, cfg_); }

  /// G(x) for 0 < x < x*; throws DomainError otherwise.
  double G(double x) const;

  /// The unique x in (0, x*) with G(x) = y. Throws UsageError for non-finite y
  /// and PrecisionError when x cannot be resolved in double precision.
  double G_inverse(double y) const;

  /// H(0) = 0; H(x) = G^{-1}(log(x)/a) for x > 0.
  double H(double x) const;

  /// phi_t(x e^{-a t}) along `schedule`, stopping once two successive values
  /// differ by less than 1e-9. Not converging is reported, not thrown.
  FlowLimitTrace H_via_flow_limit(double x, std::span<const double> schedule) const;
  FlowLimitTrace H_via_flow_limit(double x) const;

  /// Tabulated (x, G(x)) pairs, increasing in both coordinates.
  std::vector<std::pair<double, double>> table() const;

  /// Logistic coordinate and its inverse.
  double to_z(double x) const;
  double from_z(double z) const;
  /// G as a function of the logistic coordinate.
  double G_of_z(double z) const;

 private:
  double dG_dz(double z) const;
  double tail_integral(double z) const;
  double integrate_r(double z0, double z1) const;
  double node_G(std::size_t k) const;

  ModelSpec model_;
  FlowSolverConfig cfg_;
  double quad_tol_;
  double log_scale_ = 0.0;  // log x* for finite x*, else 0
  double z_lo_ = -40.0;
  double z_hi_ = 40.0;
  double z_limit_ = 40.0;   // largest z that G_inverse may return
  double h_ = 0.25;
  double dGdz_at_star_ = 0.0;
  std::vector<double> cum_;  // int_{-inf}^{z_k} (dG/dz - 1/a)
};

double G_inverse(const ModelSpec& model, double y);
double H(const ModelSpec& model, double x);
FlowLimitTrace H_via_flow_limit(const ModelSpec& model, double x, std::span<const double> schedule);

}  // namespace smallnoise
