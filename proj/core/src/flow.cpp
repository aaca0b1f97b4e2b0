#include "smallnoise/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "smallnoise/errors.hpp"

namespace smallnoise {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 1>;
using Dopri5 = odeint::runge_kutta_dopri5<State>;

constexpr double kLimitTolerance = 1e-9;

// The absolute tolerance never exceeds rel_tol * x0, so flows started far
// below abs_tol keep relative accuracy.
auto make_stepper(const FlowSolverConfig& cfg, double x0) {
  double abs_tol = std::min(cfg.abs_tol, cfg.rel_tol * x0);
  if (!(abs_tol > 0.0)) abs_tol = std::numeric_limits<double>::denorm_min();
  return odeint::make_controlled(abs_tol, cfg.rel_tol, cfg.max_step, Dopri5());
}

// Bisects until the Kronrod error estimate is below tol * max(L1, hi - lo).
// The length term gives an absolute floor, so integrands that vanish up to
// rounding noise terminate instead of bisecting to full depth.
template <class F>
double adaptive_gk(const F& f, double lo, double hi, double tol, unsigned depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0, l1 = 0.0;
  const double est = GK::integrate(f, lo, hi, 0, 0.0, &err, &l1);
  const double floor = 16 * std::numeric_limits<double>::epsilon();
  if (depth == 0 || err <= std::max(tol * std::max(l1, std::abs(hi - lo)), floor)) return est;
  const double mid = 0.5 * (lo + hi);
  return adaptive_gk(f, lo, mid, tol, depth - 1) + adaptive_gk(f, mid, hi, tol, depth - 1);
}

}  // namespace

void FlowSolverConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw UsageError("flow solver tolerances must be positive");
  if (!(max_step > 0.0)) throw UsageError("flow solver max_step must be positive");
}

double phi(const ModelSpec& model, double t, double x, const FlowSolverConfig& cfg) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("phi: t must be finite and nonnegative");
  if (!(x >= 0.0) || !(x <= model.state_upper)) throw DomainError("phi: x outside the state space");
  if (t == 0.0 || x == 0.0) return x;
  cfg.validate();

  State s{x};
  auto rhs = [&model](const State& y, State& dydt, double) { dydt[0] = model.f(y[0]); };
  try {
    odeint::integrate_adaptive(make_stepper(cfg, x), rhs, s, 0.0, t, std::min(cfg.max_step, t) * 0.1);
  } catch (const std::runtime_error& e) {
    throw NumericalFailure(std::string("phi: step size underflow (") + e.what() + ")", t, x);
  }
  if (!std::isfinite(s[0])) throw NumericalFailure("phi: non-finite state", t, x);
  return model.clamp(s[0]);
}

std::vector<double> phi_at(const ModelSpec& model, std::span<const double> times, double x,
                           const FlowSolverConfig& cfg) {
  if (!(x >= 0.0) || !(x <= model.state_upper)) throw DomainError("phi: x outside the state space");
  std::vector<double> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  if (!(times.front() >= 0.0)) throw DomainError("phi: times must be nonnegative");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw DomainError("phi: times must be nondecreasing");
  if (x == 0.0) return std::vector<double>(times.size(), 0.0);
  cfg.validate();

  State s{x};
  double t_now = 0.0;
  auto rhs = [&model](const State& y, State& dydt, double) { dydt[0] = model.f(y[0]); };
  auto stepper = make_stepper(cfg, x);
  for (const double t : times) {
    if (t > t_now) {
      try {
        odeint::integrate_adaptive(stepper, rhs, s, t_now, t, std::min(cfg.max_step, t - t_now) * 0.1);
      } catch (const std::runtime_error& e) {
        throw NumericalFailure(std::string("phi: step size underflow (") + e.what() + ")", t, x);
      }
      if (!std::isfinite(s[0])) throw NumericalFailure("phi: non-finite state", t, x);
      t_now = t;
    }
    out.push_back(model.clamp(s[0]));
  }
  return out;
}

double g_integrand(const ModelSpec& model, double u) {
  const double scale = model.has_finite_x_star() ? model.x_star : 1.0;
  const double u0 = 1e-8 * scale;
  const double a = model.a;
  if (u < u0) {
    const double h = 1e-4 * scale;
    const double f2 = (model.f(2.0 * h) - 2.0 * model.f(h) + model.f(0.0)) / (h * h);
    return -f2 / (2.0 * a * a);
  }
  const double fu = model.f(u);
  return (a * u - fu) / (a * u * fu);
}

double G(const ModelSpec& model, double x, double quad_tol) {
  if (!(x > 0.0) || !(x < model.x_star)) throw DomainError("G: x must lie in (0, x*)");
  const double scale = model.has_finite_x_star() ? model.x_star : 1.0;
  const double u0 = 1e-8 * scale;
  auto integrand = [&model](double u) { return g_integrand(model, u); };
  if (x <= u0) return integrand(0.0) * x + std::log(x) / model.a;

  // Panels double in length away from 0 and shrink geometrically towards x*,
  // matching the scales on which the integrand varies.
  std::vector<double> cuts{u0};
  const double mid = model.has_finite_x_star() ? 0.5 * model.x_star : x;
  while (cuts.back() < std::min(x, mid)) cuts.push_back(std::min(2.0 * cuts.back(), std::min(x, mid)));
  if (x > mid) {
    double gap = model.x_star - mid;
    while (cuts.back() < x) {
      gap *= 0.5;
      cuts.push_back(std::min(model.x_star - gap, x));
    }
  }
  double integral = integrand(0.0) * u0;
  for (std::size_t k = 1; k < cuts.size(); ++k) integral += adaptive_gk(integrand, cuts[k - 1], cuts[k], quad_tol, 8);
  return integral + std::log(x) / model.a;
}

std::vector<double> default_flow_limit_schedule(double a) {
  std::vector<double> ts;
  ts.reserve(30);
  for (int k = 1; k <= 30; ++k) ts.push_back(k * std::log(10.0) / a);
  return ts;
}

FlowTable::FlowTable(ModelSpec model, FlowSolverConfig cfg, double quad_tol)
    : model_(std::move(model)), cfg_(cfg), quad_tol_(quad_tol) {
  cfg_.validate();
  if (!(model_.a > 0.0)) throw UsageError("FlowTable: a must be positive");
  if (!model_.drift) throw UsageError("FlowTable: drift is not populated");
  if (model_.has_finite_x_star()) {
    log_scale_ = std::log(model_.x_star);
    // Beyond z ~ 34 the distance to x* is within a few ulps of x*.
    z_hi_ = 34.0;
    z_limit_ = 34.0;
    const double s = model_.x_star;
    const double hh = 1e-6 * s;
    dGdz_at_star_ = (s - hh) * hh / (s * model_.f(s - hh));
  } else {
    z_hi_ = 40.0;
    z_limit_ = 700.0;
  }
  const auto n = static_cast<std::size_t>(std::llround((z_hi_ - z_lo_) / h_));
  cum_.resize(n + 1);
  cum_[0] = tail_integral(z_lo_);
  for (std::size_t k = 0; k < n; ++k) {
    const double za = z_lo_ + h_ * static_cast<double>(k);
    cum_[k + 1] = cum_[k] + integrate_r(za, za + h_);
  }
}

double FlowTable::to_z(double x) const {
  if (model_.has_finite_x_star()) return std::log(x / (model_.x_star - x));
  return std::log(x);
}

double FlowTable::from_z(double z) const {
  if (model_.has_finite_x_star()) return model_.x_star / (1.0 + std::exp(-z));
  return std::exp(z);
}

double FlowTable::dG_dz(double z) const {
  const double x = from_z(z);
  const double fx = model_.f(x);
  if (model_.has_finite_x_star()) {
    const double s = model_.x_star;
    const double d = s - x;
    if (!(d > 0.0) || !(fx > 0.0)) return dGdz_at_star_;
    return x * d / (s * fx);
  }
  if (!(fx > 0.0)) throw DomainError("G: drift must be positive on (0, x*)");
  return x / fx;
}

double FlowTable::tail_integral(double z) const {
  // dG/dz - 1/a decays like e^z as z -> -inf, so its integral up to z equals
  // the integrand at z to leading order.
  return dG_dz(z) - 1.0 / model_.a;
}

double FlowTable::integrate_r(double z0, double z1) const {
  if (z0 == z1) return 0.0;
  const double inv_a = 1.0 / model_.a;
  auto r = [this, inv_a](double z) { return dG_dz(z) - inv_a; };
  return adaptive_gk(r, z0, z1, quad_tol_, 15);
}

double FlowTable::node_G(std::size_t k) const {
  const double z = z_lo_ + h_ * static_cast<double>(k);
  return (z + log_scale_) / model_.a + cum_[k];
}

double FlowTable::G_of_z(double z) const {
  double c;
  if (z < z_lo_) {
    c = tail_integral(z);
  } else {
    const double pos = std::floor((z - z_lo_) / h_);
    const auto k = std::min(static_cast<std::size_t>(pos), cum_.size() - 1);
    const double zk = z_lo_ + h_ * static_cast<double>(k);
    c = cum_[k] + integrate_r(zk, z);
  }
  return (z + log_scale_) / model_.a + c;
}

double FlowTable::G(double x) const {
  if (!(x > 0.0) || !(x < model_.x_star)) throw DomainError("G: x must lie in (0, x*)");
  return G_of_z(to_z(x));
}

double FlowTable::G_inverse(double y) const {
  if (!std::isfinite(y)) throw UsageError("G_inverse: y must be finite");
  double za, zb;
  if (y < node_G(0)) {
    zb = z_lo_;
    double step = 1.0;
    za = zb - step;
    while (G_of_z(za) > y) {
      zb = za;
      step *= 2.0;
      za = zb - step;
      if (za < -740.0) throw PrecisionError("G_inverse: y below the representable range of G");
    }
  } else if (y > node_G(cum_.size() - 1)) {
    za = z_hi_;
    double step = 1.0;
    zb = za + step;
    for (;;) {
      if (zb > z_limit_) throw PrecisionError("G_inverse: y above the representable range of G");
      if (G_of_z(zb) >= y) break;
      za = zb;
      step *= 2.0;
      zb = std::min(za + step, z_limit_ + 1.0);
    }
  } else {
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (node_G(mid) <= y ? lo : hi) = mid;
    }
    za = z_lo_ + h_ * static_cast<double>(lo);
    zb = z_lo_ + h_ * static_cast<double>(hi);
  }

  auto residual = [this, y](double z) { return G_of_z(z) - y; };
  const double fa = residual(za);
  const double fb = residual(zb);
  if (fa == 0.0) return from_z(za);
  if (fb == 0.0) return from_z(zb);
  boost::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      residual, za, zb, fa, fb, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double x = from_z(0.5 * (lo + hi));
  if (!(x > 0.0) || !(x < model_.x_star)) throw PrecisionError("G_inverse: result not representable inside (0, x*)");
  return x;
}

double FlowTable::H(double x) const {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("H: x must be finite and nonnegative");
  if (x == 0.0) return 0.0;
  return G_inverse(std::log(x) / model_.a);
}

FlowLimitTrace FlowTable::H_via_flow_limit(double x, std::span<const double> schedule) const {
  if (!(x > 0.0)) throw DomainError("H_via_flow_limit: x must be positive");
  if (schedule.empty()) throw UsageError("H_via_flow_limit: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1])) throw UsageError("H_via_flow_limit: schedule must be increasing");

  FlowLimitTrace trace;
  for (const double t : schedule) {
    const double start = x * std::exp(-model_.a * t);
    const double v = smallnoise::phi(model_, t, std::min(start, model_.state_upper), cfg_);
    if (!trace.values.empty()) {
      const double d = std::abs(v - trace.values.back());
      trace.diffs.push_back(d);
      trace.times.push_back(t);
      trace.values.push_back(v);
      if (d < kLimitTolerance) {
        trace.converged = true;
        break;
      }
    } else {
      trace.times.push_back(t);
      trace.values.push_back(v);
    }
  }
  trace.value = trace.values.back();
  return trace;
}

FlowLimitTrace FlowTable::H_via_flow_limit(double x) const {
  const auto schedule = default_flow_limit_schedule(model_.a);
  return H_via_flow_limit(x, schedule);
}

std::vector<std::pair<double, double>> FlowTable::table() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(cum_.size());
  for (std::size_t k = 0; k < cum_.size(); ++k)
    out.emplace_back(from_z(z_lo_ + h_ * static_cast<double>(k)), node_G(k));
  return out;
}

double G_inverse(const ModelSpec& model, double y) { return FlowTable(model).G_inverse(y); }

double H(const ModelSpec& model, double x) {
  if (x == 0.0) return 0.0;
  return FlowTable(model).H(x);
}

FlowLimitTrace H_via_flow_limit(const ModelSpec& model, double x, std::span<const double> schedule) {
  return FlowTable(model).H_via_flow_limit(x, schedule);
}

}  // namespace smallnoise
