#include "tcl/core.hpp"

#include <cmath>
#include <stdexcept>

namespace tcl {

TclParams TclParams::hard_model(double x_minus, double x_down, double x_up, double x_plus,
                                double tau, double kappa) {
  TclParams p{x_minus, x_down, x_up, x_plus, tau, kappa, std::numeric_limits<double>::infinity(),
              true};
  p.validate();
  return p;
}

TclParams TclParams::soft_model(double x_minus, double x_down, double x_up, double x_plus,
                                double tau, double kappa, double rate) {
  TclParams p{x_minus, x_down, x_up, x_plus, tau, kappa, rate, false};
  p.validate();
  return p;
}

void TclParams::validate() const {
  if (!(x_minus < x_down)) throw std::invalid_argument("invariant x_minus < x_down violated");
  if (!(x_down < x_up)) throw std::invalid_argument("invariant x_down < x_up violated");
  if (!(x_up < x_plus)) throw std::invalid_argument("invariant x_up < x_plus violated");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("invariant tau > 0 violated");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("invariant kappa >= 0 violated");
  if (!hard && !(rate > 0.0 && std::isfinite(rate)))
    throw std::invalid_argument("invariant rate > 0 violated (use the hard flag for infinite rate)");
}

TclParams canonical_params() { return TclParams::hard_model(-2.0, -1.0, 1.0, 2.0, 1.0, 0.1); }

TclParams canonical_soft(double rate, double kappa) {
  return TclParams::soft_model(-2.0, -1.0, 1.0, 2.0, 1.0, kappa, rate);
}

double deadband_cycle_time(const TclParams& p) {
  return p.tau * std::log(((p.x_up - p.x_minus) * (p.x_plus - p.x_down)) /
                          ((p.x_down - p.x_minus) * (p.x_plus - p.x_up)));
}

DerivedGeometry geometry(const TclParams& p) {
  DerivedGeometry g;
  g.alpha = (p.x_down - p.x_minus) / (p.x_plus - p.x_down);
  g.beta = (p.x_plus - p.x_up) / (p.x_up - p.x_minus);
  g.t_dc = deadband_cycle_time(p);
  g.u = (p.x_up - p.x_minus) / p.tau;
  return g;
}

double drift(double x, SwitchState s, const TclParams& p) { return -(x - p.target(s)) / p.tau; }

double deterministic_flow(double x0, SwitchState s, double dt, const TclParams& p) {
  if (dt == 0.0) return x0;
  const double c = p.target(s);
  return c + (x0 - c) * std::exp(-dt / p.tau);
}

double flow_time(double x0, double x1, SwitchState s, const TclParams& p) {
  const double c = p.target(s);
  const double a = x0 - c;
  const double b = x1 - c;
  if (a == 0.0) return b == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  const double q = b / a;
  if (!(q > 0.0) || q > 1.0) return std::numeric_limits<double>::infinity();
  return -p.tau * std::log(q);
}

}  // namespace tcl
