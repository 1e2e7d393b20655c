#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <gsl/gsl_sf_erf.h>
#include <numbers>
#include <stdexcept>

#include "tcl/specfun.hpp"
#include "tcl/steady.hpp"

namespace tcl::steady {
namespace {

void require_hard(const TclParams& p, bool with_diffusion) {
  p.validate();
  if (!p.hard) throw std::invalid_argument("stationary solution: hard model required");
  if (with_diffusion && !(p.kappa > 0.0)) throw std::invalid_argument("stationary_hard: kappa > 0 required");
}

// Shape of P_up with J = kappa: e^{-y^2} int_{y_d}^{min(y, y_u)} e^{t^2} dt times sqrt(2 kappa tau),
// written in the scaled variable y = (x - x_-)/sqrt(2 kappa tau).
double up_shape(double x, double center, double lo, double hi, double width) {
  if (x <= lo) return 0.0;
  const double y = (x - center) / width, yl = (lo - center) / width, yh = (hi - center) / width;
  if (x <= hi) return width * specfun::growing_gaussian_integral_scaled(yl, y);
  return width * specfun::growing_gaussian_integral_scaled(yl, yh) * std::exp(-(y - yh) * (y + yh));
}

double erfcx(double y) { return std::exp(y * y + gsl_sf_log_erfc(y)); }

// Integral of up_shape over the whole line.
double up_mass(double center, double lo, double hi, double width) {
  using boost::math::quadrature::gauss_kronrod;
  const double inside = gauss_kronrod<double, 61>::integrate(
      [&](double x) { return up_shape(x, center, lo, hi, width); }, lo, hi, 15, 1e-14);
  const double yl = (lo - center) / width, yh = (hi - center) / width;
  const double tail = width * width * specfun::growing_gaussian_integral_scaled(yl, yh) * 0.5 *
                      std::sqrt(std::numbers::pi) * erfcx(yh);
  return inside + tail;
}

// Cell average of f over [a, b], split at the given breakpoints.
template <class F>
double cell_average(F&& f, double a, double b, double k1, double k2) {
  using boost::math::quadrature::gauss;
  double pts[4] = {a, std::clamp(k1, a, b), std::clamp(k2, a, b), b};
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    if (pts[i + 1] > pts[i]) acc += gauss<double, 10>::integrate(f, pts[i], pts[i + 1]);
  return acc / (b - a);
}

}  // namespace

double HardStationary::up(double x) const {
  const auto& p = params;
  const double w = std::sqrt(2.0 * p.kappa * p.tau);
  return J / p.kappa * up_shape(x, p.x_minus, p.x_down, p.x_up, w);
}

double HardStationary::down(double x) const {
  // Mirror x -> -x maps Down onto Up with thresholds and targets exchanged.
  const auto& p = params;
  const double w = std::sqrt(2.0 * p.kappa * p.tau);
  return J / p.kappa * up_shape(-x, -p.x_plus, -p.x_up, -p.x_down, w);
}

HardStationary hard_stationary_density(const TclParams& p) {
  require_hard(p, true);
  const double w = std::sqrt(2.0 * p.kappa * p.tau);
  const double m = up_mass(p.x_minus, p.x_down, p.x_up, w) + up_mass(-p.x_plus, -p.x_up, -p.x_down, w);
  return {p, p.kappa / m};
}

StationarySolution stationary_hard(const TclParams& p, const Grid1D& grid) {
  const auto hs = hard_stationary_density(p);
  StationarySolution out{FieldPair(grid), hs.J};
  for (int i = 0; i < grid.n_cells; ++i) {
    const double a = grid.face(i), b = grid.face(i + 1);
    out.field.up[i] = cell_average([&](double x) { return hs.up(x); }, a, b, p.x_down, p.x_up);
    out.field.down[i] = cell_average([&](double x) { return hs.down(x); }, a, b, p.x_down, p.x_up);
  }
  out.field.normalize();
  return out;
}

StationarySolution stationary_diffusionless_hard(const TclParams& p, const Grid1D& grid) {
  require_hard(p, false);
  const double t_dc = deadband_cycle_time(p);
  const double c = p.tau / t_dc;
  StationarySolution out{FieldPair(grid), 1.0 / t_dc};
  for (int i = 0; i < grid.n_cells; ++i) {
    const double a = std::max(grid.face(i), p.x_down), b = std::min(grid.face(i + 1), p.x_up);
    if (!(b > a)) continue;
    out.field.up[i] = c * std::log((b - p.x_minus) / (a - p.x_minus)) / grid.dx();
    out.field.down[i] = c * std::log((p.x_plus - a) / (p.x_plus - b)) / grid.dx();
  }
  return out;
}

}  // namespace tcl::steady
