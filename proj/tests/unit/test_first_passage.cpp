#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tcl/cycles.hpp"

using namespace tcl;
using namespace tcl::cycles;

namespace {

// e^{y^2} erfc(y) with its asymptotic series for large y
double erfcx(double y) {
  if (y < 25.0) return std::exp(y * y) * std::erfc(y);
  const double q = 1.0 / (2.0 * y * y);
  return (1.0 - q + 3.0 * q * q - 15.0 * q * q * q) / (y * std::sqrt(std::numbers::pi));
}

// Mean exit time of the Up OU process from x0 down through an absorbing x_down,
// T(x0) = (1/kappa) int_{x_down}^{x0} e^{z(y)} int_y^inf e^{-z(u)} du dy.
double mean_exit_oracle(const TclParams& p, double x0) {
  const double w = std::sqrt(2.0 * p.kappa * p.tau);
  auto inner = [&](double y) { return w * 0.5 * std::sqrt(std::numbers::pi) * erfcx((y - p.x_minus) / w); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, p.x_down, x0, 15, 1e-13) /
         p.kappa;
}

}  // namespace

TEST_CASE("hard first-passage laws") {
  const auto p = canonical_params();
  const auto fp = hard_first_passage(p, Grid1D::aligned(p, 200), 0.005, 30.0);
  CHECK(fp.mass_up == doctest::Approx(1.0).epsilon(1e-3).scale(0));
  CHECK(fp.mass_down == doctest::Approx(1.0).epsilon(1e-3).scale(0));
  const double oracle = mean_exit_oracle(p, p.x_up);
  MESSAGE("mean passage " << fp.mean_up << " oracle " << oracle);
  CHECK(fp.mean_up == doctest::Approx(oracle).epsilon(5e-3).scale(0));
  CHECK(fp.mean_down == doctest::Approx(fp.mean_up).epsilon(1e-9).scale(0));
  CHECK(fp.g(0.0) == doctest::Approx(1.0).epsilon(1e-3).scale(0));
  CHECK(fp.tail_rate > 0.0);
  // transform is decreasing in s and log-convex
  const auto ct = fp.transform();
  CHECK(ct.mean == doctest::Approx(2.0 * oracle).epsilon(5e-3).scale(0));
  double prev = ct.dlog_g(-0.5 * fp.tail_rate);
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const double d = ct.dlog_g(s);
    CHECK(d < 0.0);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("small diffusion recovers the deterministic passage time") {
  auto p = canonical_params();
  p.kappa = 0.003;
  const auto fp = hard_first_passage(p, Grid1D::aligned(p, 200), 0.005, 6.0);
  CHECK(fp.mean_up == doctest::Approx(std::log(3.0)).epsilon(0.02).scale(0));
  CHECK(fp.mean_up == doctest::Approx(mean_exit_oracle(p, p.x_up)).epsilon(5e-3).scale(0));
}
