#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace tcl::detail {

using cplx = std::complex<double>;

// Adaptive Gauss-Kronrod of a complex integrand on a finite interval.
inline cplx integrate_gk(const std::function<cplx(double)>& f, double a, double b,
                         double tol = 1e-13, unsigned depth = 20) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).real(); }, a, b,
                                                         depth, tol);
  const double im = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x).imag(); }, a, b,
                                                         depth, tol);
  return {re, im};
}

// Integral over [a, b] of an integrand with integrable endpoint singularities.
inline cplx integrate_ts(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double re = ts.integrate([&](double x) { return f(x).real(); }, a, b, tol);
  const double im = ts.integrate([&](double x) { return f(x).imag(); }, a, b, tol);
  return {re, im};
}

// Integral over [a, inf) of f(y) with |f(y)| <= bound * exp(-decay * (y - a)) and
// oscillation frequency at most freq; split into pieces of at most half a period.
inline cplx integrate_decaying(const std::function<cplx(double)>& f, double a, double decay,
                               double freq, double bound = 1.0, double tol = 1e-16) {
  if (!(decay > 0.0)) throw std::domain_error("integrate_decaying: integrand does not decay");
  const double length = std::log(std::max(bound, 1e-300) / tol) / decay;
  const double piece = std::min(std::max(length / 64.0, 1e-3), std::numbers::pi / std::max(freq, 1e-12));
  cplx acc(0.0, 0.0);
  double x = a;
  const double end = a + std::max(length, piece);
  while (x < end) {
    const double b = std::min(x + piece, end);
    acc += integrate_gk(f, x, b, 1e-14, 8);
    x = b;
  }
  return acc;
}

}  // namespace tcl::detail
