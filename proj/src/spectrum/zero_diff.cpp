#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "common/quadrature.hpp"
#include "tcl/cycles.hpp"
#include "tcl/spectrum.hpp"

namespace tcl::spectrum {
namespace {

void require_diffusionless_soft(const TclParams& p) {
  p.validate();
  if (p.hard || p.kappa != 0.0) throw std::invalid_argument("zero-diffusivity spectrum: soft model with kappa = 0 required");
}

// int_0^X (L - u)^{lt} u^{c-1} du
cplx endpoint_integral(double X, double L, cplx lt, cplx c, IntegralRoute route) {
  if (route == IntegralRoute::hypergeometric)
    return std::pow(L, lt) * std::pow(X, c) / c * specfun::hyp2f1_euler(-lt, c, X / L);
  if (!(c.real() > 0.0)) throw std::domain_error("endpoint_integral: quadrature needs Re c > 0");
  // u = X e^{-t}
  auto f = [&](double t) { return std::pow(X, c) * std::exp(-c * t) * std::pow(L - X * std::exp(-t), lt); };
  const double bound = std::abs(std::pow(X, c)) * std::max(std::pow(L, lt.real()), std::pow(L - X, lt.real()));
  return detail::integrate_decaying(f, 0.0, c.real(), std::abs(c.imag()) + 1.0, bound, 1e-15 * bound);
}

std::vector<specfun::KnownPole> edge_poles(const TclParams& p, double re_min, double re_max) {
  std::vector<specfun::KnownPole> poles;
  for (int k = 0;; ++k) {
    const double l = p.rate + k / p.tau;
    if (l >= re_max) break;
    if (l > re_min) poles.push_back({cplx(l, 0.0), 2});
  }
  return poles;
}

std::vector<Eigenvalue> finish(std::vector<Eigenvalue> v) {
  std::sort(v.begin(), v.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (std::abs(a.lambda.real() - b.lambda.real()) > 1e-9) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  for (std::size_t i = 0; i < v.size(); ++i) v[i].index = static_cast<int>(i);
  return v;
}

}  // namespace

ZeroDiffMode zero_diff_modes(cplx lambda, const TclParams& p, double x, IntegralRoute route) {
  require_diffusionless_soft(p);
  if (!(x > p.x_minus && x < p.x_plus)) throw std::domain_error("zero_diff_modes: x outside (x_-, x_+)");
  const double rt = p.rate * p.tau, L = p.x_plus - p.x_minus;
  const cplx lt = lambda * p.tau, c = rt - lt;
  if (x <= p.x_down) {
    return {std::pow(x - p.x_minus, c - 1.0),
            rt * std::pow(p.x_plus - x, -1.0 - lt) * endpoint_integral(x - p.x_minus, L, lt, c, route)};
  }
  const cplx i_left = endpoint_integral(p.x_down - p.x_minus, L, lt, c, route);
  if (x <= p.x_up) {
    return {std::pow(p.x_down - p.x_minus, rt) * std::pow(x - p.x_minus, -1.0 - lt),
            rt * i_left * std::pow(p.x_plus - x, -1.0 - lt)};
  }
  const cplx c2 = rt * i_left * std::pow(p.x_plus - p.x_up, -rt);
  return {c2 * rt * std::pow(x - p.x_minus, -1.0 - lt) * endpoint_integral(p.x_plus - x, L, lt, c, route),
          c2 * std::pow(p.x_plus - x, c - 1.0)};
}

cplx zero_diff_condition(cplx lambda, const TclParams& p, IntegralRoute route) {
  require_diffusionless_soft(p);
  const double rt = p.rate * p.tau, L = p.x_plus - p.x_minus;
  const double a = p.x_down - p.x_minus, b = p.x_plus - p.x_up;
  const cplx lt = lambda * p.tau, c = rt - lt;
  if (std::abs(c) < 1e-300) throw specfun::PoleError("zero_diff_condition: lambda = r is a pole");
  const cplx il = endpoint_integral(a, L, lt, c, route), ir = endpoint_integral(b, L, lt, c, route);
  return rt * rt * il * ir / std::pow(a * b, rt) - 1.0;
}

std::vector<Eigenvalue> soft_poles(const TclParams& p, const RootSearchRegion& region) {
  require_diffusionless_soft(p);
  specfun::RootSearchRegion s_region = region;
  s_region.re_min = -region.re_max;
  s_region.re_max = -region.re_min;
  s_region.im_min = -region.im_max;
  s_region.im_max = -region.im_min;
  specfun::RootSearchOptions opt;
  for (const auto& pole : edge_poles(p, region.re_min, region.re_max)) opt.poles.push_back({-pole.location, 2});
  auto f = [&](cplx s) { return 1.0 - cycles::laplace_g(s, p); };
  std::vector<Eigenvalue> out;
  for (const auto& r : specfun::find_roots(f, s_region, opt)) out.push_back({-r.z, r.residual, 0, Method::soft_poles});
  return finish(std::move(out));
}

std::vector<Eigenvalue> zero_diff_roots(const TclParams& p, const RootSearchRegion& region) {
  require_diffusionless_soft(p);
  specfun::RootSearchOptions opt;
  opt.poles = edge_poles(p, region.re_min, region.re_max);
  auto f = [&](cplx l) { return zero_diff_condition(l, p); };
  std::vector<Eigenvalue> out;
  for (const auto& r : specfun::find_roots(f, region, opt)) out.push_back({r.z, r.residual, 0, Method::zero_diff_condition});
  return finish(std::move(out));
}

}  // namespace tcl::spectrum
