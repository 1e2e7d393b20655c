#include <cmath>
#include <limits>

#include "common/quadrature.hpp"
#include "tcl/cycles.hpp"

namespace tcl::cycles {
namespace {

void check_pole(cplx c) {
  const double k = std::round(-c.real());
  if (k >= 0.0 && std::abs(c + k) < 1e-13 * (1.0 + k))
    throw specfun::PoleError("laplace_f: s is a pole (r + s) tau = -k");
}

double soft_rate(const TclParams& p) {
  if (p.hard) throw std::invalid_argument("cycle transforms need the soft model (finite rate)");
  return p.rate;
}

// d/ds F_s by partial fractions; converges for gamma < 1.
cplx f_prime_series(cplx s, double gamma, double r, double tau) {
  const cplx c = (r + s) * tau;
  check_pole(c);
  const double a = r * tau + 1.0;
  cplx acc(0.0, 0.0);
  double coef = 1.0;  // (a)_k / k! * (-gamma)^k
  for (int k = 0; k < 100000; ++k) {
    const cplx d = c + double(k);
    const cplx term = coef / (d * d);
    acc += term;
    if (k > a + 2 && std::abs(term) < 1e-18 * std::abs(acc)) break;
    coef *= (a + k) * (-gamma) / (k + 1.0);
  }
  return -r * tau * tau * std::pow(1.0 + gamma, r * tau) * acc;
}

}  // namespace

double out_time_forward(double t, double gamma, double tau) {
  return t + tau * std::log1p(-gamma * std::expm1(-t / tau));
}

double out_time_inverse(double t_out, double gamma, double tau) {
  return t_out + tau * (std::log1p(gamma * std::exp(-t_out / tau)) - std::log1p(gamma));
}

double p_out(double t_out, double gamma, double r, double tau) {
  if (t_out < 0.0) return 0.0;
  const double e = std::exp(-t_out / tau);
  // ((1+g)/(e^{t/tau}+g))^{r tau} = exp(r tau (ln(1+g) - t/tau - ln(1 + g e^{-t/tau})))
  const double log_ratio = std::log1p(gamma) - t_out / tau - std::log1p(gamma * e);
  return r / (1.0 + gamma * e) * std::exp(r * tau * log_ratio);
}

double p_out_cdf(double t_out, double gamma, double r, double tau) {
  if (t_out <= 0.0) return 0.0;
  // Survival of the Poisson clock over the physical time spent eligible.
  return -std::expm1(-r * out_time_inverse(t_out, gamma, tau));
}

cplx laplace_f(cplx s, double gamma, double r, double tau, LaplaceRoute route) {
  const cplx c = (r + s) * tau;
  if (route == LaplaceRoute::quadrature) {
    const double decay = s.real() + r;
    if (!(decay > 0.0)) throw std::domain_error("laplace_f: quadrature route needs Re s > -r");
    const double bound = r * std::pow(1.0 + gamma, r * tau);
    return detail::integrate_decaying(
        [&](double t) { return std::exp(-s * t) * p_out(t, gamma, r, tau); }, 0.0, decay,
        std::abs(s.imag()), bound, 1e-17);
  }
  check_pole(c);
  if (gamma == 0.0) return r / (r + s);
  const double a = r * tau + 1.0;
  return r * tau * std::pow(1.0 + gamma, r * tau) / c * specfun::gauss_2f1_neg(a, c, gamma);
}

cplx laplace_f_prime(cplx s, double gamma, double r, double tau) {
  if (gamma <= 0.5) return f_prime_series(s, gamma, r, tau);
  const double h = 1e-3 * std::max(1.0, std::abs(s));
  auto f = [&](cplx z) { return laplace_f(z, gamma, r, tau); };
  return (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h);
}

double out_time_mean(double gamma, double r, double tau) {
  return -laplace_f_prime(0.0, gamma, r, tau).real();
}

cplx laplace_g(cplx s, const TclParams& p, LaplaceRoute route) {
  const double r = soft_rate(p);
  const auto g = geometry(p);
  return std::exp(-s * g.t_dc) * laplace_f(s, g.alpha, r, p.tau, route) *
         laplace_f(s, g.beta, r, p.tau, route);
}

cplx laplace_g_prime(cplx s, const TclParams& p) {
  const double r = soft_rate(p);
  const auto g = geometry(p);
  const cplx fa = laplace_f(s, g.alpha, r, p.tau), fb = laplace_f(s, g.beta, r, p.tau);
  const cplx da = laplace_f_prime(s, g.alpha, r, p.tau), db = laplace_f_prime(s, g.beta, r, p.tau);
  return std::exp(-s * g.t_dc) * (da * fb + fa * db - g.t_dc * fa * fb);
}

double mean_cycle_time(const TclParams& p) { return -laplace_g_prime(0.0, p).real(); }

CycleTransform soft_cycle_transform(const TclParams& p) {
  const double r = soft_rate(p);
  const auto g = geometry(p);
  CycleTransform ct;
  ct.log_g = [p](double s) { return std::log(laplace_g(s, p).real()); };
  ct.dlog_g = [p, g, r](double s) {
    const double fa = laplace_f(s, g.alpha, r, p.tau).real();
    const double fb = laplace_f(s, g.beta, r, p.tau).real();
    return -g.t_dc + laplace_f_prime(s, g.alpha, r, p.tau).real() / fa +
           laplace_f_prime(s, g.beta, r, p.tau).real() / fb;
  };
  ct.s_min = -r;
  ct.mean = mean_cycle_time(p);
  ct.t_min = g.t_dc;
  return ct;
}

cplx CycleLaw::f_alpha(cplx s) const { return laplace_f(s, geom.alpha, params.rate, params.tau); }
cplx CycleLaw::f_beta(cplx s) const { return laplace_f(s, geom.beta, params.rate, params.tau); }
cplx CycleLaw::g(cplx s) const { return std::exp(-s * geom.t_dc) * f_alpha(s) * f_beta(s); }

CycleLaw make_cycle_law(const TclParams& p) {
  const double r = soft_rate(p);
  CycleLaw law{p, geometry(p), 0.0, 0.0, 0.0, {}};
  law.mean_out_alpha = out_time_mean(law.geom.alpha, r, p.tau);
  law.mean_out_beta = out_time_mean(law.geom.beta, r, p.tau);
  law.mean_cycle = law.geom.t_dc + law.mean_out_alpha + law.mean_out_beta;
  return law;
}

}  // namespace tcl::cycles
