#include <cmath>
#include <numbers>

#include "common/quadrature.hpp"
#include "tcl/cycles.hpp"

namespace tcl::cycles {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx phi(cplx s, const TclParams& p, const DerivedGeometry& g) {
  return laplace_f(s, g.alpha, p.rate, p.tau) * laplace_f(s, g.beta, p.rate, p.tau);
}

}  // namespace

std::vector<specfun::PoleResidue> return_probability_poles(const TclParams& p,
                                                           const ReturnPoleOptions& opt) {
  const auto g = geometry(p);
  const double r = p.rate, tau = p.tau;
  auto one_minus_g = [&](cplx s) { return 1.0 - laplace_g(s, p); };

  // Keep the left edge halfway between consecutive poles of G.
  const double k_edge = std::floor((-opt.re_min - r) * tau);
  const double re_min = k_edge >= 0 ? -r - (k_edge + 0.5) / tau : opt.re_min;
  // Put the horizontal edges halfway between members of the oscillatory family.
  const double spacing = kTwoPi / g.t_dc;
  const double im_box = std::max(1.0, std::round(opt.im_box / spacing)) * spacing;

  specfun::RootSearchOptions ro;
  for (int k = 0; -r - k / tau > re_min; ++k) ro.poles.push_back({cplx(-r - k / tau, 0.0), 2});
  const specfun::RootSearchRegion region{re_min, 0.3, -im_box, im_box, 0, 0, 1e-10};
  const auto roots = specfun::find_roots(one_minus_g, region, ro);

  std::vector<specfun::PoleResidue> out;
  auto residue = [&](cplx s) { return 1.0 / (-laplace_g_prime(s, p)); };
  for (const auto& root : roots) out.push_back({root.z, residue(root.z)});

  // Large-|Im| roots: fixed point of s = (Log Phi(s) + 2 pi i m) / t_dc, then Newton.
  int accepted = 0;
  const int m_start = std::max(1, static_cast<int>(std::floor(im_box / spacing)) - 2);
  for (int m = m_start; accepted < opt.n_asymptotic; ++m) {
    cplx s(0.0, (kTwoPi * m - std::numbers::pi) / g.t_dc);
    for (int it = 0; it < 200; ++it) {
      const cplx next = (std::log(phi(s, p, g)) + cplx(0.0, kTwoPi * m)) / g.t_dc;
      if (std::abs(next - s) < 1e-14 * std::abs(s)) {
        s = next;
        break;
      }
      s = next;
    }
    s = specfun::newton_polish(one_minus_g, s, 1e-15);
    if (s.imag() <= im_box) continue;
    out.push_back({s, residue(s)});
    out.push_back({std::conj(s), residue(std::conj(s))});
    ++accepted;
  }
  return out;
}

double return_probability_residues(double t, const TclParams& p,
                                   const std::vector<specfun::PoleResidue>& poles) {
  return specfun::inverse_laplace_residues(poles, t) / geometry(p).u;
}

double return_probability(double t, const TclParams& p, ReturnMethod method) {
  if (!(t > 0.0)) throw std::invalid_argument("return_probability: t > 0 required");
  if (p.kappa != 0.0) throw std::invalid_argument("return_probability: diffusionless model only");
  const auto g = geometry(p);
  switch (method) {
    case ReturnMethod::n_sum: {
      double acc = 0.0;
      for (int n = 1; t - n * g.t_dc > 0.0; ++n) acc += p_out_n(t - n * g.t_dc, n, p);
      return acc / g.u;
    }
    case ReturnMethod::residue_sum:
      return return_probability_residues(t, p, return_probability_poles(p));
    case ReturnMethod::bromwich: {
      specfun::InversionOptions o;
      o.euler_terms = 40;
      auto f = [&](cplx s) {
        const cplx gs = laplace_g(s, p);
        return gs / (1.0 - gs);
      };
      return specfun::inverse_laplace_bromwich(f, t, o) / g.u;
    }
  }
  throw std::invalid_argument("return_probability: unknown method");
}

cplx laplace_mode(cplx s, double x, SwitchState sigma, const TclParams& p) {
  if (p.hard || p.kappa != 0.0) throw std::invalid_argument("laplace_mode: soft diffusionless model only");
  if (!(x > p.x_minus && x < p.x_plus)) throw std::domain_error("laplace_mode: state not reachable");
  const double r = p.rate, tau = p.tau;
  const double xm = p.x_minus, xp = p.x_plus, xd = p.x_down, xu = p.x_up;
  const double t_plus = tau * std::log((xu - xm) / (xd - xm));
  const cplx rs = r + s;
  const double v_up = (x - xm) / tau, v_dn = (xp - x) / tau;

  auto switching_integral = [&](double w_lo, auto&& factor) {
    if (!(rs.real() > 0.0))
      throw std::domain_error("laplace_mode: transform diverges for Re(s) <= -r");
    return detail::integrate_decaying(
        [&](double w) { return r * std::exp(-rs * w) * factor(w); }, w_lo, rs.real(),
        std::abs(s.imag()) + 1.0, r * 10.0 * std::exp(std::abs(s.real()) * tau * 3.0), 1e-17);
  };
  // Down passage from the switching point x'(w) below x_down up to level y.
  auto down_from_left = [&](double y) {
    return [&, y](double w) {
      const double xs = xm + (xd - xm) * std::exp(-w / tau);
      return std::exp(-s * tau * std::log((xp - xs) / (xp - y)));
    };
  };
  // Transform of the arrival at (x_up, Down).
  auto arrival_up_down = [&]() { return std::exp(-s * t_plus) * switching_integral(0.0, down_from_left(xu)); };

  if (sigma == SwitchState::Up) {
    if (x >= xd && x <= xu) return std::exp(-s * tau * std::log((xu - xm) / (x - xm))) / v_up;
    if (x < xd) {
      const double w = tau * std::log((xd - xm) / (x - xm));
      return std::exp(-s * t_plus - rs * w) / v_up;
    }
    // Above x_up: switched back to Up at x'' > x while overshooting in Down.
    const double w2 = tau * std::log((xp - xu) / (xp - x));
    auto back = [&](double w) {
      const double xs = xp - (xp - xu) * std::exp(-w / tau);
      return std::exp(-s * tau * std::log((xs - xm) / (x - xm)));
    };
    return arrival_up_down() * switching_integral(w2, back) / v_up;
  }
  if (x <= xd) {
    const double w = tau * std::log((xd - xm) / (x - xm));
    return std::exp(-s * t_plus) * switching_integral(w, down_from_left(x)) / v_dn;
  }
  if (x <= xu) return std::exp(-s * t_plus) * switching_integral(0.0, down_from_left(x)) / v_dn;
  const double w2 = tau * std::log((xp - xu) / (xp - x));
  return arrival_up_down() * std::exp(-rs * w2) / v_dn;
}

}  // namespace tcl::cycles
