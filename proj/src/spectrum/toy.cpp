#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tcl/spectrum.hpp"

namespace tcl::spectrum {

cplx toy_equation(cplx s, double r, double t_dc) { return (s + r) * (s + r) - r * r * std::exp(-s * t_dc); }

double toy_critical_product() {
  auto g = [](double z) { return z * z - 4.0 * std::exp(-(z + 2.0)); };
  double lo = 0.0, hi = 2.0;
  while (hi - lo > 1e-16 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

cplx toy_asymptotic_root(int n, double r, double t_dc) {
  const double w = (2 * n + 1) * std::numbers::pi;
  return {-(2.0 / t_dc) * std::log(w / (r * t_dc)), w / t_dc};
}

ToySpectrum toy_spectrum(double r, double t_dc, const RootSearchRegion& region, int n_family) {
  if (!(r > 0.0) || !(t_dc > 0.0)) throw std::invalid_argument("toy_spectrum: r > 0 and t_dc > 0 required");
  ToySpectrum out;
  out.r = r;
  out.t_dc = t_dc;
  out.r_cr = toy_critical_product() / t_dc;
  auto f = [&](cplx s) { return toy_equation(s, r, t_dc); };
  for (const auto& root : specfun::find_roots(f, region)) out.roots.push_back(root.z);

  // Sign changes of the (real) equation on the negative real axis, refined by bisection.
  auto fr = [&](double s) { return toy_equation(s, r, t_dc).real(); };
  const int n_scan = 20000;
  const double lo = std::min(region.re_min, 0.0), h = -lo / n_scan;
  for (int k = 0; k < n_scan; ++k) {
    double a = lo + k * h, b = a + h;
    if (b > -0.5 * h) break;  // stay clear of the root at s = 0
    double fa = fr(a), fb = fr(b);
    if (fa == 0.0) {
      out.real_roots.push_back(a);
      continue;
    }
    if (fa * fb > 0.0) continue;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b), fm = fr(m);
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.real_roots.push_back(0.5 * (a + b));
  }

  for (int n = 0; n < n_family; ++n) {
    try {
      const cplx s = specfun::newton_polish(f, toy_asymptotic_root(n, r, t_dc), 1e-13);
      out.n.push_back(n);
      out.family.push_back(s);
    } catch (const std::exception&) {
      // low-n roots may not be reachable from the asymptotic guess
    }
  }
  return out;
}

}  // namespace tcl::spectrum
