#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcl/cycles.hpp"

namespace tcl::cycles {
namespace {

// Laplace transform of the summed out-time of n cycles, optionally divided by s.
specfun::ComplexFn phi_power(const TclParams& p, int n, bool cumulative) {
  const auto g = geometry(p);
  return [p, g, n, cumulative](cplx s) {
    const cplx phi = laplace_f(s, g.alpha, p.rate, p.tau) * laplace_f(s, g.beta, p.rate, p.tau);
    const cplx v = std::pow(phi, n);
    return cumulative ? v / s : v;
  };
}

}  // namespace

double p_out_n(double t, int n, const TclParams& p) {
  if (n < 1) throw std::invalid_argument("p_out_n: n >= 1 required (n = 0 is a delta at the origin)");
  if (t <= 0.0) return 0.0;
  return specfun::inverse_laplace_talbot(phi_power(p, n, false), t);
}

double FluxLaw::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += n * p[n];
  return m;
}

double FluxLaw::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) v += (n - m) * (n - m) * p[n];
  return v;
}

FluxLaw cycles_given_time(double t, const TclParams& p, int n_max) {
  if (!(t > 0.0)) throw std::invalid_argument("cycles_given_time: t > 0 required");
  const double t_dc = geometry(p).t_dc;
  FluxLaw law;
  law.t = t;
  law.p.assign(n_max + 1, 0.0);
  double total = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double rest = t - n * t_dc;
    if (rest <= 0.0) break;
    law.p[n] = std::max(0.0, p_out_n(rest, n, p));
    total += law.p[n];
  }
  if (total <= 0.0) {
    // No cycle can have been completed yet.
    law.p[0] = 1.0;
    return law;
  }
  for (auto& v : law.p) v /= total;
  return law;
}

FluxLaw cycle_count_law(double t, const TclParams& p, int n_max) {
  if (!(t > 0.0)) throw std::invalid_argument("cycle_count_law: t > 0 required");
  const double t_dc = geometry(p).t_dc;
  // cdf[n] = P(T_n <= t), T_n the completion time of the n-th cycle.
  std::vector<double> cdf(n_max + 2, 0.0);
  cdf[0] = 1.0;
  for (int n = 1; n <= n_max + 1; ++n) {
    const double rest = t - n * t_dc;
    if (rest <= 0.0) break;
    cdf[n] = std::clamp(specfun::inverse_laplace_talbot(phi_power(p, n, true), rest), 0.0, 1.0);
  }
  FluxLaw law;
  law.t = t;
  law.p.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) law.p[n] = std::max(0.0, cdf[n] - cdf[n + 1]);
  const double total = std::accumulate(law.p.begin(), law.p.end(), 0.0);
  for (auto& v : law.p) v /= total;
  return law;
}

}  // namespace tcl::cycles
