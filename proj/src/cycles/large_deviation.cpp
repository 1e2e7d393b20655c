#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "tcl/cycles.hpp"

namespace tcl::cycles {

LdPoint ld_function(double omega, const CycleTransform& ct) {
  const double omega_max = ct.t_min > 0.0 ? 1.0 / ct.t_min : std::numeric_limits<double>::infinity();
  if (!(omega > 0.0) || !(omega < omega_max)) {
    std::ostringstream msg;
    msg << "ld_function: omega = " << omega << " outside the admissible range (0, " << omega_max << ")";
    throw std::domain_error(msg.str());
  }
  // h(s) = 1 + omega (ln G)'(s) increases from -inf at s_min to 1 - omega t_min.
  auto h = [&](double s) { return 1.0 + omega * ct.dlog_g(s); };
  const double scale = std::max(1.0, std::abs(ct.s_min));
  const double lo = ct.s_min + 1e-12 * scale;
  if (!(h(lo) < 0.0)) throw std::domain_error("ld_function: saddle point lies at the edge of the convergence half-line");
  double hi = std::max(lo + 1.0, 1.0);
  int guard = 0;
  while (!(h(hi) > 0.0)) {
    hi = 2.0 * hi + 1.0;
    if (++guard > 200) throw std::runtime_error("ld_function: could not bracket the saddle from above");
  }
  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(50);
  const auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, tol, iters);
  const double s_star = 0.5 * (a + b);
  if (iters >= 200) throw std::runtime_error("ld_function: saddle solve did not converge");
  return {omega, -s_star - omega * ct.log_g(s_star), s_star};
}

LdPoint ld_function(double omega, const TclParams& p) { return ld_function(omega, soft_cycle_transform(p)); }

}  // namespace tcl::cycles
