#include <cmath>

#include "tcl/specfun.hpp"

namespace tcl::specfun {
namespace {

// sum_k (a)_k / k! * c / (c + k) * x^k for |x| < 1.
cplx euler_series(cplx a, cplx c, double x) {
  cplx poch(1.0, 0.0);  // (a)_k / k! * x^k
  cplx sum(0.0, 0.0);
  int quiet = 0;
  const double k_min = std::abs(a) + 2.0;
  for (int k = 0; k < 200000; ++k) {
    const cplx denom = c + double(k);
    if (k > 0 && std::abs(denom) < 1e-14 * (1.0 + std::abs(c)))
      throw PoleError("hyp2f1_euler: evaluation at a pole c + k = 0");
    const cplx term = k == 0 ? poch : poch * (c / denom);
    sum += term;
    if (k > k_min && std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++quiet >= 3) return sum;
    } else {
      quiet = 0;
    }
    poch *= (a + double(k)) * (x / (k + 1.0));
    if (poch == cplx(0.0, 0.0)) {
      // Terminating series.
      return sum;
    }
  }
  throw PrecisionLoss("hyp2f1_euler: series did not converge");
}

}  // namespace

cplx hyp2f1_euler(cplx a, cplx c, double x) {
  if (!(x < 1.0)) throw std::domain_error("hyp2f1_euler: requires x < 1");
  if (x == 0.0) return {1.0, 0.0};
  if (x >= -0.5) {
    if (x > 0.999) throw PrecisionLoss("hyp2f1_euler: x too close to 1 for the series");
    return euler_series(a, c, x);
  }
  // Pfaff: 2F1(a, c; c+1; x) = (1-x)^(-c) 2F1(c+1-a, c; c+1; x/(x-1)).
  const double y = x / (x - 1.0);
  if (y > 0.999) throw PrecisionLoss("hyp2f1_euler: transformed argument too close to 1");
  return std::exp(-c * std::log1p(-x)) * euler_series(c + 1.0 - a, c, y);
}

}  // namespace tcl::specfun
