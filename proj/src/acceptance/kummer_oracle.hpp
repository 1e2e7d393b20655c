#pragma once

// 1F1 by direct power-series summation in 200-digit floating point.  Slow, but
// independent of the production evaluator (no compensated sums, no fallbacks).

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <complex>

namespace tcl::oracle {

using mp = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

inline std::complex<double> kummer_m_mp(std::complex<double> a, double b, double z) {
  const mp ar = a.real(), ai = a.imag(), mb = b, mz = z;
  mp sr = 1, si = 0;
  mp tr = 1, ti = 0;
  const mp tiny = mp("1e-60");
  for (int k = 0; k < 4000; ++k) {
    // term *= (a + k) z / ((b + k)(k + 1))
    const mp fr = ar + k, fi = ai;
    const mp scale = mz / ((mb + k) * (k + 1));
    const mp nr = (tr * fr - ti * fi) * scale;
    const mp ni = (tr * fi + ti * fr) * scale;
    tr = nr;
    ti = ni;
    sr += tr;
    si += ti;
    const mp mag = abs(tr) + abs(ti);
    if (mag == 0) break;
    if (k > z + std::abs(a) + 10 && mag < tiny * (abs(sr) + abs(si))) break;
  }
  return {static_cast<double>(sr), static_cast<double>(si)};
}

}  // namespace tcl::oracle
