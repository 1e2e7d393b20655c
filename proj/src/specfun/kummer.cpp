#include <cmath>
#include <quadmath.h>

#include "tcl/specfun.hpp"

namespace tcl::specfun {
namespace {

struct qcplx {
  __float128 re;
  __float128 im;
};

inline qcplx operator+(qcplx x, qcplx y) { return {x.re + y.re, x.im + y.im}; }
inline qcplx operator*(qcplx x, qcplx y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
inline qcplx operator*(qcplx x, __float128 s) { return {x.re * s, x.im * s}; }
inline __float128 qabs(qcplx x) { return sqrtq(x.re * x.re + x.im * x.im); }

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
  static void add(double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  void operator+=(cplx v) {
    add(re, cre, v.real());
    add(im, cim, v.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

bool is_nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

constexpr int kMaxTerms = 20000;

// Terms keep shrinking once k exceeds both |a| and z; stop after two negligible terms.
bool converged(int k, double mag, double sum_mag, cplx a, double b, double z, int& quiet) {
  if (k < std::abs(a) + z + std::abs(b)) return false;
  if (mag <= 1e-18 * sum_mag)
    ++quiet;
  else
    quiet = 0;
  return quiet >= 2;
}

cplx series_double(cplx a, double b, double z, double& rel_err, bool& terminated) {
  terminated = false;
  CompensatedSum sum;
  sum += cplx(1.0, 0.0);
  cplx term(1.0, 0.0);
  double weighted = 1.0;
  int quiet = 0;
  for (int k = 0; k < kMaxTerms; ++k) {
    term *= (a + double(k)) * (z / ((b + k) * (k + 1.0)));
    sum += term;
    const double mag = std::abs(term);
    weighted += mag * (1.0 + std::sqrt(k + 1.0));
    if (mag == 0.0) {
      terminated = true;
      break;
    }
    if (converged(k, mag, std::abs(sum.value()), a, b, z, quiet)) break;
  }
  const cplx s = sum.value();
  const double m = std::abs(s);
  rel_err = m > 0.0 ? 2.0 * 2.2204460492503131e-16 * weighted / m
                    : std::numeric_limits<double>::infinity();
  return s;
}

cplx series_quad(cplx a, double b, double z, double& rel_err) {
  const qcplx qa{static_cast<__float128>(a.real()), static_cast<__float128>(a.imag())};
  const __float128 qb = b, qz = z;
  qcplx sum{1, 0};
  qcplx term{1, 0};
  __float128 weighted = 1;
  int quiet = 0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const qcplx ak{qa.re + k, qa.im};
    term = term * ak * (qz / ((qb + k) * (k + 1)));
    sum = sum + term;
    const __float128 mag = qabs(term);
    weighted += mag * (1 + sqrtq(static_cast<__float128>(k + 1)));
    if (mag == 0) break;
    if (converged(k, static_cast<double>(mag), static_cast<double>(qabs(sum)), a, b, z, quiet))
      break;
  }
  const __float128 m = qabs(sum);
  rel_err = m > 0 ? static_cast<double>(2 * FLT128_EPSILON * weighted / m)
                  : std::numeric_limits<double>::infinity();
  return {static_cast<double>(sum.re), static_cast<double>(sum.im)};
}

}  // namespace

cplx kummer_m(cplx a, double b, double z, const KummerOptions& opt) {
  if (is_nonpositive_integer(b)) throw std::domain_error("kummer_m: b is a non-positive integer");
  if (!(z >= 0.0) || z > opt.z_max) throw std::domain_error("kummer_m: z outside [0, z_max]");
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
    throw std::domain_error("kummer_m: non-finite parameter a");
  if (z == 0.0) return {1.0, 0.0};
  double err = 0.0;
  bool polynomial = false;
  const cplx v = series_double(a, b, z, err, polynomial);
  // A terminating series is a short polynomial; near its zeros only absolute accuracy is meaningful.
  if (err <= opt.rel_tol || polynomial) return v;
  if (opt.allow_extended) {
    const cplx w = series_quad(a, b, z, err);
    if (err <= opt.rel_tol) return w;
  }
  throw PrecisionLoss("kummer_m: estimated relative error " + std::to_string(err) +
                      " exceeds tolerance");
}

cplx kummer_m_prime(cplx a, double b, double z, const KummerOptions& opt) {
  if (a == cplx(0.0, 0.0)) return {0.0, 0.0};
  return (a / b) * kummer_m(a + 1.0, b + 1.0, z, opt);
}

}  // namespace tcl::specfun
