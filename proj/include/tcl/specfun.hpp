#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcl::specfun {

using cplx = std::complex<double>;
using ComplexFn = std::function<cplx(cplx)>;

// Raised when an internal error estimate exceeds the requested tolerance.
class PrecisionLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on evaluation at a pole of an analytic continuation.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct KummerOptions {
  double rel_tol = 1e-12;
  double z_max = 200.0;
  bool allow_extended = true;  // retry in 113-bit arithmetic
};

// 1F1(a; b; z) for complex a, real b not a non-positive integer, 0 <= z <= z_max.
cplx kummer_m(cplx a, double b, double z, const KummerOptions& opt = {});

// d/dz 1F1(a; b; z) = (a/b) 1F1(a+1; b+1; z).
cplx kummer_m_prime(cplx a, double b, double z, const KummerOptions& opt = {});

// 2F1(a, c; c+1; x) for real x < 1, via the Euler-type series
//   sum_k (a)_k / k! * c / (c + k) * x^k
// with a Pfaff transformation for x < -1/2.  Throws PoleError when c + k = 0.
cplx hyp2f1_euler(cplx a, cplx c, double x);

// 2F1(a, c; c+1; -w), w >= 0.
inline cplx gauss_2f1_neg(double a, cplx c, double w) { return hyp2f1_euler(cplx(a, 0.0), c, -w); }

// Integral of exp(-(x - center)^2 / width) over [x_a, x_b]; width plays the role of 2*kappa*tau.
double gaussian_integral(double x_a, double x_b, double center, double width);

// exp(-y^2) * integral_{y_a}^{y} exp(t^2) dt, stable for large arguments.
double growing_gaussian_integral_scaled(double y_a, double y);

double dawson(double y);

// ---------- complex root finding ----------

struct RootSearchRegion {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  int scan_nx = 48;
  int scan_ny = 48;
  double polish_tol = 1e-10;
};

struct KnownPole {
  cplx location;
  int order = 1;
};

struct RootSearchOptions {
  std::vector<KnownPole> poles;  // poles of f inside the region, used by the argument principle
  int max_depth = 14;
  double dedup_tol = 1e-7;
  int newton_max_iter = 80;
};

struct Root {
  cplx z;
  double residual;  // |f(z)| relative to the boundary scale of f
  int multiplicity = 1;
};

// All zeros of f inside the rectangle. The count is certified by the argument
// principle; throws std::runtime_error if polishing fails or the count disagrees.
std::vector<Root> find_roots(const ComplexFn& f, const RootSearchRegion& region,
                             const RootSearchOptions& opt = {});

// Net winding number (zeros minus poles) of f around the rectangle.
int winding_number(const ComplexFn& f, double re0, double re1, double im0, double im1);

// Damped Newton with a central-difference derivative. Throws on divergence.
cplx newton_polish(const ComplexFn& f, cplx z0, double tol, int max_iter = 80);

struct IsolineScan {
  int nx = 0;
  int ny = 0;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<cplx> value;  // row-major, index = j * nx + i
};

IsolineScan scan_grid(const ComplexFn& f, const RootSearchRegion& region);

// ---------- numerical Laplace inversion ----------

enum class InversionMethod { talbot, bromwich_sum, residue_sum };

struct PoleResidue {
  cplx pole;
  cplx residue;
};

struct InversionOptions {
  double tol = 1e-10;
  int talbot_start = 16;
  int talbot_max = 96;
  double euler_a = 18.4;  // discretization error ~ exp(-a)
  int euler_terms = 15;
  int euler_binomial = 11;
  double abscissa = 0.0;  // right-most singularity (bromwich_sum)
};

// Weideman-Trefethen optimized cotangent contour; singularities must lie on
// the negative real axis.
double inverse_laplace_talbot(const ComplexFn& F, double t, const InversionOptions& opt = {});

// Fourier-series Bromwich sum with Euler acceleration; works for complex poles
// provided they lie left of the abscissa.
double inverse_laplace_bromwich(const ComplexFn& F, double t, const InversionOptions& opt = {});

double inverse_laplace_residues(const std::vector<PoleResidue>& poles, double t);

double inverse_laplace(const ComplexFn& F, double t, InversionMethod method,
                       const InversionOptions& opt = {},
                       const std::vector<PoleResidue>& poles = {});

}  // namespace tcl::specfun
