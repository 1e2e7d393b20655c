#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "tcl/core.hpp"
#include "tcl/specfun.hpp"

namespace tcl::spectrum {

using specfun::cplx;
using specfun::RootSearchRegion;

enum class Method { hard_det, soft_poles, zero_diff_condition, toy };
const char* to_string(Method m);

struct Eigenvalue {
  cplx lambda;
  double residual = 0.0;
  int index = 0;  // position in the Re-sorted list
  Method method = Method::hard_det;
};

// ---------- hard model, Kummer basis on the deadband ----------

// Values and x-derivatives of (xi_up1, xi_up2, xi_down1, xi_down2) at x, with the
// Gaussian prefactors exp(-x^2/2 kappa tau + x x_-+/kappa tau) as written.
struct BasisPoint {
  std::array<cplx, 4> value;
  std::array<cplx, 4> derivative;
};
BasisPoint hard_basis(cplx lambda, double x, const TclParams& p);

using Matrix4 = Eigen::Matrix<cplx, 4, 4>;

// Rows: xi_up(x_down) = 0, xi_down(x_up) = 0, flux matching at x_up and at x_down.
// Columns use the centred prefactor exp(-(x - x_-+)^2/2 kappa tau) (a constant rescaling of
// the printed basis) and rows are divided by their largest magnitude at lambda = 0, so the
// determinant stays analytic in lambda.
Matrix4 hard_matrix(cplx lambda, const TclParams& p);
cplx hard_det(cplx lambda, const TclParams& p);

struct HardSpectrum {
  std::vector<Eigenvalue> eigenvalues;  // sorted by Re, then Im
  specfun::IsolineScan scan;            // det on the region grid
  double window_scale = 0.0;            // max |det| over the scan
};

HardSpectrum hard_eigenvalues(const TclParams& p, const RootSearchRegion& region);

struct ModePair {
  Eigenvalue eigenvalue;
  Grid1D grid;
  std::vector<cplx> up;    // at cell centers; zero outside the deadband
  std::vector<cplx> down;
  std::array<cplx, 4> c;   // coefficients of the printed basis
  double boundary_residual = 0.0;  // max(|xi_up(x_down)|, |xi_down(x_up)|) / mode scale
};

// Throws std::runtime_error when the null space of M is not one-dimensional.
ModePair hard_eigenmode(const Eigenvalue& eig, const TclParams& p, const Grid1D& grid);

// ---------- diffusionless soft model ----------

enum class IntegralRoute { hypergeometric, quadrature };

// Mode pair normalized by c_{1,-} = 1: the left and middle pieces are continuous at x_down,
// the right piece matches xi_down at x_up; xi_up is continuous at x_up only at eigenvalues.
struct ZeroDiffMode {
  cplx up;
  cplx down;
};
ZeroDiffMode zero_diff_modes(cplx lambda, const TclParams& p, double x,
                             IntegralRoute route = IntegralRoute::hypergeometric);

// (r tau)^2 I_L I_R / ((x_down - x_-)(x_+ - x_up))^{r tau} - 1, zero at every eigenvalue.
cplx zero_diff_condition(cplx lambda, const TclParams& p,
                         IntegralRoute route = IntegralRoute::hypergeometric);

// Roots of 1 - G_s with lambda = -s, inside a lambda-plane region.  lambda = r (the
// Poisson-clock edge) is a pole of G_{-lambda}, not a root, and is not listed.
std::vector<Eigenvalue> soft_poles(const TclParams& p, const RootSearchRegion& region);
// Roots of zero_diff_condition inside the same kind of region.
std::vector<Eigenvalue> zero_diff_roots(const TclParams& p, const RootSearchRegion& region);

// ---------- instantaneous-escape toy model ----------

// (s + r)^2 - r^2 exp(-s t_dc)
cplx toy_equation(cplx s, double r, double t_dc);
// z = r_cr t_dc solves z^2 = 4 exp(-(z + 2)).
double toy_critical_product();
// Large-n asymptotic root in the upper half plane.
cplx toy_asymptotic_root(int n, double r, double t_dc);

struct ToySpectrum {
  double r = 0.0;
  double t_dc = 0.0;
  double r_cr = 0.0;
  std::vector<cplx> roots;         // roots in the region (s-plane)
  std::vector<double> real_roots;  // real nonzero roots in [re_min, 0)
  std::vector<int> n;              // indices of the asymptotic family, n >= 0
  std::vector<cplx> family;        // numeric roots s_n (Im > 0) polished from the asymptotics
};

ToySpectrum toy_spectrum(double r, double t_dc, const RootSearchRegion& region, int n_family = 40);

}  // namespace tcl::spectrum
