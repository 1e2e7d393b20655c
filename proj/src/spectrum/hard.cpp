#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tcl/spectrum.hpp"

namespace tcl::spectrum {
namespace {

struct Basis2 {
  cplx v1, d1, v2, d2;
};

// Two homogeneous solutions for one state relaxing toward c.
Basis2 state_basis(cplx lambda, double x, double c, const TclParams& p, bool centred) {
  const double kt = p.kappa * p.tau;
  const double y = x - c, z = y * y / (2.0 * kt), dz = y / kt;
  const cplx a = -lambda * p.tau / 2.0;
  const cplx m1 = specfun::kummer_m(a, 0.5, z), dm1 = specfun::kummer_m_prime(a, 0.5, z) * dz;
  const cplx m2 = specfun::kummer_m(a + 0.5, 1.5, z), dm2 = specfun::kummer_m_prime(a + 0.5, 1.5, z) * dz;
  const double pre = centred ? std::exp(-z) : std::exp(-x * x / (2.0 * kt) + x * c / kt);
  const cplx f1 = m1, f1p = dm1;
  const cplx f2 = y * m2, f2p = m2 + y * dm2;
  return {pre * f1, pre * (f1p - dz * f1), pre * f2, pre * (f2p - dz * f2)};
}

void require_hard_diffusive(const TclParams& p) {
  p.validate();
  if (!(p.kappa > 0.0)) throw std::invalid_argument("hard spectrum: kappa > 0 required");
}

Matrix4 raw_matrix(cplx lambda, const TclParams& p) {
  const double k = p.kappa, tau = p.tau;
  const auto ud = state_basis(lambda, p.x_down, p.x_minus, p, true);
  const auto uu = state_basis(lambda, p.x_up, p.x_minus, p, true);
  const auto dd = state_basis(lambda, p.x_down, p.x_plus, p, true);
  const auto du = state_basis(lambda, p.x_up, p.x_plus, p, true);
  const double gu = (p.x_up - p.x_minus) / tau, gd = (p.x_down - p.x_plus) / tau;
  Matrix4 m;
  m << ud.v1, ud.v2, 0.0, 0.0,
       0.0, 0.0, du.v1, du.v2,
       k * uu.d1 + gu * uu.v1, k * uu.d2 + gu * uu.v2, k * du.d1, k * du.d2,
       k * ud.d1, k * ud.d2, k * dd.d1 + gd * dd.v1, k * dd.d2 + gd * dd.v2;
  return m;
}

Eigen::Vector4d row_scales(const TclParams& p) {
  const Matrix4 m0 = raw_matrix(0.0, p);
  Eigen::Vector4d s;
  for (int i = 0; i < 4; ++i) s[i] = m0.row(i).cwiseAbs().maxCoeff();
  return s;
}

Matrix4 scaled(const Matrix4& m, const Eigen::Vector4d& s) {
  Matrix4 out = m;
  for (int i = 0; i < 4; ++i) out.row(i) /= s[i];
  return out;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::hard_det: return "hard_det";
    case Method::soft_poles: return "soft_poles";
    case Method::zero_diff_condition: return "zero_diff_condition";
    case Method::toy: return "toy";
  }
  return "?";
}

BasisPoint hard_basis(cplx lambda, double x, const TclParams& p) {
  require_hard_diffusive(p);
  if (x < p.x_down || x > p.x_up) throw std::domain_error("hard_basis: x outside [x_down, x_up]");
  const auto u = state_basis(lambda, x, p.x_minus, p, false);
  const auto d = state_basis(lambda, x, p.x_plus, p, false);
  return {{u.v1, u.v2, d.v1, d.v2}, {u.d1, u.d2, d.d1, d.d2}};
}

Matrix4 hard_matrix(cplx lambda, const TclParams& p) {
  require_hard_diffusive(p);
  return scaled(raw_matrix(lambda, p), row_scales(p));
}

cplx hard_det(cplx lambda, const TclParams& p) { return hard_matrix(lambda, p).determinant(); }

HardSpectrum hard_eigenvalues(const TclParams& p, const RootSearchRegion& region) {
  require_hard_diffusive(p);
  const auto s = row_scales(p);
  auto det = [&](cplx l) { return scaled(raw_matrix(l, p), s).determinant(); };
  HardSpectrum out;
  RootSearchRegion scan_region = region;
  if (scan_region.scan_nx <= 0) scan_region.scan_nx = 48;
  if (scan_region.scan_ny <= 0) scan_region.scan_ny = 48;
  out.scan = specfun::scan_grid(det, scan_region);
  for (const auto& v : out.scan.value) out.window_scale = std::max(out.window_scale, std::abs(v));
  for (const auto& r : specfun::find_roots(det, region))
    out.eigenvalues.push_back({r.z, r.residual, 0, Method::hard_det});
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (std::abs(a.lambda.real() - b.lambda.real()) > 1e-9) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) out.eigenvalues[i].index = static_cast<int>(i);
  return out;
}

ModePair hard_eigenmode(const Eigenvalue& eig, const TclParams& p, const Grid1D& grid) {
  require_hard_diffusive(p);
  const cplx l = eig.lambda;
  const Matrix4 m = hard_matrix(l, p);
  Eigen::JacobiSVD<Matrix4> svd(m, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (sv[2] < 1e-6 * sv[0]) throw std::runtime_error("hard_eigenmode: null space is not one-dimensional");
  Eigen::Matrix<cplx, 4, 1> c = svd.matrixV().col(3);

  ModePair mode;
  mode.eigenvalue = eig;
  mode.grid = grid;
  mode.up.assign(grid.n_cells, 0.0);
  mode.down.assign(grid.n_cells, 0.0);
  double scale = 0.0;
  cplx pivot = 0.0;
  for (int i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    if (x < p.x_down || x > p.x_up) continue;
    const auto u = state_basis(l, x, p.x_minus, p, true);
    const auto d = state_basis(l, x, p.x_plus, p, true);
    mode.up[i] = c[0] * u.v1 + c[1] * u.v2;
    mode.down[i] = c[2] * d.v1 + c[3] * d.v2;
    for (cplx v : {mode.up[i], mode.down[i]})
      if (std::abs(v) > scale) {
        scale = std::abs(v);
        pivot = v;
      }
  }
  if (!(scale > 0.0)) throw std::runtime_error("hard_eigenmode: no grid cells inside the deadband");
  const cplx norm = std::abs(pivot) / pivot / scale;  // largest value becomes +1
  for (auto& v : mode.up) v *= norm;
  for (auto& v : mode.down) v *= norm;
  c *= norm;

  const auto ub = state_basis(l, p.x_down, p.x_minus, p, true);
  const auto db = state_basis(l, p.x_up, p.x_plus, p, true);
  mode.boundary_residual = std::max(std::abs(c[0] * ub.v1 + c[1] * ub.v2), std::abs(c[2] * db.v1 + c[3] * db.v2));
  const double kt2 = 2.0 * p.kappa * p.tau;
  const double fu = std::exp(p.x_minus * p.x_minus / kt2), fd = std::exp(p.x_plus * p.x_plus / kt2);
  mode.c = {c[0] / fu, c[1] / fu, c[2] / fd, c[3] / fd};
  return mode;
}

}  // namespace tcl::spectrum
