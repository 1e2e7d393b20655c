#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tcl/cycles.hpp"
#include "tcl/spectrum.hpp"
#include "tcl/steady.hpp"

using namespace tcl;
using namespace tcl::spectrum;

namespace {

double collinearity(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx dot = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += std::conj(a[i]) * b[i];
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  return std::abs(dot) / std::sqrt(na * nb);
}

const RootSearchRegion fig_window{-0.1, 8.0, -8.0, 8.0, 40, 40, 1e-10};

}  // namespace

TEST_CASE("Kummer basis of the hard model") {
  const auto p = canonical_params();
  const double kt = p.kappa * p.tau;
  SUBCASE("lambda = 0 reduces to the Gaussian prefactor") {
    for (double x : {-1.0, 0.0, 0.7}) {
      const auto b = hard_basis(0.0, x, p);
      const double g = std::exp(-x * x / (2 * kt) + x * p.x_minus / kt);
      CHECK(std::abs(b.value[0] - g) <= 1e-13 * g);
    }
  }
  SUBCASE("each basis function solves the interior eigenproblem") {
    const double h = 1e-3;
    for (cplx l : {cplx(0.3, 3.0), cplx(1.2, -6.0), cplx(2.0, 0.0)})
      for (double x : {-0.8, 0.0, 0.6})
        for (int k = 0; k < 4; ++k) {
          const double c = k < 2 ? p.x_minus : p.x_plus;
          // kappa xi'' + ((x - c) xi / tau)' = d/dx of the flux kappa xi' + (x - c) xi / tau
          auto flux = [&](double y) {
            const auto b = hard_basis(l, y, p);
            return p.kappa * b.derivative[k] + (y - c) / p.tau * b.value[k];
          };
          const cplx lhs = (flux(x - 2 * h) - 8.0 * flux(x - h) + 8.0 * flux(x + h) - flux(x + 2 * h)) / (12 * h);
          const cplx xi = hard_basis(l, x, p).value[k];
          CHECK(std::abs(lhs + l * xi) <= 1e-6 * (std::abs(lhs) + std::abs(l * xi)));
        }
  }
  SUBCASE("Wronskian follows Abel's law and never vanishes") {
    // W' = -((x - c)/kappa tau) W.  Referenced to the threshold nearest the target, where the
    // two solutions are best separated; elsewhere the comparison allows for rounding of the
    // two products that make up W.
    for (cplx l : {cplx(0.0, 0.0), cplx(0.3, 3.0), cplx(4.0, -7.0), cplx(7.5, 7.5)})
      for (int s : {0, 2}) {
        const double c = s == 0 ? p.x_minus : p.x_plus;
        auto wronskian = [&](double x, double& terms) {
          const auto b = hard_basis(l, x, p);
          const cplx a1 = b.value[s] * b.derivative[s + 1], a2 = b.derivative[s] * b.value[s + 1];
          terms = std::abs(a1) + std::abs(a2);
          return a1 - a2;
        };
        const double x0 = s == 0 ? p.x_down : p.x_up;
        double t0 = 0.0;
        const cplx w0 = wronskian(x0, t0);
        CHECK(std::abs(w0) > 1e-6 * t0);
        for (double x = -1.0; x <= 1.0; x += 0.25) {
          double terms = 0.0;
          const cplx w = wronskian(x, terms);
          const cplx abel = w0 * std::exp(-((x - c) * (x - c) - (x0 - c) * (x0 - c)) / (2 * kt));
          CHECK(std::abs(w - abel) <= 1e-6 * std::abs(abel) + 1e-12 * terms);
        }
      }
  }
  SUBCASE("derivatives match finite differences") {
    const double h = 1e-5;
    const cplx l(0.7, 2.5);
    const auto b = hard_basis(l, 0.2, p), bp = hard_basis(l, 0.2 + h, p), bm = hard_basis(l, 0.2 - h, p);
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs((bp.value[k] - bm.value[k]) / (2 * h) - b.derivative[k]) <= 1e-7 * std::abs(b.derivative[k]));
  }
}

TEST_CASE("hard determinant") {
  const auto p = canonical_params();
  const cplx l(0.4, 2.2);
  CHECK((hard_matrix(std::conj(l), p) - hard_matrix(l, p).conjugate()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(std::abs(hard_det(std::conj(l), p) - std::conj(hard_det(l, p))) <= 1e-14);

  SUBCASE("stationary coefficients annihilate the first row") {
    // Least-squares expansion of the closed-form stationary Up density in the lambda = 0 basis.
    const auto hs = steady::hard_stationary_density(p);
    Eigen::MatrixXd a(21, 2);
    Eigen::VectorXd y(21);
    for (int i = 0; i <= 20; ++i) {
      const double x = -1.0 + 0.1 * i;
      const auto b = hard_basis(0.0, x, p);
      a(i, 0) = b.value[0].real();
      a(i, 1) = b.value[1].real();
      y[i] = hs.up(x);
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
    CHECK((a * c - y).norm() <= 1e-10 * y.norm());
    const auto b = hard_basis(0.0, p.x_down, p);
    const double row = (b.value[0] * c[0] + b.value[1] * c[1]).real();
    CHECK(std::abs(row) <= 1e-8 * (std::abs(b.value[0].real() * c[0]) + std::abs(b.value[1].real() * c[1])));
  }

  SUBCASE("spectrum in the figure window") {
    const auto hs = hard_eigenvalues(p, fig_window);
    CHECK(std::abs(hard_det(0.0, p)) <= 1e-8 * hs.window_scale);
    CHECK(std::abs(hard_det(2.0 / p.tau, p)) > 1e-3 * hs.window_scale);
    REQUIRE(hs.eigenvalues.size() >= 4);
    CHECK(std::abs(hs.eigenvalues[0].lambda) < 1e-8);
    for (const auto& e : hs.eigenvalues) {
      CHECK(e.lambda.real() >= -1e-8);
      bool paired = false;
      for (const auto& f : hs.eigenvalues) paired |= std::abs(f.lambda - std::conj(e.lambda)) < 1e-7;
      CHECK(paired);
    }
    const cplx l1 = hs.eigenvalues[1].lambda;
    CHECK(l1.real() > 0.0);
    CHECK(std::abs(l1.imag()) > 0.1);
    MESSAGE("slowest hard eigenvalue " << l1);
  }
}

TEST_CASE("hard eigenmodes") {
  const auto p = canonical_params();
  const Grid1D g(p.x_down, p.x_up, 200);
  SUBCASE("lambda = 0 mode is the stationary density") {
    const auto mode = hard_eigenmode({0.0, 0.0, 0, Method::hard_det}, p, g);
    const auto hs = steady::hard_stationary_density(p);
    std::vector<cplx> up, down, exact;
    std::vector<cplx> a, b;
    for (int i = 0; i < g.n_cells; ++i) {
      a.push_back(mode.up[i]);
      a.push_back(mode.down[i]);
      b.push_back(hs.up(g.center(i)));
      b.push_back(hs.down(g.center(i)));
    }
    CHECK(collinearity(a, b) >= 1.0 - 1e-6);
    CHECK(mode.boundary_residual <= 1e-8);
  }
  SUBCASE("slowest oscillating mode") {
    const auto hs = hard_eigenvalues(p, fig_window);
    const auto mode = hard_eigenmode(hs.eigenvalues[1], p, g);
    CHECK(mode.boundary_residual <= 1e-8);
    // The mode rebuilt from the printed basis and its coefficients solves the interior equation.
    const cplx l = hs.eigenvalues[1].lambda;
    const double h = 1e-3;
    for (double x : {-0.5, 0.1, 0.6}) {
      auto flux = [&](double y) {
        const auto b = hard_basis(l, y, p);
        const cplx xi = mode.c[0] * b.value[0] + mode.c[1] * b.value[1];
        const cplx dxi = mode.c[0] * b.derivative[0] + mode.c[1] * b.derivative[1];
        return p.kappa * dxi + (y - p.x_minus) / p.tau * xi;
      };
      const cplx lhs = (flux(x - 2 * h) - 8.0 * flux(x - h) + 8.0 * flux(x + h) - flux(x + 2 * h)) / (12 * h);
      const auto b = hard_basis(l, x, p);
      const cplx xi = mode.c[0] * b.value[0] + mode.c[1] * b.value[1];
      CHECK(std::abs(lhs + l * xi) <= 1e-6 * (std::abs(lhs) + std::abs(l * xi)));
      CHECK(std::abs(xi - mode.up[g.cell_of(x)]) < 0.05);
    }
  }
}

TEST_CASE("zero-diffusivity spectrum") {
  const auto p = canonical_soft(1.0, 0.0);
  CHECK(std::abs(zero_diff_condition(0.0, p)) <= 1e-10);
  CHECK_THROWS_AS(zero_diff_condition(cplx(p.rate, 0.0), p), specfun::PoleError);

  SUBCASE("both routes for the integrals agree") {
    for (cplx l : {cplx(0.0, 0.0), cplx(0.3, 0.5), cplx(0.52, -1.5)}) {
      const cplx a = zero_diff_condition(l, p, IntegralRoute::hypergeometric);
      const cplx b = zero_diff_condition(l, p, IntegralRoute::quadrature);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
      for (double x : {-1.7, -1.0, 0.2, 1.5}) {
        const auto ma = zero_diff_modes(l, p, x, IntegralRoute::hypergeometric);
        const auto mb = zero_diff_modes(l, p, x, IntegralRoute::quadrature);
        CHECK(std::abs(ma.up - mb.up) <= 1e-9 * std::abs(ma.up));
        CHECK(std::abs(ma.down - mb.down) <= 1e-9 * std::abs(ma.down));
      }
    }
  }
  SUBCASE("middle-interval shapes at lambda = 0") {
    const auto a = zero_diff_modes(0.0, p, -0.5, IntegralRoute::hypergeometric);
    const auto b = zero_diff_modes(0.0, p, 0.5, IntegralRoute::hypergeometric);
    CHECK(std::abs(a.up * 1.5 - b.up * 2.5) <= 1e-13 * std::abs(a.up));
    CHECK(std::abs(a.down * 2.5 - b.down * 1.5) <= 1e-13 * std::abs(a.down));
    // Equal on/off occupation for the symmetric geometry: the mode is the stationary state.
    CHECK(std::abs(a.up - b.down) <= 1e-12 * std::abs(a.up));
  }

  const RootSearchRegion window{-0.1, 3.3, -8.1, 8.1, 0, 0, 1e-12};
  const auto poles = soft_poles(p, window);
  const auto roots = zero_diff_roots(p, window);
  REQUIRE(poles.size() == roots.size());
  for (std::size_t i = 0; i < poles.size(); ++i) {
    CHECK(std::abs(poles[i].lambda - roots[i].lambda) <= 1e-6);
    CHECK(poles[i].lambda.real() >= -1e-8);
  }

  SUBCASE("modes solve the first-order system") {
    const cplx l = poles[1].lambda;
    const double h = 1e-4, r = p.rate;
    for (double x : {-1.6, -1.2, -0.3, 0.4, 1.3, 1.8}) {
      auto m = [&](double y) { return zero_diff_modes(l, p, y); };
      auto d = [&](auto&& f) { return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12 * h); };
      const cplx du = d([&](double y) { return (y - p.x_minus) / p.tau * m(y).up; });
      const cplx dd = d([&](double y) { return (y - p.x_plus) / p.tau * m(y).down; });
      const double ru = x < p.x_down ? r : 0.0, rd = x > p.x_up ? r : 0.0;
      const auto v = m(x);
      const cplx e1 = l * v.up + du - ru * v.up + rd * v.down;
      const cplx e2 = l * v.down + dd - rd * v.down + ru * v.up;
      const double scale = std::abs(l * v.up) + std::abs(du) + std::abs(l * v.down) + std::abs(dd);
      CHECK(std::abs(e1) <= 1e-7 * scale);
      CHECK(std::abs(e2) <= 1e-7 * scale);
    }
  }
  SUBCASE("eigenmodes coincide with the Laplace-domain arrival densities") {
    for (int k : {0, 1, 2}) {  // Re lambda < r, where the arrival transform converges
      const cplx l = poles[k].lambda;
      std::vector<cplx> a, b;
      for (double x = -1.9; x < 1.95; x += 0.1) {
        const auto m = zero_diff_modes(l, p, x);
        a.push_back(m.up);
        a.push_back(m.down);
        b.push_back(cycles::laplace_mode(-l, x, SwitchState::Up, p));
        b.push_back(cycles::laplace_mode(-l, x, SwitchState::Down, p));
      }
      CHECK(collinearity(a, b) >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("soft pole catalogue") {
  const RootSearchRegion window{-0.1, 3.3, -8.1, 8.1, 0, 0, 1e-12};
  SUBCASE("large r oscillates") {
    const auto poles = soft_poles(canonical_soft(4.0, 0.0), window);
    REQUIRE(poles.size() >= 3);
    CHECK(std::abs(poles[1].lambda.imag()) > 1.0);
  }
  SUBCASE("small r: the lambda = r edge lies below every complex root") {
    const auto p = canonical_soft(0.5, 0.0);
    const auto poles = soft_poles(p, window);
    REQUIRE(poles.size() >= 2);
    CHECK(poles[1].lambda.real() > p.rate);
  }
}

TEST_CASE("instantaneous-escape toy model") {
  const double t_dc = std::log(9.0);
  CHECK(std::abs(toy_equation(0.0, 0.3, t_dc)) == 0.0);
  const double z = toy_critical_product();
  CHECK(std::abs(z * z - 4.0 * std::exp(-(z + 2.0))) <= 1e-12);
  CHECK(std::abs(z - 0.5569) <= 1e-4);
  CHECK(z / t_dc < 1.0 / t_dc);

  const RootSearchRegion window{-10.0 / t_dc, 0.5, -20.0, 20.0, 0, 0, 1e-12};
  // Real nonzero roots lie on the branch s + r = -r e^{-s t_dc/2}, which has two roots below
  // r_cr and none above.
  const auto above = toy_spectrum(2.0, t_dc, window);
  CHECK(above.real_roots.empty());
  const auto below = toy_spectrum(0.1, t_dc, window);
  REQUIRE(below.real_roots.size() == 2);
  for (double s : below.real_roots) {
    CHECK(std::abs(s + 0.1 + 0.1 * std::exp(-s * t_dc / 2.0)) <= 1e-12);
  }
  bool has_zero = false;
  for (cplx s : above.roots) has_zero |= std::abs(s) < 1e-9;
  CHECK(has_zero);

  for (std::size_t i = 0; i < above.family.size(); ++i) {
    if (above.n[i] < 10) continue;
    const cplx a = toy_asymptotic_root(above.n[i], 2.0, t_dc), s = above.family[i];
    CHECK(std::abs(s.real() - a.real()) <= 0.05 * std::abs(a.real()));
    CHECK(std::abs(s.imag() - a.imag()) <= 0.05 * std::abs(a.imag()));
  }
}
