#include <cmath>

#include "doctest.h"
#include "tcl/fp.hpp"
#include "tcl/steady.hpp"

using namespace tcl;
using namespace tcl::steady;

namespace {

double derivative(auto&& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("closed-form hard stationary density") {
  const auto p = canonical_params();
  const auto hs = hard_stationary_density(p);
  auto up = [&](double x) { return hs.up(x); };
  auto down = [&](double x) { return hs.down(x); };

  SUBCASE("normalization against the discrete sum on a fine grid") {
    const auto st = stationary_hard(p, Grid1D::aligned(p, 400));
    // field is renormalized; the raw cell averages must already sum to one
    double raw = 0.0;
    const auto& g = st.field.grid;
    for (int i = 0; i < g.n_cells; ++i) raw += g.dx() * (hs.up(g.center(i)) + hs.down(g.center(i)));
    CHECK(raw == doctest::Approx(1.0).epsilon(1e-5).scale(0));
    CHECK(st.field.mass() == doctest::Approx(1.0).epsilon(1e-12).scale(0));
    CHECK(st.field.up_mass() == doctest::Approx(0.5).epsilon(1e-10).scale(0));
  }
  SUBCASE("mirror symmetry") {
    for (double x : {-2.7, -1.0, -0.3, 0.0, 0.8, 1.0, 1.9, 3.1})
      CHECK(std::abs(hs.up(x) - hs.down(-x)) <= 1e-13 * hs.up(x));
  }
  SUBCASE("flux equation") {
    const double h = 1e-3;
    for (double x : {-0.9, -0.5, 0.0, 0.4, 0.95}) {
      const double ju = -p.kappa * derivative(up, x, h) - (x - p.x_minus) / p.tau * hs.up(x);
      const double jd = -p.kappa * derivative(down, x, h) - (x - p.x_plus) / p.tau * hs.down(x);
      CHECK(ju == doctest::Approx(-hs.J).epsilon(1e-8).scale(0));
      CHECK(jd == doctest::Approx(hs.J).epsilon(1e-8).scale(0));
    }
    for (double x : {1.2, 2.0, 2.6}) {
      const double ju = -p.kappa * derivative(up, x, h) - (x - p.x_minus) / p.tau * hs.up(x);
      CHECK(std::abs(ju) <= 1e-9 * hs.J);
    }
    CHECK(hs.up(-1.0) == 0.0);
    CHECK(hs.up(-1.5) == 0.0);
  }
}

TEST_CASE("diffusionless stationary density") {
  auto p = canonical_params();
  p.kappa = 0.0;
  const Grid1D g(-3.0, 3.0, 600);
  const auto st = stationary_diffusionless_hard(p, g);
  CHECK(st.field.mass() == doctest::Approx(1.0).epsilon(1e-12).scale(0));
  CHECK(st.field.up_mass() == doctest::Approx(0.5).epsilon(1e-12).scale(0));
  CHECK(st.J == doctest::Approx(1.0 / (2.0 * std::log(3.0))).epsilon(1e-14).scale(0));
  // cell average next to x_down equals the exact log integral of tau/(t_dc (x - x_-))
  const int i = g.cell_of(-0.995);
  const double exact = std::log(1.01 / 1.0) / (2.0 * std::log(3.0)) / g.dx();
  CHECK(st.field.up[i] == doctest::Approx(exact).epsilon(1e-12).scale(0));
}

TEST_CASE("small diffusion approaches the diffusionless density") {
  auto p0 = canonical_params();
  p0.kappa = 0.0;
  const Grid1D g(-4.5, 4.5, 1800);
  const auto limit = stationary_diffusionless_hard(p0, g);
  double prev = 1e9;
  for (double kappa : {0.1, 0.03, 0.01, 0.003}) {
    auto p = canonical_params();
    p.kappa = kappa;
    const double d = l1_distance(stationary_hard(p, g).field, limit.field);
    MESSAGE("kappa " << kappa << " L1 to the diffusionless density " << d);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("closed form agrees with the Fokker-Planck null vector") {
  const auto p = canonical_params();
  const auto g = Grid1D::aligned(p, 1000);
  const auto op = fp::build_hard_operator(p, g);
  const auto num = fp::solve_stationary(op);
  const auto exact = stationary_hard(p, g);
  CHECK(g.n_cells >= 4000);
  CHECK(l1_distance(num, exact.field) <= 5e-3);
  CHECK(op.flux_up(op.pack(num)) == doctest::Approx(exact.J).epsilon(0.01).scale(0));
}
