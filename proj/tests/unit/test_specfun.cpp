#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "acceptance/kummer_oracle.hpp"
#include "doctest.h"
#include "tcl/specfun.hpp"

using namespace tcl::specfun;

namespace {

double rel(cplx x, cplx ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

TEST_CASE("kummer_m trivial values") {
  for (cplx a : {cplx(0.3, 1.2), cplx(-4.5, 0.0), cplx(7.0, -3.0)})
    for (double b : {0.5, 1.5, 2.25}) CHECK(kummer_m(a, b, 0.0) == cplx(1.0, 0.0));
  for (double z : {0.0, 0.5, 3.0, 44.0}) {
    const cplx v = kummer_m(-1.0, 0.5, z);
    CHECK(std::abs(v - cplx(1.0 - 2.0 * z, 0.0)) <= 1e-13 * (1.0 + 2.0 * z));
  }
  CHECK_THROWS_AS(kummer_m(1.0, -2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kummer_m(1.0, 0.5, -1.0), std::domain_error);
}

TEST_CASE("kummer_m against the 200-digit oracle") {
  const cplx a(-0.5, 0.3);
  const cplx ref = tcl::oracle::kummer_m_mp(a, 1.5, 45.0);
  CHECK(rel(kummer_m(a, 1.5, 45.0), ref) <= 1e-10);

  double worst = 0.0;
  for (double ar : {-9.5, -6.3, -3.0, -1.2, -0.5, 0.0, 0.7, 2.5, 5.9, 9.0})
    for (double ai : {-4.0, -1.5, 0.0, 0.4, 3.0, 7.0})
      for (double b : {0.5, 1.5})
        for (double z : {0.3, 4.0, 17.0, 45.0, 80.0}) {
          const cplx aa(ar, ai);
          if (std::abs(aa) > 10.0) continue;
          const cplx r = tcl::oracle::kummer_m_mp(aa, b, z);
          worst = std::max(worst, rel(kummer_m(aa, b, z), r));
        }
  CHECK(worst <= 1e-10);
}

TEST_CASE("kummer_m satisfies the Kummer equation") {
  for (cplx a : {cplx(-0.5, 0.3), cplx(-2.2, 1.7), cplx(1.4, -0.6)})
    for (double b : {0.5, 1.5})
      for (double z : {0.7, 9.0, 30.0, 45.0}) {
        const cplx m = kummer_m(a, b, z);
        const cplx m1 = kummer_m_prime(a, b, z);
        const cplx m2 = (a * (a + 1.0) / (b * (b + 1.0))) * kummer_m(a + 2.0, b + 2.0, z);
        const cplx res = z * m2 + (b - z) * m1 - a * m;
        const double sc = std::abs(z * m2) + std::abs((b - z) * m1) + std::abs(a * m);
        CHECK(std::abs(res) <= 1e-8 * sc);
      }
}

TEST_CASE("kummer_m derivative matches central differences") {
  const cplx a(-1.3, 2.0);
  const double z = 12.0, h = 1e-4;
  const cplx fd = (kummer_m(a, 0.5, z + h) - kummer_m(a, 0.5, z - h)) / (2 * h);
  CHECK(rel(kummer_m_prime(a, 0.5, z), fd) < 1e-7);
}

TEST_CASE("Gauss 2F1 Euler form") {
  CHECK(gauss_2f1_neg(2.7, cplx(1.3, -0.4), 0.0) == cplx(1.0, 0.0));
  const double w = 1.0 / 3.0;
  CHECK(rel(gauss_2f1_neg(1.0, cplx(1.0, 0.0), w), cplx(std::log1p(w) / w, 0.0)) < 1e-14);
  // Beyond w = 1 the Pfaff branch is used.
  for (double ww : {0.9, 1.0, 3.0, 25.0})
    CHECK(rel(gauss_2f1_neg(1.0, cplx(1.0, 0.0), ww), cplx(std::log1p(ww) / ww, 0.0)) < 1e-12);

  // Quadrature oracle: c * int_0^1 u^(c-1) (1 + w u)^(-a) du.
  auto quad = [](double a, cplx c, double w) {
    using boost::math::quadrature::gauss_kronrod;
    auto part = [&](bool imag) {
      return gauss_kronrod<double, 61>::integrate(
          [&](double u) {
            const cplx v = c * std::pow(u, c - 1.0) * std::pow(1.0 + w * u, -a);
            return imag ? v.imag() : v.real();
          },
          0.0, 1.0, 15, 1e-14);
    };
    return cplx(part(false), part(true));
  };
  for (double ww : {1.0 / 3.0, 0.8, 2.0}) {
    const cplx c(2.5, -1.0);
    CHECK(rel(gauss_2f1_neg(3.0, c, ww), quad(3.0, c, ww)) < 1e-11);
  }
  CHECK_THROWS_AS(hyp2f1_euler(cplx(1.0, 0.0), cplx(-2.0, 0.0), 0.2), PoleError);
}

TEST_CASE("gaussian integral") {
  CHECK(gaussian_integral(0.4, 0.4, 0.0, 0.2) == 0.0);
  const double full = gaussian_integral(-1.3, 1.3, 0.0, 0.7);
  CHECK(full == doctest::Approx(2.0 * gaussian_integral(0.0, 1.3, 0.0, 0.7)).epsilon(1e-14).scale(0));
  using boost::math::quadrature::gauss_kronrod;
  const double ref = gauss_kronrod<double, 61>::integrate(
      [](double x) { return std::exp(-(x + 2.0) * (x + 2.0) / 0.2); }, -1.0, 1.0, 15, 1e-15);
  CHECK(std::abs(gaussian_integral(-1.0, 1.0, -2.0, 0.2) - ref) <= 1e-12 * ref);
}

TEST_CASE("scaled growing gaussian integral") {
  using boost::math::quadrature::gauss_kronrod;
  for (auto [ya, y] : {std::pair{0.0, 0.3}, {1.0, 4.0}, {3.0, 3.01}, {-0.5, 2.0}, {10.0, 12.5}, {20.0, 20.02}}) {
    const double ref = gauss_kronrod<double, 61>::integrate(
        [y = y](double t) { return std::exp(t * t - y * y); }, ya, y, 20, 1e-15);
    CHECK(std::abs(growing_gaussian_integral_scaled(ya, y) - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("find_roots simple functions") {
  RootSearchRegion reg{-2, 2, -2, 2};
  auto r = find_roots([](cplx z) { return z * z + 1.0; }, reg);
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0].z - cplx(0, -1)) < 1e-10);
  CHECK(std::abs(r[1].z - cplx(0, 1)) < 1e-10);

  RootSearchRegion reg2{-1, 1, -7, 7};
  auto e = find_roots([](cplx z) { return std::exp(z) - 1.0; }, reg2);
  REQUIRE(e.size() == 3);
  CHECK(std::abs(e[0].z - cplx(0, -2 * std::numbers::pi)) < 1e-10);
  CHECK(std::abs(e[1].z) < 1e-10);
  CHECK(std::abs(e[2].z - cplx(0, 2 * std::numbers::pi)) < 1e-10);
  CHECK(winding_number([](cplx z) { return std::exp(z) - 1.0; }, -1, 1, -7, 7) == 3);

  // Same inputs, same output.
  auto e2 = find_roots([](cplx z) { return std::exp(z) - 1.0; }, reg2);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i].z == e2[i].z);
}

TEST_CASE("find_roots with known poles and clusters") {
  // (z - 0.5)(z - 0.51)(z + 1i) / (z - 0.2)^2
  auto f = [](cplx z) { return (z - 0.5) * (z - 0.51) * (z + cplx(0, 1)) / ((z - 0.2) * (z - 0.2)); };
  RootSearchOptions opt;
  opt.poles.push_back({cplx(0.2, 0.0), 2});
  auto r = find_roots(f, {-3, 3, -3, 3}, opt);
  REQUIRE(r.size() == 3);
  CHECK(std::abs(r[0].z - cplx(0, -1)) < 1e-10);
  CHECK(std::abs(r[1].z - 0.5) < 1e-10);
  CHECK(std::abs(r[2].z - 0.51) < 1e-10);
  CHECK_THROWS(find_roots([](cplx z) { return z - 1.0; }, {1.0, 2.0, -1, 1}));
}

TEST_CASE("inverse Laplace transforms") {
  auto f1 = [](cplx s) { return 1.0 / (s + 2.0); };
  CHECK(std::abs(inverse_laplace_talbot(f1, 1.0) - std::exp(-2.0)) < 1e-8);
  CHECK(std::abs(inverse_laplace_bromwich(f1, 1.0) - std::exp(-2.0)) < 1e-7);
  CHECK(std::abs(inverse_laplace_residues({{cplx(-2, 0), cplx(1, 0)}}, 1.0) - std::exp(-2.0)) < 1e-15);
  auto f2 = [](cplx s) { return 1.0 / (s * s); };
  CHECK(std::abs(inverse_laplace_talbot(f2, 3.0) - 3.0) < 1e-8);
  // Complex poles: sin(2t) / 2 = L^-1 1/(s^2 + 4); Talbot does not apply here.
  auto f3 = [](cplx s) { return 1.0 / (s * s + 4.0); };
  InversionOptions o;
  o.abscissa = 0.0;
  CHECK(std::abs(inverse_laplace_bromwich(f3, 2.3, o) - 0.5 * std::sin(4.6)) < 1e-7);
  const std::vector<PoleResidue> pr{{cplx(0, 2), cplx(0, -0.25)}, {cplx(0, -2), cplx(0, 0.25)}};
  CHECK(std::abs(inverse_laplace(f3, 2.3, InversionMethod::residue_sum, o, pr) - 0.5 * std::sin(4.6)) < 1e-14);
  CHECK_THROWS(inverse_laplace(f3, 1.0, InversionMethod::residue_sum));
}
