#include <Eigen/SparseLU>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tcl/fp.hpp"

using namespace tcl;
using namespace tcl::fp;

namespace {

double column_sum_defect(const FpOperator& op) {
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < op.A.outerSize(); ++k) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(op.A, k); it; ++it) {
      s += it.value();
      scale = std::max(scale, std::abs(it.value()));
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("single-state null vector is the discrete Gaussian") {
  auto p = canonical_soft(1e-300, 0.1);
  const Grid1D g(-5.0, 5.0, 2000);
  const auto op = build_soft_operator(p, g);
  const int n = g.n_cells;
  SparseMatrix a = op.A.topLeftCorner(n, n);
  // Replace the last row by a normalization and solve for the Up null vector.
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      if (it.row() != n - 1) trip.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < n; ++c) trip.emplace_back(n - 1, c, 1.0);
  SparseMatrix b(n, n);
  b.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix> lu(b);
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  const Vector v = lu.solve(rhs);

  Vector gauss(n);
  for (int i = 0; i < n; ++i) gauss[i] = std::exp(-std::pow(g.center(i) - p.x_minus, 2) / (2 * p.kappa * p.tau));
  gauss /= gauss.sum();
  CHECK((v - gauss).cwiseAbs().maxCoeff() / gauss.maxCoeff() <= 1e-8);
}

TEST_CASE("generator columns sum to zero") {
  const auto soft = canonical_soft(1.0, 0.01);
  CHECK(column_sum_defect(build_soft_operator(soft, Grid1D::aligned(soft, 200))) <= 1e-12);
  const auto still = canonical_soft(2.0, 0.0);
  CHECK(column_sum_defect(build_soft_operator(still, Grid1D(-2, 2, 400))) <= 1e-12);
  const auto hard = canonical_params();
  CHECK(column_sum_defect(build_hard_operator(hard, Grid1D::aligned(hard, 100))) <= 1e-12);
}

TEST_CASE("resolution rule") {
  const auto p = canonical_soft(1.0, 0.01);
  CHECK_THROWS_AS(build_soft_operator(p, Grid1D::aligned(p, 20)), std::invalid_argument);
  CHECK_NOTHROW(build_soft_operator(p, Grid1D::aligned(p, 100)));
}

TEST_CASE("diffusionless upwind evolution conserves mass every step") {
  const auto p = canonical_soft(2.0, 0.0);
  const Grid1D g(-2, 2, 400);
  const auto op = build_soft_operator(p, g);
  EvolveOptions o;
  o.dt = 0.01;
  o.n_steps = 300;
  o.mass_tol = 1e-12;
  const auto ev = evolve(op, gaussian_initial(g, 0.0, 0.2, 0.7), o);
  CHECK(ev.max_mass_error <= 1e-12);
  for (double f : ev.on_fraction) CHECK((f >= 0.0 && f <= 1.0 + 1e-12));
}

TEST_CASE("stationary state of the soft model") {
  const auto p = canonical_soft(4.0, 0.01);
  const auto g = Grid1D::aligned(p, 160);
  const auto op = build_soft_operator(p, g);
  const auto st = solve_stationary(op);
  CHECK(st.mass() == doctest::Approx(1.0).epsilon(1e-12).scale(0));
  CHECK(st.up_mass() == doctest::Approx(0.5).epsilon(1e-9).scale(0));
  const Vector res = op.A * op.pack(st);
  CHECK(g.dx() * res.cwiseAbs().sum() <= 1e-10);

  SUBCASE("evolving the stationary state leaves it unchanged") {
    EvolveOptions o;
    o.dt = 0.01;
    o.n_steps = 100;
    const auto ev = evolve(op, st, o);
    CHECK(l1_distance(ev.frames.back(), st) <= 1e-9 * 1.0);
  }
  SUBCASE("long-time evolution reaches the null vector") {
    // The spectral gap here is about 0.17, so a distance of 1e-4 needs t of order 50, not 20.
    EvolveOptions o;
    o.dt = 0.005;
    o.n_steps = 12000;
    o.output_every = 2000;
    const auto ev = evolve(op, gaussian_initial(g, 0.0, 0.1, 0.7), o);
    REQUIRE(ev.frames.size() == 7);
    CHECK(ev.frames[2].time == doctest::Approx(20.0));
    const double gap = dense_spectrum(build_soft_operator(p, Grid1D::aligned(p, 100)))[1].real();
    const double decay = l1_distance(ev.frames[2], st) / l1_distance(ev.frames[1], st);
    CHECK(decay == doctest::Approx(std::exp(-10.0 * gap)).epsilon(0.1).scale(0));
    CHECK(l1_distance(ev.frames.back(), st) <= 1e-4);
    CHECK(ev.max_mass_error <= 1e-9);
    CHECK(ev.max_clip <= 1e-10);
    // Switching gain into Up and loss from Down are the same term.
    CHECK(std::abs(ev.gain_up - ev.loss_down) <= 1e-10);
    CHECK(std::abs(ev.gain_down - ev.loss_up) <= 1e-10);
  }
}

TEST_CASE("hard model bookkeeping") {
  const auto p = canonical_params();
  const auto g = Grid1D::aligned(p, 100);
  SUBCASE("mass far from the walls just relaxes") {
    EvolveOptions o;
    o.dt = 0.005;
    o.n_steps = 40;
    auto init = gaussian_initial(g, 1.5, 0.05, 1.0);
    const auto ev = hard_evolve(p, g, init, o);
    for (double f : ev.flux_up) CHECK(f <= 1e-12);
    for (double f : ev.flux_down) CHECK(f <= 1e-12);
  }
  SUBCASE("absorbed flux equals transferred mass") {
    EvolveOptions o;
    o.dt = 0.005;
    o.n_steps = 2000;
    const auto ev = hard_evolve(p, g, gaussian_initial(g, 0.0, 0.1, 0.7), o);
    CHECK(ev.max_mass_error <= 1e-9);
    CHECK(ev.absorbed_up > 1.0);
    CHECK(std::abs(ev.absorbed_up - ev.gain_down) <= 1e-9);
    CHECK(std::abs(ev.absorbed_down - ev.gain_up) <= 1e-9);
  }
  SUBCASE("wall flux approaches the one-sided gradient") {
    // The drift correction of the wall flux is first order in dx.
    double prev = 1.0;
    for (int cells : {100, 200, 400}) {
      const auto gg = Grid1D::aligned(p, cells);
      const auto op = build_hard_operator(p, gg);
      const auto st = solve_stationary(op);
      const Vector v = op.pack(st);
      const double rel = std::abs(op.flux_up(v) - op.gradient_flux_up(v)) / op.flux_up(v);
      CHECK(rel < prev);
      prev = rel;
    }
    CHECK(prev < 0.02);
  }
}

TEST_CASE("grid refinement of the stationary state") {
  const auto p = canonical_soft(1.0, 0.01);
  std::vector<double> err;
  for (int cells : {100, 200, 400}) {
    const auto gc = Grid1D::aligned(p, cells);
    const auto coarse = solve_stationary(build_soft_operator(p, gc));
    const auto fine = solve_stationary(build_soft_operator(p, Grid1D(gc.x_lo, gc.x_hi, 2 * gc.n_cells)));
    err.push_back(l1_distance(coarse, coarsen(fine, coarse.grid)));
  }
  const double order = std::log2(err[1] / err[2]);
  MESSAGE("measured order of the stationary solution: " << order);
  CHECK(err[2] < err[1]);
  CHECK(order > 0.8);
}

TEST_CASE("relaxation fits on synthetic series") {
  std::vector<double> t, y1, y2;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(i * 0.005);
    y1.push_back(std::exp(-2.0 * t.back()));
    y2.push_back(std::exp(-t.back()) * std::cos(3.0 * t.back()));
  }
  const auto a = measure_relaxation(t, y1, RelaxModel::pure_decay);
  CHECK(a.gamma == doctest::Approx(2.0).epsilon(1e-6).scale(0));
  CHECK(a.omega == 0.0);
  CHECK(a.ok);
  const auto b = measure_relaxation(t, y2, RelaxModel::damped_oscillation);
  CHECK(b.gamma == doctest::Approx(1.0).epsilon(1e-6).scale(0));
  CHECK(b.omega == doctest::Approx(3.0).epsilon(1e-6).scale(0));
  CHECK(b.ok);

  const auto rates = matrix_pencil(y2, 0.005, 2);
  REQUIRE(rates.size() == 2);
  CHECK(std::abs(rates[0] - std::complex<double>(1.0, -3.0)) < 1e-6);
  CHECK(std::abs(rates[1] - std::complex<double>(1.0, 3.0)) < 1e-6);
}

TEST_CASE("dense spectrum of a small operator contains zero") {
  const auto p = canonical_soft(1.0, 0.0);
  const auto op = build_soft_operator(p, Grid1D(-2, 2, 80));
  const auto ev = dense_spectrum(op);
  CHECK(std::abs(ev.front()) < 1e-9);
  for (const auto& l : ev) CHECK(l.real() > -1e-9);
}
