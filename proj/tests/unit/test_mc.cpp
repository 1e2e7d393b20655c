#include <cmath>

#include "doctest.h"
#include "tcl/cycles.hpp"
#include "tcl/mc.hpp"
#include "tcl/steady.hpp"

using namespace tcl;
using namespace tcl::mc;

namespace {

// E|X - Y| for independent X, Y ~ Poisson(mu); E (X - Y)^2 = 2 mu.
double mean_abs_difference(double mu) {
  if (mu <= 0.0) return 0.0;
  const int m = static_cast<int>(mu + 12.0 * std::sqrt(mu) + 30.0);
  double cdf = 0.0, first = 0.0, acc = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double pj = std::exp(j * std::log(mu) - mu - std::lgamma(j + 1.0));
    acc += pj * (j * cdf - first);
    cdf += pj;
    first += j * pj;
  }
  return 2.0 * acc;
}

}  // namespace

TEST_CASE("single steps") {
  SUBCASE("no noise, no switching: deterministic flow") {
    const auto p = canonical_soft(1e-300, 0.0);
    Rng rng = device_rng(1, 0);
    DeviceState s;
    s.x = 0.0;
    const auto out = step_device(s, 0.0, 0.3, p, rng);
    CHECK(out.x == deterministic_flow(0.0, SwitchState::Up, 0.3, p));
    CHECK(out.sigma == SwitchState::Up);
  }
  SUBCASE("eligible device switches with probability 1 - exp(-r dt)") {
    for (double kappa : {0.0, 0.01}) {
      const auto p = canonical_soft(1.0, kappa);
      const double dt = 0.1, q = -std::expm1(-dt);
      const int n = 200000;
      Rng rng = device_rng(2, 0);
      DeviceState s;
      s.x = -1.5;
      int hits = 0;
      for (int k = 0; k < n; ++k) hits += step_device(s, 0.0, dt, p, rng).sigma == SwitchState::Down;
      const double se = std::sqrt(q * (1 - q) / n);
      CHECK(std::abs(hits / double(n) - q) <= 3 * se);
    }
  }
  SUBCASE("no switching inside the deadband") {
    for (double kappa : {0.0, 0.01}) {
      const auto p = canonical_soft(100.0, kappa);
      Rng rng = device_rng(3, 0);
      DeviceState s;
      s.x = 0.5;
      s.sigma = SwitchState::Down;
      int hits = 0;
      for (int k = 0; k < 20000; ++k) hits += step_device(s, 0.0, 0.001, p, rng).sigma == SwitchState::Up;
      CHECK(hits == 0);
    }
  }
}

TEST_CASE("deterministic hard cycling is periodic") {
  const auto p = canonical_params();
  auto q = p;
  q.kappa = 0.0;
  const double tdc = deadband_cycle_time(q);
  EnsembleOptions o;
  o.initial = gaussian_start(0.0, 0.2, 0.6);
  o.snapshot_times = {0.0, tdc, 2 * tdc, 3.5 * tdc};
  o.record_events = true;
  const auto tr = simulate_ensemble(q, 500, 4 * tdc, 0.01, 7, o);
  for (int j : {1, 2})
    for (int i = 0; i < tr.n_devices; ++i) {
      CHECK(std::abs(tr.snapshots[j][i].x - tr.snapshots[0][i].x) <= 1e-10);
      CHECK(tr.snapshots[j][i].sigma == tr.snapshots[0][i].sigma);
    }
  const auto ref = simulate_ensemble(q, 50, 4 * tdc, 0.01, 7, {.snapshot_times = {0.5 * tdc, 3.5 * tdc}});
  CHECK(flux_statistics(ref, 0.5 * tdc).p == std::vector<double>{1.0});
  const auto f = flux_statistics(ref, 3.5 * tdc);
  REQUIRE(f.p.size() == 4);
  CHECK(f.p[3] == 1.0);
  for (double len : simulate_ensemble(q, 20, 4 * tdc, 0.01, 1, {.record_events = true}).cycle_lengths)
    CHECK(len == doctest::Approx(tdc).epsilon(1e-12).scale(0));
}

TEST_CASE("single device without noise or switching follows the flow") {
  const auto p = canonical_soft(1e-300, 0.0);
  const auto tr = simulate_ensemble(p, 1, 3.0, 0.01, 5, {.initial = gaussian_start(0.3, 0.0, 1.0), .snapshot_times = {1.0, 3.0}});
  CHECK(tr.snapshots[0][0].x == doctest::Approx(deterministic_flow(0.3, SwitchState::Up, 1.0, p)).epsilon(1e-13).scale(0));
  CHECK(tr.snapshots[1][0].x == doctest::Approx(deterministic_flow(0.3, SwitchState::Up, 3.0, p)).epsilon(1e-13).scale(0));
}

TEST_CASE("reproducible for any worker count") {
  const auto p = canonical_soft(1.0, 0.05);
  EnsembleOptions o;
  o.record_events = true;
  o.block_size = 37;
  o.n_threads = 1;
  const auto a = simulate_ensemble(p, 300, 10.0, 0.01, 99, o);
  o.n_threads = 4;
  const auto b = simulate_ensemble(p, 300, 10.0, 0.01, 99, o);
  CHECK(a.on_fraction == b.on_fraction);
  CHECK(a.final_cycles == b.final_cycles);
  CHECK(a.cycle_lengths == b.cycle_lengths);
  const auto c = simulate_ensemble(p, 300, 10.0, 0.01, 100, o);
  CHECK(a.on_fraction != c.on_fraction);
  for (double f : a.on_fraction) CHECK((f >= 0.0 && f <= 1.0));
}

TEST_CASE("state-space invariants") {
  SUBCASE("hard model never overshoots a threshold") {
    const auto p = canonical_params();
    std::vector<double> times;
    for (int k = 1; k <= 40; ++k) times.push_back(0.25 * k);
    const auto tr = simulate_ensemble(p, 1000, 10.0, 0.01, 11, {.snapshot_times = times});
    for (const auto& snap : tr.snapshots)
      for (const auto& s : snap) {
        if (s.sigma == SwitchState::Up) CHECK(s.x > p.x_down);
        else CHECK(s.x < p.x_up);
      }
  }
  SUBCASE("soft model without noise stays between the targets") {
    const auto p = canonical_soft(0.3, 0.0);
    const auto tr = simulate_ensemble(p, 1000, 30.0, 0.01, 12, {.snapshot_times = {5, 10, 20, 30}});
    for (const auto& snap : tr.snapshots)
      for (const auto& s : snap) CHECK((s.x > p.x_minus && s.x < p.x_plus));
  }
}

TEST_CASE("empirical distributions") {
  const Grid1D g(-3, 3, 60);
  std::vector<DeviceState> pile(10, DeviceState{0.05, SwitchState::Down});
  const auto spike = empirical_distribution(pile, g);
  CHECK(spike.down[g.cell_of(0.05)] * g.dx() == doctest::Approx(1.0));
  CHECK(spike.mass() == doctest::Approx(1.0));

  SUBCASE("hard histogram vs the closed-form stationary density, and seed-to-seed noise") {
    const auto p = canonical_params();
    const auto grid = Grid1D::aligned(p, 20);
    const int n = 20000;
    const auto a = simulate_ensemble(p, n, 25.0, 0.01, 1, {.snapshot_times = {25.0}});
    const auto b = simulate_ensemble(p, n, 25.0, 0.01, 2, {.snapshot_times = {25.0}});
    const auto ha = empirical_distribution(a.snapshots[0], grid);
    const auto hb = empirical_distribution(b.snapshots[0], grid);
    const auto exact = steady::stationary_hard(p, grid).field;
    double expected = 0.0, var = 0.0;
    for (int i = 0; i < grid.n_cells; ++i)
      for (double v : {exact.up[i], exact.down[i]}) {
        const double mu = n * v * grid.dx(), m = mean_abs_difference(mu);
        expected += m / n;
        var += (2.0 * mu - m * m) / (double(n) * n);
      }
    const double seeds = l1_distance(ha, hb);
    MESSAGE("seed-to-seed L1 " << seeds << " expected " << expected << " +- " << std::sqrt(var));
    CHECK(std::abs(seeds - expected) <= 3.0 * std::sqrt(var));
    CHECK(l1_distance(ha, exact) <= 0.05);
  }
}

TEST_CASE("out-time law without noise") {
  const auto p = canonical_soft(1.0, 0.0);
  const auto g = geometry(p);
  const auto tr = simulate_ensemble(p, 2000, 60.0, 0.01, 3, {.record_events = true});
  REQUIRE(tr.out_below.size() > 10000);
  const int bins = 60;
  const auto h = histogram_density(tr.out_below, 0.0, 6.0, bins);
  double l1 = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double a = 0.1 * k, b = a + 0.1;
    const double exact = (cycles::p_out_cdf(b, g.alpha, 1.0, 1.0) - cycles::p_out_cdf(a, g.alpha, 1.0, 1.0)) / 0.1;
    l1 += 0.1 * std::abs(h[k] - exact);
  }
  l1 += 1.0 - cycles::p_out_cdf(6.0, g.alpha, 1.0, 1.0);
  CHECK(l1 <= 0.05);

  // Mean cycle time from the time of the eighth completion of each device.
  double sum = 0.0, sum2 = 0.0;
  int cnt = 0;
  for (const auto& e : tr.completions)
    if (e.n == 8) {
      sum += e.time;
      sum2 += e.time * e.time;
      ++cnt;
    }
  REQUIRE(cnt == tr.n_devices);
  const double mean = sum / cnt, se = std::sqrt((sum2 / cnt - mean * mean) / cnt);
  CHECK(std::abs(mean - 8.0 * cycles::mean_cycle_time(p)) <= 3.0 * se);
}
