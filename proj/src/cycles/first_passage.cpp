#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tcl/cycles.hpp"
#include "tcl/fp.hpp"

namespace tcl::cycles {
namespace {

// Trapezoid sum of e^{-st} t^m f(t) on the grid t_k = k h.
double trapezoid(const std::vector<double>& f, double h, double s, int m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double t = k * h;
    const double w = (k == 0 || k + 1 == f.size()) ? 0.5 : 1.0;
    acc += w * std::exp(-s * t) * std::pow(t, m) * f[k];
  }
  return acc * h;
}

double richardson(const std::vector<double>& fine, const std::vector<double>& coarse, double h, double s,
                  int m) {
  return 2.0 * trapezoid(fine, h, s, m) - trapezoid(coarse, 2.0 * h, s, m);
}

double tail_decay(const std::vector<double>& f, double h) {
  // Log-slope between 60% and 90% of the largest time still above underflow.
  std::size_t last = f.size();
  while (last > 1 && !(f[last - 1] > 1e-250)) --last;
  const std::size_t a = last * 6 / 10, b = last * 9 / 10;
  if (b <= a || !(f[a] > 0.0) || !(f[b] > 0.0)) return std::numeric_limits<double>::infinity();
  return -(std::log(f[b]) - std::log(f[a])) / ((b - a) * h);
}

}  // namespace

double FirstPassage::g_up(double s) const { return richardson(p_up, p_up_coarse, dt, s, 0); }
double FirstPassage::g_down(double s) const { return richardson(p_down, p_down_coarse, dt, s, 0); }
double FirstPassage::g_up_prime(double s) const { return -richardson(p_up, p_up_coarse, dt, s, 1); }
double FirstPassage::g_down_prime(double s) const { return -richardson(p_down, p_down_coarse, dt, s, 1); }

CycleTransform FirstPassage::transform() const {
  CycleTransform ct;
  const FirstPassage fp = *this;
  ct.log_g = [fp](double s) { return std::log(fp.g(s)); };
  ct.dlog_g = [fp](double s) { return fp.g_up_prime(s) / fp.g_up(s) + fp.g_down_prime(s) / fp.g_down(s); };
  // Keep away from the edge where the truncated series stops representing the tail.
  ct.s_min = -0.9 * tail_rate;
  ct.mean = mean_up + mean_down;
  ct.t_min = 0.0;
  return ct;
}

std::vector<double> FirstPassage::cycle_density() const {
  const std::size_t n = std::min(p_up.size(), p_down.size());
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double w = (j == 0 || j == k) ? 0.5 : 1.0;
      acc += w * p_up[j] * p_down[k - j];
    }
    c[k] = acc * dt;
  }
  return c;
}

FirstPassage hard_first_passage(const TclParams& p, const Grid1D& grid, double dt, double t_end) {
  if (!p.hard || !(p.kappa > 0.0)) throw std::invalid_argument("hard_first_passage: hard model with kappa > 0 required");
  if (!(dt > 0.0) || !(t_end > dt)) throw std::invalid_argument("hard_first_passage: 0 < dt < t_end required");
  const auto op = fp::build_hard_operator(p, grid, false);

  auto run = [&](const FieldPair& init, double h, bool up) {
    fp::EvolveOptions o;
    o.dt = h;
    o.n_steps = static_cast<int>(std::ceil(t_end / h));
    o.scheme = fp::Scheme::backward_euler;
    auto ev = fp::evolve(op, init, o);
    return std::make_pair(up ? ev.flux_up : ev.flux_down, up ? ev.absorbed_up : ev.absorbed_down);
  };
  const FieldPair start_up = fp::face_initial(grid, p.x_up, SwitchState::Up);
  const FieldPair start_down = fp::face_initial(grid, p.x_down, SwitchState::Down);

  FirstPassage out;
  out.dt = dt;
  auto [fu, mu] = run(start_up, dt, true);
  auto [fd, md] = run(start_down, dt, false);
  out.p_up_coarse = run(start_up, 2.0 * dt, true).first;
  out.p_down_coarse = run(start_down, 2.0 * dt, false).first;
  out.p_up = std::move(fu);
  out.p_down = std::move(fd);
  out.mass_up = mu;
  out.mass_down = md;
  for (std::size_t k = 0; k < out.p_up.size(); ++k) out.t.push_back(k * dt);

  if (1.0 - std::min(mu, md) > 1e-3) {
    std::ostringstream msg;
    msg << "hard_first_passage: unabsorbed mass " << 1.0 - std::min(mu, md) << " at t_end = " << t_end
        << "; increase t_end";
    throw std::runtime_error(msg.str());
  }
  out.mean_up = -out.g_up_prime(0.0) / out.g_up(0.0);
  out.mean_down = -out.g_down_prime(0.0) / out.g_down(0.0);
  // The coarse run decays more slowly (backward Euler shrinks rates), and the extrapolated
  // transforms are only usable where both tails are integrable.
  out.tail_rate = std::min({tail_decay(out.p_up, dt), tail_decay(out.p_down, dt),
                            tail_decay(out.p_up_coarse, 2.0 * dt), tail_decay(out.p_down_coarse, 2.0 * dt)});
  return out;
}

}  // namespace tcl::cycles
