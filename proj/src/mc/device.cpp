#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <stdexcept>

#include "tcl/mc.hpp"

namespace tcl::mc {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

SwitchState other(SwitchState s) { return s == SwitchState::Up ? SwitchState::Down : SwitchState::Up; }

struct Walker {
  DeviceState s;
  double t;
  const TclParams& p;
  Rng& rng;
  StepEvents* ev;

  void complete() {
    if (!s.armed) return;
    s.armed = false;
    ++s.cycles;
    if (ev) {
      ev->completions.push_back(t);
      if (s.last_cycle >= 0.0) ev->cycle_lengths.push_back(t - s.last_cycle);
    }
    s.last_cycle = t;
  }

  void flip() {
    s.sigma = other(s.sigma);
    if (s.sigma == SwitchState::Down) s.armed = true;
  }

  void end_excursion(std::vector<double> StepEvents::*list, std::vector<double> StepEvents::*start) {
    if (s.out_start >= 0.0 && ev) {
      (ev->*list).push_back(t - s.out_start);
      (ev->*start).push_back(s.out_start);
    }
    s.out_start = -1.0;
  }

  // Hard model: a device sitting on or past its switching threshold switches now.
  bool hard_switch_now() {
    if (s.sigma == SwitchState::Up && s.x <= p.x_down) {
      flip();
      return true;
    }
    if (s.sigma == SwitchState::Down && s.x >= p.x_up) {
      flip();
      complete();
      return true;
    }
    return false;
  }

  double exponential() { return std::exponential_distribution<double>(p.rate)(rng); }

  void deterministic(double rem) {
    while (rem > 0.0) {
      if (p.hard && hard_switch_now()) continue;
      double b = std::numeric_limits<double>::quiet_NaN();
      if (s.sigma == SwitchState::Up) {
        if (s.x > p.x_up) b = p.x_up;
        else if (s.x > p.x_down) b = p.x_down;
      } else {
        if (s.x < p.x_down) b = p.x_down;
        else if (s.x < p.x_up) b = p.x_up;
      }
      const double tm = std::isnan(b) ? inf : flow_time(s.x, b, s.sigma, p);
      const double seg = std::min(rem, tm);
      const bool eligible = !p.hard && p.rate > 0.0 &&
                            (s.sigma == SwitchState::Up ? s.x <= p.x_down : s.x >= p.x_up);
      if (eligible) {
        const double e = exponential();
        if (e < seg) {
          s.x = deterministic_flow(s.x, s.sigma, e, p);
          t += e;
          rem -= e;
          flip();
          continue;
        }
      }
      if (tm > rem) {
        s.x = deterministic_flow(s.x, s.sigma, rem, p);
        t += rem;
        return;
      }
      s.x = b;
      t += tm;
      rem -= tm;
      if (p.hard) continue;  // the switch happens at the top of the loop
      if (s.sigma == SwitchState::Up && b == p.x_up) {
        end_excursion(&StepEvents::out_above, &StepEvents::out_above_start);
        complete();
      } else if (s.sigma == SwitchState::Up) {
        s.out_start = t;
      } else if (b == p.x_down) {
        end_excursion(&StepEvents::out_below, &StepEvents::out_below_start);
      } else {
        s.out_start = t;
      }
    }
  }

  double ou_endpoint(double x0, double seg) {
    const double target = p.target(s.sigma);
    const double decay = std::exp(-seg / p.tau);
    const double sd = std::sqrt(p.kappa * p.tau * (1.0 - decay * decay));
    return target + (x0 - target) * decay + sd * std::normal_distribution<double>()(rng);
  }

  void stochastic(double rem) {
    std::uniform_real_distribution<double> unif;
    if (p.hard) {
      while (rem > 0.0) {
        if (hard_switch_now()) continue;
        const double x0 = s.x, x1 = ou_endpoint(x0, rem);
        const double b = s.sigma == SwitchState::Up ? p.x_down : p.x_up;
        double ts = -1.0;
        if ((s.sigma == SwitchState::Up) ? x1 <= b : x1 >= b) {
          ts = rem * (x0 - b) / (x0 - x1);
        } else if (unif(rng) < std::exp(-(x0 - b) * (x1 - b) / (p.kappa * rem))) {
          ts = 0.5 * rem;  // Brownian-bridge crossing inside the step
        }
        if (ts < 0.0) {
          s.x = x1;
          t += rem;
          return;
        }
        s.x = b;
        t += ts;
        rem -= ts;
      }
      hard_switch_now();
      return;
    }
    const double x0 = s.x, x1 = ou_endpoint(x0, rem);
    const bool eligible = s.sigma == SwitchState::Up ? x0 < p.x_down : x0 > p.x_up;
    if (s.sigma == SwitchState::Up && s.armed && x1 <= p.x_up) {
      const double frac = x0 > p.x_up ? (x0 - p.x_up) / (x0 - x1) : 0.0;
      const double t_end = t + rem;
      t += frac * rem;
      complete();
      t = t_end;
    } else {
      t += rem;
    }
    s.x = x1;
    if (eligible && p.rate > 0.0 && unif(rng) < -std::expm1(-p.rate * rem)) flip();
  }
};

}  // namespace

void StepEvents::clear() {
  completions.clear();
  cycle_lengths.clear();
  out_below.clear();
  out_above.clear();
  out_below_start.clear();
  out_above_start.clear();
}

DeviceState step_device(const DeviceState& s, double t, double dt, const TclParams& p, Rng& rng,
                        StepEvents* events) {
  Walker w{s, t, p, rng, events};
  if (p.kappa == 0.0) w.deterministic(dt);
  else w.stochastic(dt);
  return w.s;
}

Rng device_rng(std::uint64_t seed, std::uint64_t device) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(device), static_cast<std::uint32_t>(device >> 32)};
  return Rng(seq);
}

InitialSampler at_reference(const TclParams& p) {
  const double x = p.x_up;
  return [x](Rng&, int) {
    DeviceState s;
    s.x = x;
    s.sigma = SwitchState::Up;
    return s;
  };
}

InitialSampler gaussian_start(double x0, double width, double up_fraction) {
  return [=](Rng& rng, int) {
    DeviceState s;
    s.x = x0 + width * std::normal_distribution<double>()(rng);
    s.sigma = std::uniform_real_distribution<double>()(rng) < up_fraction ? SwitchState::Up : SwitchState::Down;
    s.armed = s.sigma == SwitchState::Down;
    s.last_cycle = -1.0;
    return s;
  };
}

InitialSampler from_field(const FieldPair& f) {
  std::vector<double> w(f.up.begin(), f.up.end());
  w.insert(w.end(), f.down.begin(), f.down.end());
  double acc = 0.0;
  for (double& v : w) v = acc += std::max(v, 0.0);
  if (!(acc > 0.0)) throw std::invalid_argument("from_field: field has no mass");
  auto cdf = std::make_shared<const std::vector<double>>(std::move(w));
  const Grid1D g = f.grid;
  return [cdf, g](Rng& rng, int) {
    const double u = cdf->back() * std::uniform_real_distribution<double>()(rng);
    const int k = std::min<int>(cdf->size() - 1, std::upper_bound(cdf->begin(), cdf->end(), u) - cdf->begin());
    const int i = k % g.n_cells;
    DeviceState s;
    s.x = g.face(i) + g.dx() * std::uniform_real_distribution<double>()(rng);
    s.sigma = k < g.n_cells ? SwitchState::Up : SwitchState::Down;
    s.armed = s.sigma == SwitchState::Down;
    s.last_cycle = -1.0;
    return s;
  };
}

}  // namespace tcl::mc
