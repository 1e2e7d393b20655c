#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "tcl/mc.hpp"

namespace tcl::mc {
namespace {

struct Breakpoint {
  double t;
  int sample = -1;    // index into on_fraction
  int snapshot = -1;  // index into snapshots
};

struct BlockResult {
  std::vector<std::int64_t> on_count;
  StepEvents events;
  std::vector<std::int64_t> completion_n;
};

}  // namespace

EnsembleTrace simulate_ensemble(const TclParams& p, int n_devices, double t_end, double dt,
                                std::uint64_t seed, const EnsembleOptions& opt) {
  p.validate();
  if (n_devices < 1) throw std::invalid_argument("simulate_ensemble: n_devices must be >= 1");
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("simulate_ensemble: need dt > 0, t_end >= 0");
  if (opt.sample_every < 1 || opt.block_size < 1) throw std::invalid_argument("simulate_ensemble: bad stride");

  EnsembleTrace tr;
  tr.params = p;
  tr.seed = seed;
  tr.n_devices = n_devices;
  tr.dt = dt;

  const long n_steps = std::lround(t_end / dt);
  std::vector<Breakpoint> bps;
  for (long k = 0; k <= n_steps; ++k) {
    Breakpoint b{k == n_steps ? t_end : k * dt};
    if (k % opt.sample_every == 0 || k == n_steps) {
      b.sample = static_cast<int>(tr.times.size());
      tr.times.push_back(b.t);
    }
    bps.push_back(b);
  }
  for (double ts : opt.snapshot_times) {
    if (ts < 0.0 || ts > t_end) throw std::invalid_argument("simulate_ensemble: snapshot time outside [0, t_end]");
    const int idx = static_cast<int>(tr.snapshot_times.size());
    tr.snapshot_times.push_back(ts);
    auto it = std::find_if(bps.begin(), bps.end(), [&](const Breakpoint& b) { return std::abs(b.t - ts) <= 1e-12 * (1 + ts); });
    if (it != bps.end() && it->snapshot < 0) {
      it->snapshot = idx;
    } else {
      Breakpoint b{ts};
      b.snapshot = idx;
      bps.insert(std::upper_bound(bps.begin(), bps.end(), ts, [](double v, const Breakpoint& q) { return v < q.t; }), b);
    }
  }
  tr.snapshots.assign(tr.snapshot_times.size(), std::vector<DeviceState>(n_devices));
  tr.final_cycles.assign(n_devices, 0);

  const auto initial = opt.initial ? opt.initial : at_reference(p);
  const int n_blocks = (n_devices + opt.block_size - 1) / opt.block_size;
  std::vector<BlockResult> blocks(n_blocks);
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int b; (b = next++) < n_blocks;) {
      auto& res = blocks[b];
      res.on_count.assign(tr.times.size(), 0);
      StepEvents step_ev;
      const int lo = b * opt.block_size, hi = std::min(n_devices, lo + opt.block_size);
      for (int i = lo; i < hi; ++i) {
        Rng rng = device_rng(seed, static_cast<std::uint64_t>(i));
        DeviceState s = initial(rng, i);
        double t = 0.0;
        for (const auto& bp : bps) {
          if (bp.t > t) {
            step_ev.clear();
            s = step_device(s, t, bp.t - t, p, rng, opt.record_events ? &step_ev : nullptr);
            t = bp.t;
            if (opt.record_events) {
              const auto n0 = s.cycles - static_cast<std::int64_t>(step_ev.completions.size());
              for (std::size_t k = 0; k < step_ev.completions.size(); ++k) {
                res.events.completions.push_back(step_ev.completions[k]);
                res.completion_n.push_back(n0 + 1 + static_cast<std::int64_t>(k));
              }
              auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
                dst.insert(dst.end(), src.begin(), src.end());
              };
              append(res.events.cycle_lengths, step_ev.cycle_lengths);
              append(res.events.out_below, step_ev.out_below);
              append(res.events.out_above, step_ev.out_above);
              append(res.events.out_below_start, step_ev.out_below_start);
              append(res.events.out_above_start, step_ev.out_above_start);
            }
          }
          if (bp.sample >= 0 && s.sigma == SwitchState::Up) ++res.on_count[bp.sample];
          if (bp.snapshot >= 0) tr.snapshots[bp.snapshot][i] = s;
        }
        tr.final_cycles[i] = s.cycles;
      }
    }
  };

  int n_threads = opt.n_threads > 0 ? opt.n_threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, n_blocks);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }

  std::vector<std::int64_t> on(tr.times.size(), 0);
  for (auto& res : blocks) {
    for (std::size_t k = 0; k < on.size(); ++k) on[k] += res.on_count[k];
    for (std::size_t k = 0; k < res.completion_n.size(); ++k)
      tr.completions.push_back({res.events.completions[k], res.completion_n[k]});
    tr.cycle_lengths.insert(tr.cycle_lengths.end(), res.events.cycle_lengths.begin(), res.events.cycle_lengths.end());
    tr.out_below.insert(tr.out_below.end(), res.events.out_below.begin(), res.events.out_below.end());
    tr.out_above.insert(tr.out_above.end(), res.events.out_above.begin(), res.events.out_above.end());
    tr.out_below_start.insert(tr.out_below_start.end(), res.events.out_below_start.begin(),
                              res.events.out_below_start.end());
    tr.out_above_start.insert(tr.out_above_start.end(), res.events.out_above_start.begin(),
                              res.events.out_above_start.end());
  }
  tr.on_fraction.resize(on.size());
  for (std::size_t k = 0; k < on.size(); ++k) tr.on_fraction[k] = static_cast<double>(on[k]) / n_devices;
  return tr;
}

FieldPair empirical_distribution(const std::vector<DeviceState>& snapshot, const Grid1D& grid) {
  if (snapshot.empty()) throw std::invalid_argument("empirical_distribution: empty snapshot");
  FieldPair f(grid);
  const double w = 1.0 / (snapshot.size() * grid.dx());
  for (const auto& s : snapshot) {
    const int i = grid.cell_of(s.x);
    (s.sigma == SwitchState::Up ? f.up : f.down)[i] += w;
  }
  return f;
}

namespace {

FluxStatistics from_counts(double t, const std::vector<std::int64_t>& n) {
  FluxStatistics fs;
  fs.t = t;
  if (n.empty()) return fs;
  const auto n_max = *std::max_element(n.begin(), n.end());
  fs.p.assign(n_max + 1, 0.0);
  double m1 = 0.0, m2 = 0.0;
  for (auto k : n) {
    fs.p[k] += 1.0;
    m1 += k;
    m2 += static_cast<double>(k) * k;
  }
  const double c = static_cast<double>(n.size());
  for (double& v : fs.p) v /= c;
  m1 /= c;
  m2 /= c;
  if (t > 0.0) {
    fs.mean_omega = m1 / t;
    fs.var_omega = (m2 - m1 * m1) / (t * t);
  }
  return fs;
}

}  // namespace

FluxStatistics flux_statistics(const EnsembleTrace& trace, double t) {
  const double tol = 1e-9 * (1.0 + std::abs(t));
  for (std::size_t j = 0; j < trace.snapshot_times.size(); ++j) {
    if (std::abs(trace.snapshot_times[j] - t) <= tol) {
      std::vector<std::int64_t> n;
      n.reserve(trace.snapshots[j].size());
      for (const auto& s : trace.snapshots[j]) n.push_back(s.cycles);
      return from_counts(t, n);
    }
  }
  if (!trace.times.empty() && std::abs(trace.times.back() - t) <= tol) return from_counts(t, trace.final_cycles);
  throw std::invalid_argument("flux_statistics: t is neither a snapshot time nor the end of the trace");
}

FluxStatistics completion_statistics(const EnsembleTrace& trace, double t, double half_window) {
  std::vector<std::int64_t> n;
  for (const auto& e : trace.completions)
    if (std::abs(e.time - t) <= half_window) n.push_back(e.n);
  if (n.empty()) throw std::runtime_error("completion_statistics: no completions in the window");
  auto fs = from_counts(t, n);
  return fs;
}

std::vector<double> histogram_density(const std::vector<double>& samples, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw std::invalid_argument("histogram_density: bad range");
  std::vector<double> h(bins, 0.0);
  if (samples.empty()) return h;
  const double w = (hi - lo) / bins;
  for (double v : samples) {
    if (v < lo || v >= hi) continue;
    h[std::min(bins - 1, static_cast<int>((v - lo) / w))] += 1.0;
  }
  for (double& v : h) v /= samples.size() * w;
  return h;
}

}  // namespace tcl::mc
