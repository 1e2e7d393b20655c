#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tcl/core.hpp"

namespace tcl::mc {

using Rng = std::mt19937_64;

struct DeviceState {
  double x = 0.0;
  SwitchState sigma = SwitchState::Up;
  std::int64_t cycles = 0;
  // Set once the device has left Up; the next Up crossing of x_up completes a cycle.
  bool armed = false;
  double last_cycle = 0.0;  // time of the last completion (or of the start)
  double out_start = -1.0;  // time the current excursion outside the deadband began, -1 if inside
};

// Things that happened during a step, with absolute times.
struct StepEvents {
  std::vector<double> completions;  // cycle completion times
  std::vector<double> cycle_lengths;
  std::vector<double> out_below;    // excursions below x_down (on -> off transition)
  std::vector<double> out_above;    // excursions above x_up (off -> on transition)
  std::vector<double> out_below_start;  // start times of the excursions
  std::vector<double> out_above_start;
  void clear();
};

// Advances one device by dt starting at absolute time t.  Exact OU transitions inside a
// state; hard switching by event detection; soft switching as a Poisson clock that runs
// while the device is eligible.  events may be null.
DeviceState step_device(const DeviceState& s, double t, double dt, const TclParams& p, Rng& rng,
                        StepEvents* events = nullptr);

Rng device_rng(std::uint64_t seed, std::uint64_t device);

using InitialSampler = std::function<DeviceState(Rng&, int)>;

// Every device at (x_up, Up).
InitialSampler at_reference(const TclParams& p);
// Gaussian in x with the given state split.
InitialSampler gaussian_start(double x0, double width, double up_fraction);
// Draws cell-uniform positions from a normalized field.
InitialSampler from_field(const FieldPair& f);

struct EnsembleOptions {
  InitialSampler initial;  // default: at_reference
  std::vector<double> snapshot_times;
  int sample_every = 1;    // on-fraction sampling stride in steps
  bool record_events = false;
  int n_threads = 0;       // 0: hardware concurrency
  int block_size = 512;
};

struct CompletionEvent {
  double time;
  std::int64_t n;
};

struct EnsembleTrace {
  TclParams params;
  std::uint64_t seed = 0;
  int n_devices = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> on_fraction;
  std::vector<double> snapshot_times;
  std::vector<std::vector<DeviceState>> snapshots;
  std::vector<std::int64_t> final_cycles;
  // Filled when record_events is set, in device order.
  std::vector<CompletionEvent> completions;
  std::vector<double> cycle_lengths;
  std::vector<double> out_below;
  std::vector<double> out_above;
  std::vector<double> out_below_start;
  std::vector<double> out_above_start;
};

EnsembleTrace simulate_ensemble(const TclParams& p, int n_devices, double t_end, double dt,
                                std::uint64_t seed, const EnsembleOptions& opt = {});

// Histogram with dx * sum(up + down) = 1; positions outside the grid go to the edge cells.
FieldPair empirical_distribution(const std::vector<DeviceState>& snapshot, const Grid1D& grid);

struct FluxStatistics {
  double t = 0.0;
  std::vector<double> p;  // p[n]
  double mean_omega = 0.0;
  double var_omega = 0.0;
};

// Count-by-time: histogram of cycles completed by time t, which must be a snapshot time
// or the end of the trace.
FluxStatistics flux_statistics(const EnsembleTrace& trace, double t);

// Histogram of the cycle index over completions with time in [t - half_window, t + half_window].
FluxStatistics completion_statistics(const EnsembleTrace& trace, double t, double half_window);

// Normalized histogram density of samples on [lo, hi) with n bins; mass outside is dropped
// from the bins but counted in the normalization.
std::vector<double> histogram_density(const std::vector<double>& samples, double lo, double hi, int bins);

}  // namespace tcl::mc
