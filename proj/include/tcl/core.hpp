#pragma once

#include <limits>
#include <string>
#include <vector>

namespace tcl {

// Up is the compressor-on state relaxing toward x_minus, Down relaxes toward x_plus.
enum class SwitchState { Up, Down };

inline const char* to_string(SwitchState s) { return s == SwitchState::Up ? "up" : "down"; }

struct TclParams {
  double x_minus = -2.0;
  double x_down = -1.0;
  double x_up = 1.0;
  double x_plus = 2.0;
  double tau = 1.0;
  double kappa = 0.1;
  double rate = 1.0;  // ignored when hard
  bool hard = true;

  static TclParams hard_model(double x_minus, double x_down, double x_up, double x_plus,
                              double tau, double kappa);
  static TclParams soft_model(double x_minus, double x_down, double x_up, double x_plus,
                              double tau, double kappa, double rate);

  // Throws std::invalid_argument naming the violated invariant.
  void validate() const;

  double target(SwitchState s) const { return s == SwitchState::Up ? x_minus : x_plus; }
  double ou_variance() const { return kappa * tau; }
  bool operator==(const TclParams&) const = default;
};

// The canonical geometry (-2,-1,1,2), tau = 1, kappa = 0.1, hard switching.
TclParams canonical_params();
// Same geometry with soft switching.
TclParams canonical_soft(double rate, double kappa);

struct DerivedGeometry {
  double alpha;
  double beta;
  double t_dc;
  double u;
};

double deadband_cycle_time(const TclParams& p);
DerivedGeometry geometry(const TclParams& p);

double drift(double x, SwitchState s, const TclParams& p);
double deterministic_flow(double x0, SwitchState s, double dt, const TclParams& p);

// Time needed by the deterministic flow in state s to go from x0 to x1;
// +inf if x1 is not on the way to the target.
double flow_time(double x0, double x1, SwitchState s, const TclParams& p);

// Uniform cell-centered grid.
struct Grid1D {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 1;

  Grid1D() = default;
  Grid1D(double lo, double hi, int n);

  double dx() const { return (x_hi - x_lo) / n_cells; }
  double center(int i) const { return x_lo + (i + 0.5) * dx(); }
  double face(int i) const { return x_lo + i * dx(); }
  // Index of the cell containing x, clamped to [0, n_cells-1].
  int cell_of(double x) const;
  // Index of the face nearest to x.
  int nearest_face(double x) const;
  std::vector<double> centers() const;
  bool operator==(const Grid1D&) const = default;

  // Pads [x_minus, x_plus] by 6.5*sqrt(kappa*tau) and places both thresholds
  // exactly on cell faces with the given number of cells across the deadband.
  static Grid1D aligned(const TclParams& p, int cells_per_deadband);
};

struct FieldPair {
  std::vector<double> up;
  std::vector<double> down;
  Grid1D grid;
  double time = 0.0;

  FieldPair() = default;
  explicit FieldPair(const Grid1D& g, double t = 0.0);

  double mass() const;
  double up_mass() const;
  double down_mass() const;
  void normalize();
  double min_value() const;
};

// Discrete L1 distance dx * sum(|up_a - up_b| + |down_a - down_b|); grids must match.
double l1_distance(const FieldPair& a, const FieldPair& b);

// Average of a fine field onto a coarser grid whose faces coincide with fine faces.
FieldPair coarsen(const FieldPair& f, const Grid1D& coarse);

}  // namespace tcl
