#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

#include "tcl/core.hpp"

namespace tcl::fp {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Absorbing wall of the hard model: the absorbed mass per unit time is rate * P[cell].
struct Wall {
  int cell = -1;      // index into the packed state vector
  double rate = 0.0;  // temperature/time
  double x = 0.0;     // wall position
};

// Discrete generator dP/dt = A P acting on the packed vector [up(0..n-1), down(0..n-1)]
// of cell averages.
struct FpOperator {
  TclParams params;
  Grid1D grid;
  SparseMatrix A;
  // Cross-state part of A (switching gains, reinjection) and per-entry exit rates.
  SparseMatrix transfer;
  Vector exit_rate;
  std::vector<char> active;  // cells outside the support of the hard model stay at zero
  Wall wall_up;              // Up absorbed at x_down (hard model only)
  Wall wall_down;            // Down absorbed at x_up
  bool hard = false;
  bool reinject = true;

  int n() const { return grid.n_cells; }
  int size() const { return 2 * grid.n_cells; }
  Vector pack(const FieldPair& f) const;
  FieldPair unpack(const Vector& v, double t = 0.0) const;

  // Absorbed mass rates for the state vector v.
  double flux_up(const Vector& v) const { return wall_up.cell < 0 ? 0.0 : wall_up.rate * v[wall_up.cell]; }
  double flux_down(const Vector& v) const {
    return wall_down.cell < 0 ? 0.0 : wall_down.rate * v[wall_down.cell];
  }
  // The same fluxes from the plain one-sided wall gradient kappa * P / (dx/2).
  double gradient_flux_up(const Vector& v) const;
  double gradient_flux_down(const Vector& v) const;
};

// Throws std::invalid_argument when dx > min(sqrt(kappa tau)/4, (x_up - x_down)/100), kappa > 0.
void check_resolution(const TclParams& p, const Grid1D& grid);

// Exponentially fitted (Scharfetter-Gummel) fluxes per state, pure upwind when kappa = 0,
// switching by cell center.  Zero-flux outer boundaries.
FpOperator build_soft_operator(const TclParams& p, const Grid1D& grid, bool check = true);

// Hard model: Up lives right of x_down, Down left of x_up, absorbing walls at the
// thresholds.  Absorbed mass is split evenly between the two cells of the other state
// that touch the wall, or discarded when reinject is false.  Needs kappa > 0.
FpOperator build_hard_operator(const TclParams& p, const Grid1D& grid, bool reinject = true,
                               bool check = true);

enum class Scheme { backward_euler, bdf2 };

struct EvolveOptions {
  double dt = 0.005;
  int n_steps = 0;
  int output_every = 0;  // 0: keep only the initial and final frames
  Scheme scheme = Scheme::bdf2;
  double mass_tol = 1e-9;
};

struct Evolution {
  std::vector<FieldPair> frames;
  std::vector<double> t;            // every step, starting with the initial time
  std::vector<double> on_fraction;  // Up mass at each t
  std::vector<double> flux_up;      // absorbed rate at x_down at each t
  std::vector<double> flux_down;    // absorbed rate at x_up at each t
  // Time integrals accumulated with the quadrature implied by the scheme.
  double absorbed_up = 0.0;
  double absorbed_down = 0.0;
  double gain_up = 0.0;    // switching gain into Up
  double loss_down = 0.0;  // switching loss out of Down
  double gain_down = 0.0;
  double loss_up = 0.0;
  double max_mass_error = 0.0;
  double max_clip = 0.0;  // largest L1 mass removed by the positivity projection in one step
};

// Implicit evolution.  Throws std::runtime_error on solver failure or when mass
// (plus absorbed mass without reinjection) drifts by more than mass_tol.
Evolution evolve(const FpOperator& op, const FieldPair& init, const EvolveOptions& opt);

Evolution hard_evolve(const TclParams& p, const Grid1D& grid, const FieldPair& init,
                      const EvolveOptions& opt, bool reinject = true);

// Normalized null vector restricted to the active cells.
FieldPair solve_stationary(const FpOperator& op);

// Gaussian cell averages centered at x0 with standard deviation width, split between the states.
FieldPair gaussian_initial(const Grid1D& grid, double x0, double width, double up_fraction);
// Unit mass of one state split evenly between the two cells touching the face nearest x,
// the discrete delta used for reinjection.
FieldPair face_initial(const Grid1D& grid, double x, SwitchState s);

// All eigenvalues lambda of -A (dense; small grids only), sorted by real part.
std::vector<std::complex<double>> dense_spectrum(const FpOperator& op);

enum class RelaxModel { pure_decay, damped_oscillation };

struct RelaxationFit {
  RelaxModel model = RelaxModel::pure_decay;
  double gamma = 0.0;
  double omega = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double residual = 0.0;  // rms misfit over rms of the fitted transient
  bool ok = false;
};

// Least-squares fit of A e^{-gamma t} + C or A e^{-gamma t} cos(omega t + phi) + C on
// [t_start, t_end] (default: the whole series).  The linear parameters are projected out.
RelaxationFit measure_relaxation(const std::vector<double>& t, const std::vector<double>& y,
                                 RelaxModel model, double t_start = -1.0, double t_end = -1.0,
                                 double residual_threshold = 1e-2);

// Matrix pencil: complex rates lambda with y_k ~ sum c_j exp(-lambda_j k dt), model order m.
std::vector<std::complex<double>> matrix_pencil(const std::vector<double>& y, double dt, int order);

}  // namespace tcl::fp
