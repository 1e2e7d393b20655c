#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tcl/fp.hpp"

namespace tcl::fp {
namespace {

using Solver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

void factor(Solver& lu, const SparseMatrix& m) {
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("fp: sparse LU factorization failed: " + lu.lastErrorMessage());
}

SparseMatrix shifted_identity(const SparseMatrix& a, double c) {
  SparseMatrix id(a.rows(), a.cols());
  id.setIdentity();
  SparseMatrix m = id - c * a;
  m.makeCompressed();
  return m;
}

// Rates whose time integrals are tracked during the evolution.
struct Rates {
  double flux_up, flux_down, gain_up, gain_down, loss_up, loss_down;
};

Rates rates(const FpOperator& op, const Vector& v) {
  const int n = op.n();
  const double h = op.grid.dx();
  const Vector g = op.transfer * v;
  const Vector l = op.exit_rate.cwiseProduct(v);
  return {op.flux_up(v),          op.flux_down(v),          h * g.head(n).sum(), h * g.tail(n).sum(),
          h * l.head(n).sum(),    h * l.tail(n).sum()};
}

struct Accumulator {
  double cur = 0.0, prev = 0.0;
  // Same quadrature as the time stepper: BE (w = 1, bdf2 = false) or BDF2.
  void step(double q, double dt, bool bdf2) {
    const double next = bdf2 ? (4.0 * cur - prev) / 3.0 + 2.0 / 3.0 * dt * q : cur + dt * q;
    prev = cur;
    cur = next;
  }
};

}  // namespace

Evolution evolve(const FpOperator& op, const FieldPair& init, const EvolveOptions& opt) {
  if (!(opt.dt > 0.0) || opt.n_steps < 0) throw std::invalid_argument("evolve: dt > 0 and n_steps >= 0 required");
  const int n = op.n();
  const double h = op.grid.dx();
  Vector cur = op.pack(init);
  for (int i = 0; i < op.size(); ++i) {
    if (op.active[i]) continue;
    if (std::abs(cur[i]) > 1e-14) throw std::invalid_argument("evolve: initial mass outside the support of the model");
    cur[i] = 0.0;
  }
  const double m0 = h * cur.sum();

  Solver be, bdf;
  factor(be, shifted_identity(op.A, opt.dt));
  const bool use_bdf2 = opt.scheme == Scheme::bdf2 && opt.n_steps > 1;
  if (use_bdf2) factor(bdf, shifted_identity(op.A, 2.0 / 3.0 * opt.dt));

  Evolution ev;
  ev.frames.push_back(op.unpack(cur, init.time));
  auto record = [&](const Vector& v, double t) {
    ev.t.push_back(t);
    ev.on_fraction.push_back(h * v.head(n).sum());
    ev.flux_up.push_back(op.flux_up(v));
    ev.flux_down.push_back(op.flux_down(v));
  };
  record(cur, init.time);

  Accumulator abs_up, abs_dn, g_up, g_dn, l_up, l_dn;
  Vector prev = cur;
  for (int step = 0; step < opt.n_steps; ++step) {
    const bool second = use_bdf2 && step > 0;
    Vector next = second ? Vector(bdf.solve((4.0 * cur - prev) / 3.0)) : Vector(be.solve(cur));
    if (be.info() != Eigen::Success || (second && bdf.info() != Eigen::Success))
      throw std::runtime_error("evolve: linear solve failed");

    const double before = next.sum();
    double clipped = 0.0;
    for (int i = 0; i < next.size(); ++i)
      if (next[i] < 0.0) {
        clipped -= next[i];
        next[i] = 0.0;
      }
    if (clipped > 0.0) {
      next *= before / next.sum();
      ev.max_clip = std::max(ev.max_clip, h * clipped);
    }

    const Rates q = rates(op, next);
    abs_up.step(q.flux_up, opt.dt, second);
    abs_dn.step(q.flux_down, opt.dt, second);
    g_up.step(q.gain_up, opt.dt, second);
    g_dn.step(q.gain_down, opt.dt, second);
    l_up.step(q.loss_up, opt.dt, second);
    l_dn.step(q.loss_down, opt.dt, second);

    prev = cur;
    cur = next;
    const double t = init.time + (step + 1) * opt.dt;
    record(cur, t);

    double mass = h * cur.sum();
    if (!op.reinject) mass += abs_up.cur + abs_dn.cur;
    const double err = std::abs(mass - m0);
    ev.max_mass_error = std::max(ev.max_mass_error, err);
    if (err > opt.mass_tol) {
      std::ostringstream msg;
      msg << "evolve: mass drift " << err << " at t = " << t << " exceeds " << opt.mass_tol;
      throw std::runtime_error(msg.str());
    }
    if ((opt.output_every > 0 && (step + 1) % opt.output_every == 0) || step + 1 == opt.n_steps)
      if (ev.frames.back().time != t) ev.frames.push_back(op.unpack(cur, t));
  }
  ev.absorbed_up = abs_up.cur;
  ev.absorbed_down = abs_dn.cur;
  ev.gain_up = g_up.cur;
  ev.gain_down = g_dn.cur;
  ev.loss_up = l_up.cur;
  ev.loss_down = l_dn.cur;
  return ev;
}

Evolution hard_evolve(const TclParams& p, const Grid1D& grid, const FieldPair& init, const EvolveOptions& opt,
                      bool reinject) {
  return evolve(build_hard_operator(p, grid, reinject), init, opt);
}

FieldPair solve_stationary(const FpOperator& op) {
  if (op.hard && !op.reinject) throw std::invalid_argument("solve_stationary: no stationary state without reinjection");
  const double h = op.grid.dx();
  std::vector<int> index(op.size(), -1), active;
  for (int i = 0; i < op.size(); ++i)
    if (op.active[i]) {
      index[i] = static_cast<int>(active.size());
      active.push_back(i);
    }
  const int m = static_cast<int>(active.size());
  // Replace the last equation by the normalization h * sum(P) = 1.
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < op.A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.A, k); it; ++it) {
      const int r = index[it.row()], c = index[it.col()];
      if (r < 0 || c < 0 || r == m - 1) continue;
      trip.emplace_back(r, c, it.value());
    }
  for (int c = 0; c < m; ++c) trip.emplace_back(m - 1, c, h);
  SparseMatrix b(m, m);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  Solver lu;
  factor(lu, b);
  Vector rhs = Vector::Zero(m);
  rhs[m - 1] = 1.0;
  Vector x = lu.solve(rhs);
  x += lu.solve(rhs - b * x);  // one refinement sweep
  if (lu.info() != Eigen::Success || !x.allFinite()) throw std::runtime_error("solve_stationary: null-space solve failed");

  Vector full = Vector::Zero(op.size());
  for (int k = 0; k < m; ++k) full[active[k]] = std::max(x[k], 0.0);
  full /= h * full.sum();
  const double scale = op.A.diagonal().cwiseAbs().maxCoeff();
  const double res = h * (op.A * full).cwiseAbs().sum();
  if (!(res <= 1e-8 * scale)) {
    std::ostringstream msg;
    msg << "solve_stationary: residual " << res << " too large";
    throw std::runtime_error(msg.str());
  }
  return op.unpack(full);
}

FieldPair gaussian_initial(const Grid1D& grid, double x0, double width, double up_fraction) {
  if (!(width > 0.0) || up_fraction < 0.0 || up_fraction > 1.0)
    throw std::invalid_argument("gaussian_initial: width > 0 and up_fraction in [0, 1] required");
  FieldPair f(grid);
  const double h = grid.dx(), s = width * std::sqrt(2.0);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double w = 0.5 * (std::erf((grid.face(i + 1) - x0) / s) - std::erf((grid.face(i) - x0) / s)) / h;
    f.up[i] = up_fraction * w;
    f.down[i] = (1.0 - up_fraction) * w;
  }
  const double m = f.mass();
  for (auto& v : f.up) v /= m;
  for (auto& v : f.down) v /= m;
  return f;
}

FieldPair face_initial(const Grid1D& grid, double x, SwitchState s) {
  const int k = grid.nearest_face(x);
  if (k < 1 || k > grid.n_cells - 1) throw std::invalid_argument("face_initial: face must be interior");
  FieldPair f(grid);
  auto& v = s == SwitchState::Up ? f.up : f.down;
  v[k - 1] = v[k] = 0.5 / grid.dx();
  return f;
}

std::vector<std::complex<double>> dense_spectrum(const FpOperator& op) {
  std::vector<int> active;
  for (int i = 0; i < op.size(); ++i)
    if (op.active[i]) active.push_back(i);
  if (active.size() > 3000) throw std::invalid_argument("dense_spectrum: operator too large");
  const Eigen::MatrixXd full = Eigen::MatrixXd(op.A);
  Eigen::MatrixXd a(active.size(), active.size());
  for (std::size_t r = 0; r < active.size(); ++r)
    for (std::size_t c = 0; c < active.size(); ++c) a(r, c) = full(active[r], active[c]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: eigen solver failed");
  std::vector<std::complex<double>> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(-es.eigenvalues()[i]);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (std::abs(a.real() - b.real()) > 1e-9 * (1.0 + std::abs(a.real()))) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace tcl::fp
