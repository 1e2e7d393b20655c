#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tcl/fp.hpp"

namespace tcl::fp {
namespace {

// B(x) = x / (e^x - 1)
double bernoulli(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return x / std::expm1(x);
}

struct Builder {
  int n;
  double h;
  std::vector<Eigen::Triplet<double>> a, cross;
  Vector exit;

  Builder(int n_cells, double dx) : n(n_cells), h(dx), exit(Vector::Zero(2 * n_cells)) {}

  // Flux across the face between cells l and r: F = al*P_l - ar*P_r (positive to the right).
  void face(int l, int r, double al, double ar) {
    a.emplace_back(l, l, -al / h);
    a.emplace_back(l, r, ar / h);
    a.emplace_back(r, l, al / h);
    a.emplace_back(r, r, -ar / h);
  }
  // Switching or absorption out of entry `from`, and the matching gain elsewhere.
  void exit_rate(int from, double k) {
    a.emplace_back(from, from, -k);
    exit[from] += k;
  }
  void gain(int to, int from, double k) {
    a.emplace_back(to, from, k);
    cross.emplace_back(to, from, k);
  }
};

// Face coefficients of the drift-diffusion flux for drift v at the face.
std::pair<double, double> face_coefficients(double v, double kappa, double h) {
  if (kappa == 0.0) return {std::max(v, 0.0), std::max(-v, 0.0)};
  const double pe = v * h / kappa;
  return {kappa / h * bernoulli(-pe), kappa / h * bernoulli(pe)};
}

void advect_diffuse(Builder& b, int offset, SwitchState s, const TclParams& p, const Grid1D& g, int first,
                    int last) {
  for (int k = first + 1; k <= last; ++k) {
    const double v = drift(g.face(k), s, p);
    const auto [al, ar] = face_coefficients(v, p.kappa, g.dx());
    b.face(offset + k - 1, offset + k, al, ar);
  }
}

FpOperator finish(Builder& b, const TclParams& p, const Grid1D& g) {
  FpOperator op;
  op.params = p;
  op.grid = g;
  op.A.resize(2 * b.n, 2 * b.n);
  op.A.setFromTriplets(b.a.begin(), b.a.end());
  op.A.makeCompressed();
  op.transfer.resize(2 * b.n, 2 * b.n);
  op.transfer.setFromTriplets(b.cross.begin(), b.cross.end());
  op.exit_rate = b.exit;
  op.active.assign(2 * b.n, 1);
  return op;
}

}  // namespace

Vector FpOperator::pack(const FieldPair& f) const {
  if (f.grid.n_cells != n()) throw std::invalid_argument("FpOperator::pack: grid mismatch");
  Vector v(size());
  for (int i = 0; i < n(); ++i) {
    v[i] = f.up[i];
    v[n() + i] = f.down[i];
  }
  return v;
}

FieldPair FpOperator::unpack(const Vector& v, double t) const {
  FieldPair f(grid, t);
  for (int i = 0; i < n(); ++i) {
    f.up[i] = v[i];
    f.down[i] = v[n() + i];
  }
  return f;
}

double FpOperator::gradient_flux_up(const Vector& v) const {
  return wall_up.cell < 0 ? 0.0 : 2.0 * params.kappa / grid.dx() * v[wall_up.cell];
}

double FpOperator::gradient_flux_down(const Vector& v) const {
  return wall_down.cell < 0 ? 0.0 : 2.0 * params.kappa / grid.dx() * v[wall_down.cell];
}

void check_resolution(const TclParams& p, const Grid1D& grid) {
  if (p.kappa <= 0.0) return;
  const double limit = std::min(std::sqrt(p.kappa * p.tau) / 4.0, (p.x_up - p.x_down) / 100.0);
  if (grid.dx() > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid too coarse: dx = " << grid.dx() << " exceeds min(sqrt(kappa tau)/4, (x_up - x_down)/100) = "
        << limit;
    throw std::invalid_argument(msg.str());
  }
  if (grid.x_lo > p.x_minus || grid.x_hi < p.x_plus)
    throw std::invalid_argument("grid must cover [x_minus, x_plus]");
}

FpOperator build_soft_operator(const TclParams& p, const Grid1D& g, bool check) {
  p.validate();
  if (p.hard) throw std::invalid_argument("build_soft_operator: soft parameters required");
  if (check) check_resolution(p, g);
  const int n = g.n_cells;
  Builder b(n, g.dx());
  advect_diffuse(b, 0, SwitchState::Up, p, g, 0, n - 1);
  advect_diffuse(b, n, SwitchState::Down, p, g, 0, n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = g.center(i);
    if (x < p.x_down) {
      b.exit_rate(i, p.rate);
      b.gain(n + i, i, p.rate);
    }
    if (x > p.x_up) {
      b.exit_rate(n + i, p.rate);
      b.gain(i, n + i, p.rate);
    }
  }
  return finish(b, p, g);
}

FpOperator build_hard_operator(const TclParams& p, const Grid1D& g, bool reinject, bool check) {
  p.validate();
  if (!(p.kappa > 0.0)) throw std::invalid_argument("build_hard_operator: kappa > 0 required");
  if (check) check_resolution(p, g);
  const int n = g.n_cells;
  const double h = g.dx();
  const int kd = g.nearest_face(p.x_down), ku = g.nearest_face(p.x_up);
  if (std::abs(g.face(kd) - p.x_down) > 1e-9 * h || std::abs(g.face(ku) - p.x_up) > 1e-9 * h)
    throw std::invalid_argument("build_hard_operator: thresholds must sit on cell faces (use Grid1D::aligned)");
  if (kd < 1 || ku > n - 1) throw std::invalid_argument("build_hard_operator: grid does not bracket the deadband");

  Builder b(n, h);
  // Up occupies cells kd..n-1, Down occupies cells 0..ku-1.
  advect_diffuse(b, 0, SwitchState::Up, p, g, kd, n - 1);
  advect_diffuse(b, n, SwitchState::Down, p, g, 0, ku - 1);

  // Dirichlet wall half a cell from the adjacent center.
  const double half = 0.5 * h;
  const double v_up = drift(p.x_down, SwitchState::Up, p);
  const double v_dn = drift(p.x_up, SwitchState::Down, p);
  const double rate_up = p.kappa / half * bernoulli(v_up * half / p.kappa);
  const double rate_dn = p.kappa / half * bernoulli(-v_dn * half / p.kappa);

  b.exit_rate(kd, rate_up / h);
  b.exit_rate(n + ku - 1, rate_dn / h);
  if (reinject) {
    b.gain(n + kd - 1, kd, 0.5 * rate_up / h);
    b.gain(n + kd, kd, 0.5 * rate_up / h);
    b.gain(ku - 1, n + ku - 1, 0.5 * rate_dn / h);
    b.gain(ku, n + ku - 1, 0.5 * rate_dn / h);
  }
  FpOperator op = finish(b, p, g);
  for (int i = 0; i < n; ++i) {
    op.active[i] = i >= kd;
    op.active[n + i] = i < ku;
  }
  op.hard = true;
  op.reinject = reinject;
  op.wall_up = {kd, rate_up, p.x_down};
  op.wall_down = {n + ku - 1, rate_dn, p.x_up};
  return op;
}

}  // namespace tcl::fp
