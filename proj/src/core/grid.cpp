#include "tcl/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tcl {

Grid1D::Grid1D(double lo, double hi, int n) : x_lo(lo), x_hi(hi), n_cells(n) {
  if (!(lo < hi)) throw std::invalid_argument("grid requires x_lo < x_hi");
  if (n < 1) throw std::invalid_argument("grid requires at least one cell");
}

int Grid1D::cell_of(double x) const {
  const int i = static_cast<int>(std::floor((x - x_lo) / dx()));
  return std::clamp(i, 0, n_cells - 1);
}

int Grid1D::nearest_face(double x) const {
  const int i = static_cast<int>(std::lround((x - x_lo) / dx()));
  return std::clamp(i, 0, n_cells);
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> c(n_cells);
  for (int i = 0; i < n_cells; ++i) c[i] = center(i);
  return c;
}

Grid1D Grid1D::aligned(const TclParams& p, int cells_per_deadband) {
  if (cells_per_deadband < 2) throw std::invalid_argument("need at least two deadband cells");
  const double h = (p.x_up - p.x_down) / cells_per_deadband;
  const double pad = p.kappa > 0.0 ? 6.5 * std::sqrt(p.kappa * p.tau) : 0.0;
  // Faces are laid out from x_down so both thresholds land on faces exactly.
  const int n_left = static_cast<int>(std::ceil((p.x_down - (p.x_minus - pad)) / h - 1e-9));
  const int n_right = static_cast<int>(std::ceil(((p.x_plus + pad) - p.x_up) / h - 1e-9));
  Grid1D g;
  g.n_cells = n_left + cells_per_deadband + n_right;
  g.x_lo = p.x_down - n_left * h;
  g.x_hi = g.x_lo + g.n_cells * h;
  return g;
}

FieldPair::FieldPair(const Grid1D& g, double t)
    : up(g.n_cells, 0.0), down(g.n_cells, 0.0), grid(g), time(t) {}

double FieldPair::up_mass() const { return grid.dx() * std::accumulate(up.begin(), up.end(), 0.0); }

double FieldPair::down_mass() const {
  return grid.dx() * std::accumulate(down.begin(), down.end(), 0.0);
}

double FieldPair::mass() const { return up_mass() + down_mass(); }

void FieldPair::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw std::runtime_error("cannot normalize a field with zero mass");
  for (auto& v : up) v /= m;
  for (auto& v : down) v /= m;
}

double FieldPair::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : up) m = std::min(m, v);
  for (double v : down) m = std::min(m, v);
  return m;
}

double l1_distance(const FieldPair& a, const FieldPair& b) {
  if (a.grid.n_cells != b.grid.n_cells || std::abs(a.grid.x_lo - b.grid.x_lo) > 1e-12 ||
      std::abs(a.grid.x_hi - b.grid.x_hi) > 1e-12)
    throw std::invalid_argument("l1_distance: grids differ");
  double s = 0.0;
  for (int i = 0; i < a.grid.n_cells; ++i)
    s += std::abs(a.up[i] - b.up[i]) + std::abs(a.down[i] - b.down[i]);
  return s * a.grid.dx();
}

FieldPair coarsen(const FieldPair& f, const Grid1D& coarse) {
  const double ratio = coarse.dx() / f.grid.dx();
  const int k = static_cast<int>(std::lround(ratio));
  const double offset = (coarse.x_lo - f.grid.x_lo) / f.grid.dx();
  const int o = static_cast<int>(std::lround(offset));
  if (std::abs(ratio - k) > 1e-6 || std::abs(offset - o) > 1e-6 || o < 0 ||
      o + k * coarse.n_cells > f.grid.n_cells)
    throw std::invalid_argument("coarsen: grids are not nested");
  FieldPair c(coarse, f.time);
  for (int j = 0; j < coarse.n_cells; ++j) {
    double su = 0.0, sd = 0.0;
    for (int i = 0; i < k; ++i) {
      su += f.up[o + j * k + i];
      sd += f.down[o + j * k + i];
    }
    c.up[j] = su / k;
    c.down[j] = sd / k;
  }
  return c;
}

}  // namespace tcl
