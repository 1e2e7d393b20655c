#pragma once

#include "tcl/core.hpp"

namespace tcl::steady {

struct StationarySolution {
  FieldPair field;  // cell averages, normalized on the grid
  double J = 0.0;   // cycling flux per unit ensemble
};

// Pointwise stationary densities of the hard model with diffusion:
//   P_up(x)   = (J/kappa) e^{-(x-x_-)^2/2 kappa tau} * int_{x_down}^{min(x, x_up)} e^{+(x'-x_-)^2/2 kappa tau} dx'
// for x > x_down (zero below), and the mirror image for P_down.
struct HardStationary {
  TclParams params;
  double J = 0.0;
  double up(double x) const;
  double down(double x) const;
};

HardStationary hard_stationary_density(const TclParams& p);

StationarySolution stationary_hard(const TclParams& p, const Grid1D& grid);

// kappa -> 0 limit: P_up = C/(x - x_-), P_down = C/(x_+ - x) on the deadband, C = tau/t_dc.
StationarySolution stationary_diffusionless_hard(const TclParams& p, const Grid1D& grid);

}  // namespace tcl::steady
