#pragma once

#include <functional>
#include <vector>

#include "tcl/core.hpp"
#include "tcl/specfun.hpp"

namespace tcl::cycles {

using specfun::cplx;

// t_out = t + tau*ln(1 + gamma*(1 - e^{-t/tau})) and its exact inverse.
double out_time_forward(double t, double gamma, double tau);
double out_time_inverse(double t_out, double gamma, double tau);

// Density of the time spent outside the deadband during one transition.
double p_out(double t_out, double gamma, double r, double tau);
double p_out_cdf(double t_out, double gamma, double r, double tau);

enum class LaplaceRoute {
  series,     // partial fractions of the Euler-form 2F1, valid for every s off the poles
  quadrature  // direct integral, valid for Re s > -r
};

// F_s for the out-time density; poles at s = -r - k/tau.
cplx laplace_f(cplx s, double gamma, double r, double tau, LaplaceRoute route = LaplaceRoute::series);
cplx laplace_f_prime(cplx s, double gamma, double r, double tau);
// Mean out-time, -F'(0).
double out_time_mean(double gamma, double r, double tau);

// G_s = e^{-s t_dc} F_s(alpha) F_s(beta); soft parameters.
cplx laplace_g(cplx s, const TclParams& p, LaplaceRoute route = LaplaceRoute::series);
cplx laplace_g_prime(cplx s, const TclParams& p);
// Mean duration of one full cycle, -G'(0).
double mean_cycle_time(const TclParams& p);

// Real-axis data of a cycle-time transform, enough for the large-deviation machinery.
struct CycleTransform {
  std::function<double(double)> log_g;   // ln G_s for real s > s_min
  std::function<double(double)> dlog_g;  // d/ds ln G_s
  double s_min;                          // left end of the convergence half-line
  double mean;                           // mean cycle time
  double t_min = 0.0;                    // shortest possible cycle (t_dc for the diffusionless model)
};

CycleTransform soft_cycle_transform(const TclParams& p);

struct CycleLaw {
  TclParams params;
  DerivedGeometry geom;
  double mean_out_alpha;
  double mean_out_beta;
  double mean_cycle;
  std::vector<specfun::Root> poles;  // roots of 1 - G_s, filled by return_probability_poles

  cplx f_alpha(cplx s) const;
  cplx f_beta(cplx s) const;
  cplx g(cplx s) const;
};

CycleLaw make_cycle_law(const TclParams& p);

// Density of the accumulated out-time after n cycles, n >= 1 (the n = 0 term is a
// delta at the origin and is handled by callers).
double p_out_n(double t, int n, const TclParams& p);

struct FluxLaw {
  double t = 0.0;
  std::vector<double> p;  // p[n], n = 0..n_max
  double mean() const;
  double variance() const;
};

// P(n|t) proportional to P_out;n(t - n t_dc): the cycle index of a device observed
// completing a cycle at time t.
FluxLaw cycles_given_time(double t, const TclParams& p, int n_max);

// Distribution of the number of cycles completed by time t (renewal counting law).
FluxLaw cycle_count_law(double t, const TclParams& p, int n_max);

struct LdPoint {
  double omega;
  double S;
  double s_star;
};

// S(omega) = -s* - omega ln G_{s*}, with 1 + omega (ln G)'(s*) = 0.  Throws
// std::domain_error outside (0, 1/t_min).
LdPoint ld_function(double omega, const CycleTransform& ct);
LdPoint ld_function(double omega, const TclParams& p);

enum class ReturnMethod { n_sum, residue_sum, bromwich };

// Smooth part of the density of being back at (x_up, Up) at time t, starting there.
double return_probability(double t, const TclParams& p, ReturnMethod method = ReturnMethod::n_sum);

struct ReturnPoleOptions {
  double re_min = -6.0;
  double im_box = 30.0;   // half-height of the certified search box
  int n_asymptotic = 400; // extra roots from the large-|Im| iteration (per half-plane)
};

// Roots of 1 - G_s with residues of G/(1 - G); conjugate pairs included.
std::vector<specfun::PoleResidue> return_probability_poles(const TclParams& p,
                                                           const ReturnPoleOptions& opt = {});
double return_probability_residues(double t, const TclParams& p,
                                   const std::vector<specfun::PoleResidue>& poles);

// (1/|xdot|) times the Laplace transform of the single-journey arrival-time law at (x, sigma),
// starting from (x_up, Up).  Throws std::domain_error where the transform diverges.
cplx laplace_mode(cplx s, double x, SwitchState sigma, const TclParams& p);

struct FirstPassage {
  std::vector<double> t;
  std::vector<double> p_up;    // absorbed flux at x_down, starting at (x_up, Up)
  std::vector<double> p_down;  // absorbed flux at x_up, starting at (x_down, Down)
  // The same densities from a run with twice the time step, for Richardson extrapolation.
  std::vector<double> p_up_coarse;
  std::vector<double> p_down_coarse;
  double mass_up = 0.0;
  double mass_down = 0.0;
  double mean_up = 0.0;
  double mean_down = 0.0;
  double dt = 0.0;
  double tail_rate = 0.0;  // slowest exponential decay over both densities and both time steps

  // Laplace transforms of the measured densities (trapezoid + Richardson in dt).
  double g_up(double s) const;
  double g_down(double s) const;
  double g(double s) const { return g_up(s) * g_down(s); }
  double g_up_prime(double s) const;
  double g_down_prime(double s) const;
  CycleTransform transform() const;
  // Density of the full cycle time, P_up * P_down on the same time grid.
  std::vector<double> cycle_density() const;
};

// Hard-model first-passage laws from the Fokker-Planck solver with reinjection switched
// off and a discrete delta at the injection point of each level.  Throws
// std::runtime_error when more than 1e-3 of the mass is left unabsorbed at t_end.
FirstPassage hard_first_passage(const TclParams& p, const Grid1D& grid, double dt, double t_end);

}  // namespace tcl::cycles
