#include <cmath>
#include <numbers>
#include <sstream>

#include "tcl/specfun.hpp"

namespace tcl::specfun {
namespace {

double talbot_n(const ComplexFn& F, double t, int n) {
  // s(theta) = n/t * (-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta)
  constexpr double a = 0.5017, b = 0.6407, c = 0.6122, d = 0.2645;
  cplx acc(0.0, 0.0);
  const double h = 2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) {
    const double th = -std::numbers::pi + (k + 0.5) * h;
    const double cot = std::cos(b * th) / std::sin(b * th);
    const double sn = std::sin(b * th);
    const cplx s = (n / t) * cplx(-c + a * th * cot, d * th);
    const cplx ds = (n / t) * cplx(a * cot - a * b * th / (sn * sn), d);
    acc += std::exp(s * t) * F(s) * ds;
  }
  return (acc * h / cplx(0.0, 2.0 * std::numbers::pi)).real();
}

}  // namespace

double inverse_laplace_talbot(const ComplexFn& F, double t, const InversionOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("inverse_laplace_talbot: t must be positive");
  // Node counts grow by factors 3/2 and 4/3 alternately: 16, 24, 32, 48, 64, 96, ...
  auto next = [](int n) { return (n & (n - 1)) == 0 ? n + n / 2 : n + n / 3; };
  double prev = talbot_n(F, t, opt.talbot_start);
  double diff = 0.0;
  for (int n = next(opt.talbot_start); n <= opt.talbot_max; n = next(n)) {
    const double cur = talbot_n(F, t, n);
    diff = std::abs(cur - prev);
    if (diff <= opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  if (diff <= std::max(opt.tol, 1e-7) * std::max(1.0, std::abs(prev))) return prev;
  std::ostringstream msg;
  msg << "inverse_laplace_talbot: successive contour refinements differ by " << diff << " at t=" << t;
  throw std::runtime_error(msg.str());
}

double inverse_laplace_bromwich(const ComplexFn& F, double t, const InversionOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("inverse_laplace_bromwich: t must be positive");
  const double shift = std::max(opt.abscissa, 0.0);
  const double A = opt.euler_a;
  const int n = opt.euler_terms;
  const int m = opt.euler_binomial;
  const double x = A / (2.0 * t);
  const double y = std::numbers::pi / t;
  auto term = [&](int k) { return F(cplx(x + shift, k * y)).real(); };
  std::vector<double> partial(n + m + 1);
  double sum = 0.5 * term(0);
  for (int k = 1; k <= n + m; ++k) {
    sum += (k % 2 == 0 ? 1.0 : -1.0) * term(k);
    partial[k] = sum;
  }
  // Binomial (Euler) average of the last m+1 partial sums.
  double avg = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    avg += binom * partial[n + j];
    binom *= double(m - j) / (j + 1);
  }
  avg *= std::pow(2.0, -m);
  const double result = std::exp(A / 2.0 + shift * t) / t * avg;
  if (!std::isfinite(result)) throw std::runtime_error("inverse_laplace_bromwich: non-finite result");
  return result;
}

double inverse_laplace_residues(const std::vector<PoleResidue>& poles, double t) {
  cplx acc(0.0, 0.0);
  for (const auto& p : poles) acc += p.residue * std::exp(p.pole * t);
  return acc.real();
}

double inverse_laplace(const ComplexFn& F, double t, InversionMethod method,
                       const InversionOptions& opt, const std::vector<PoleResidue>& poles) {
  switch (method) {
    case InversionMethod::talbot:
      return inverse_laplace_talbot(F, t, opt);
    case InversionMethod::bromwich_sum:
      return inverse_laplace_bromwich(F, t, opt);
    case InversionMethod::residue_sum:
      if (poles.empty()) throw std::invalid_argument("inverse_laplace: residue_sum needs poles");
      return inverse_laplace_residues(poles, t);
  }
  throw std::invalid_argument("inverse_laplace: unknown method");
}

}  // namespace tcl::specfun
