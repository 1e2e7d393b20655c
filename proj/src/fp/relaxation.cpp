#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "tcl/fp.hpp"

namespace tcl::fp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Window {
  VectorXd t, y;
};

MatrixXd basis(const VectorXd& t, RelaxModel model, double gamma, double omega) {
  const int m = static_cast<int>(t.size());
  MatrixXd b(m, model == RelaxModel::pure_decay ? 2 : 3);
  for (int i = 0; i < m; ++i) {
    const double e = std::exp(-gamma * t[i]);
    if (model == RelaxModel::pure_decay) {
      b(i, 0) = e;
      b(i, 1) = 1.0;
    } else {
      b(i, 0) = e * std::cos(omega * t[i]);
      b(i, 1) = e * std::sin(omega * t[i]);
      b(i, 2) = 1.0;
    }
  }
  return b;
}

// Variable projection: residual after solving for the linear coefficients.
struct Projected {
  const Window& w;
  RelaxModel model;

  VectorXd coefficients(const VectorXd& theta) const {
    const MatrixXd b = basis(w.t, model, theta[0], model == RelaxModel::pure_decay ? 0.0 : theta[1]);
    return b.colPivHouseholderQr().solve(w.y);
  }
  VectorXd residual(const VectorXd& theta) const {
    const MatrixXd b = basis(w.t, model, theta[0], model == RelaxModel::pure_decay ? 0.0 : theta[1]);
    return w.y - b * b.colPivHouseholderQr().solve(w.y);
  }
};

struct LmFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = VectorXd;
  using ValueType = VectorXd;
  using JacobianType = MatrixXd;

  const Projected* proj;
  int n_in, n_out;
  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const VectorXd& theta, VectorXd& f) const {
    f = proj->residual(theta);
    return 0;
  }
};

double rss(const Projected& pr, const VectorXd& theta) { return pr.residual(theta).squaredNorm(); }

VectorXd polish(const Projected& pr, VectorXd theta) {
  LmFunctor f{&pr, static_cast<int>(theta.size()), static_cast<int>(pr.w.t.size())};
  Eigen::NumericalDiff<LmFunctor, Eigen::Central> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LmFunctor, Eigen::Central>> lm(nd);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-16;
  lm.parameters.maxfev = 4000;
  lm.minimize(theta);
  return theta;
}

}  // namespace

std::vector<std::complex<double>> matrix_pencil(const std::vector<double>& y_in, double dt, int order) {
  if (order < 1) throw std::invalid_argument("matrix_pencil: order >= 1 required");
  // Keep the SVD small by decimating long series.
  const int stride = std::max<int>(1, static_cast<int>(std::ceil(y_in.size() / 600.0)));
  std::vector<double> y;
  for (std::size_t i = 0; i < y_in.size(); i += stride) y.push_back(y_in[i]);
  const double h = dt * stride;
  const int n = static_cast<int>(y.size());
  const int l = n / 3;
  if (l < order + 1) throw std::invalid_argument("matrix_pencil: series too short for the requested order");
  MatrixXd hank(n - l, l + 1);
  for (int i = 0; i < n - l; ++i)
    for (int j = 0; j <= l; ++j) hank(i, j) = y[i + j];
  Eigen::BDCSVD<MatrixXd> svd(hank, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int m = 0;
  while (m < order && m < sv.size() && sv[m] > 1e-11 * sv[0]) ++m;
  if (m == 0) return {};
  const MatrixXd v = svd.matrixV().leftCols(m);
  const MatrixXd v1 = v.topRows(l), v2 = v.bottomRows(l);
  const MatrixXd pencil = v1.completeOrthogonalDecomposition().solve(v2);
  Eigen::EigenSolver<MatrixXd> es(pencil, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < m; ++i) out.push_back(-std::log(std::complex<double>(es.eigenvalues()[i])) / h);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

RelaxationFit measure_relaxation(const std::vector<double>& t, const std::vector<double>& y, RelaxModel model,
                                 double t_start, double t_end, double residual_threshold) {
  if (t.size() != y.size() || t.size() < 8) throw std::invalid_argument("measure_relaxation: need >= 8 samples");
  if (t_start < 0.0) t_start = t.front();
  if (t_end < 0.0) t_end = t.back();
  std::vector<double> tw, yw;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_start - 1e-12 && t[i] <= t_end + 1e-12) {
      tw.push_back(t[i] - t_start);
      yw.push_back(y[i]);
    }
  const int n_par = model == RelaxModel::pure_decay ? 1 : 2;
  if (tw.size() < 8) throw std::invalid_argument("measure_relaxation: fewer than 8 samples in the window");
  Window w{Eigen::Map<VectorXd>(tw.data(), tw.size()), Eigen::Map<VectorXd>(yw.data(), yw.size())};
  const Projected pr{w, model};
  const double span = tw.back();
  const double dt = tw[1] - tw[0];

  // Starting values: matrix pencil on the window, then a coarse scan as fallback.
  VectorXd best(n_par);
  double best_rss = std::numeric_limits<double>::infinity();
  auto consider = [&](VectorXd theta) {
    if (!(theta[0] > 0.0) || !theta.allFinite()) return;
    const double v = rss(pr, theta);
    if (v < best_rss) {
      best_rss = v;
      best = theta;
    }
  };
  bool uniform = true;
  for (std::size_t i = 1; i < tw.size(); ++i)
    uniform = uniform && std::abs(tw[i] - tw[i - 1] - dt) <= 1e-8 * std::max(1.0, dt);
  if (uniform) {
    try {
      for (const auto& lam : matrix_pencil(yw, dt, model == RelaxModel::pure_decay ? 2 : 3)) {
        VectorXd theta(n_par);
        theta[0] = lam.real();
        if (model == RelaxModel::damped_oscillation) {
          if (std::abs(lam.imag()) < 1e-9) continue;
          theta[1] = std::abs(lam.imag());
        } else if (std::abs(lam.imag()) > 1e-9) {
          continue;
        }
        consider(theta);
      }
    } catch (const std::invalid_argument&) {
    }
  }
  const double g_lo = 0.05 / span, g_hi = 0.5 / std::max(dt, 1e-300);
  for (double g = g_lo; !std::isfinite(best_rss) && g < g_hi; g *= 1.15) {
    if (model == RelaxModel::pure_decay) {
      consider(VectorXd::Constant(1, g));
    } else {
      for (double om = 2.0 / span; om < g_hi; om *= 1.1) {
        VectorXd theta(2);
        theta << g, om;
        consider(theta);
      }
    }
  }
  if (!std::isfinite(best_rss)) throw std::runtime_error("measure_relaxation: no admissible starting point");

  const VectorXd theta = polish(pr, best);
  const VectorXd c = pr.coefficients(theta);
  RelaxationFit fit;
  fit.model = model;
  fit.gamma = theta[0];
  fit.t_start = t_start;
  fit.t_end = t_start + span;
  if (model == RelaxModel::pure_decay) {
    fit.amplitude = c[0];
    fit.offset = c[1];
  } else {
    fit.omega = std::abs(theta[1]);
    const double sin_coef = theta[1] < 0.0 ? -c[1] : c[1];
    fit.amplitude = std::hypot(c[0], sin_coef);
    fit.phase = std::atan2(-sin_coef, c[0]);
    fit.offset = c[2];
  }
  const VectorXd res = pr.residual(theta);
  const double transient = (w.y.array() - fit.offset).matrix().norm();
  fit.residual = transient > 0.0 ? res.norm() / transient : res.norm();
  fit.ok = fit.gamma >= 0.0 && fit.residual <= residual_threshold;
  return fit;
}

}  // namespace tcl::fp
