#include "dualion/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualion {

namespace {

constexpr double kLambdaInit = 1e-3;
constexpr double kLambdaMax = 1e16;
constexpr double kSingular = 1e-14;

Eigen::VectorXd clamp_to(const Eigen::VectorXd& x, const LmProblem& p) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

void covariance_from(const Eigen::MatrixXd& jac, LmResult& out) {
  const auto n = jac.cols();
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
  const Eigen::VectorXd w = eig.eigenvalues();
  const Eigen::MatrixXd v = eig.eigenvectors();
  const double cutoff = kSingular * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  out.covariance = Eigen::MatrixXd::Zero(n, n);
  out.stderrs = Eigen::VectorXd::Zero(n);
  std::vector<bool> unconstrained(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (w(k) > cutoff) {
      out.covariance += v.col(k) * v.col(k).transpose() / w(k);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(v(i, k)) > 1e-8) unconstrained[static_cast<std::size_t>(i)] = true;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out.stderrs(i) = unconstrained[static_cast<std::size_t>(i)]
                         ? std::numeric_limits<double>::infinity()
                         : std::sqrt(std::max(out.covariance(i, i), 0.0));
  }
}

}  // namespace

LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd x0,
                             const LmOptions& options) {
  const auto n = x0.size();
  if (problem.lower.size() != n || problem.upper.size() != n) {
    throw std::invalid_argument("bounds do not match the parameter count");
  }
  Eigen::VectorXd x = clamp_to(x0, problem);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  problem.residuals(x, r, &jac);
  double rss = r.squaredNorm();
  if (!std::isfinite(rss)) throw std::domain_error("residuals are not finite at the start point");

  Eigen::VectorXd scale = jac.colwise().norm().transpose();
  double lambda = kLambdaInit;
  LmResult out;
  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    scale = scale.cwiseMax(jac.colwise().norm().transpose());
    const Eigen::VectorXd d2 = scale.cwiseProduct(scale).cwiseMax(1e-300);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (rss == 0.0) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    bool small_step = false;
    while (lambda <= kLambdaMax) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * d2;
      const Eigen::VectorXd delta = a.ldlt().solve(-g);
      const Eigen::VectorXd trial = clamp_to(x + delta, problem);
      const Eigen::VectorXd step = trial - x;
      small_step = (step.array().abs() <=
                    options.step_tolerance * (x.array().abs() + options.step_tolerance))
                       .all();
      Eigen::VectorXd r_trial;
      problem.residuals(trial, r_trial, nullptr);
      const double rss_trial = r_trial.squaredNorm();
      if (std::isfinite(rss_trial) && rss_trial < rss) {
        x = trial;
        problem.residuals(x, r, &jac);
        rss = rss_trial;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      if (small_step) break;
      lambda *= 10.0;
    }
    if (small_step || !accepted) {
      // No improving step above the tolerance remains: a (bounded) minimum.
      out.converged = small_step || lambda > kLambdaMax;
      break;
    }
  }
  out.params = x;
  out.rss = rss;
  out.iterations = it;
  covariance_from(jac, out);
  return out;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                 double rel_step) {
  Eigen::VectorXd r0;
  fn(x, r0, nullptr);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(std::abs(x(k)), 1e-12);
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    Eigen::VectorXd rp, rm;
    fn(xp, rp, nullptr);
    fn(xm, rm, nullptr);
    jac.col(k) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace dualion
