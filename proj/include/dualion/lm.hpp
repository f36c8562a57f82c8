#pragma once

#include <functional>

#include <Eigen/Dense>

namespace dualion {

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative
};

// Weighted residuals r(x) and, when `jacobian` is non-null, dr/dx.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals,
                       Eigen::MatrixXd* jacobian)>;

struct LmProblem {
  ResidualFn residuals;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd stderrs;  // infinite for directions the data do not constrain
  Eigen::MatrixXd covariance;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Box-constrained Levenberg-Marquardt with Marquardt diagonal scaling. Stops
// when every component of the step is below step_tolerance relative. Bounds
// are enforced by clamping each trial point. Covariance is (J^T J)^-1 of the
// weighted residuals at the solution.
LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd x0,
                             const LmOptions& options = {});

// Central finite-difference Jacobian of a residual function.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                 double rel_step = 1e-6);

}  // namespace dualion
