#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dualion/lm.hpp"
#include "dualion/motion.hpp"

namespace dualion {

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;
};

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> stderrs;
  double residual_rss = 0.0;
  bool converged = false;
  int iterations = 0;
  std::map<std::string, double> derived;

  double param(const std::string& name) const;
  double param_stderr(const std::string& name) const;
};

// Value and gradient of a model at one abscissa.
struct ModelEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

// F0 (1 - eps)^N; params (F0, eps).
ModelEval eval_power_decay(double n, const Eigen::VectorXd& p);
// F0 exp(-rate t); params (F0, rate = 1/Tc).
ModelEval eval_exp_decay(double t, const Eigen::VectorXd& p);
// A p^m + B; params (A, B, p).
ModelEval eval_rb(double m, const Eigen::VectorXd& p);
// Thermal carrier signal; params (Omega0 rad/s, T K).
ModelEval eval_thermal(double t, const Eigen::VectorXd& p, const ModeSet& modes);

FitResult fit_power_decay(const std::vector<FitPoint>& points, const LmOptions& options = {});
FitResult fit_exp_decay(const std::vector<FitPoint>& points, const LmOptions& options = {});

struct RbFitOptions {
  bool fix_b = true;
  double b = 0.5;
  LmOptions lm;
};
FitResult fit_rb(const std::vector<FitPoint>& points, const RbFitOptions& options = {});

struct ThermalFitOptions {
  double t_min = 1e-4;  // K, search box
  double t_max = 1.0;   // K
  int grid_points = 8;  // log-spaced starts over [0.1, 100] mK
  LmOptions lm;
};
// Throws std::invalid_argument when the trace holds fewer than two periods.
FitResult fit_thermal_rabi(const std::vector<FitPoint>& points, const ModeSet& modes,
                           const ThermalFitOptions& options = {});

double average_fidelity_mub(const std::array<double, 6>& per_state);

// Weighted residual function of a model over points, for Jacobian checks.
ResidualFn model_residuals(const std::vector<FitPoint>& points,
                           const std::function<ModelEval(double, const Eigen::VectorXd&)>& model);

}  // namespace dualion
