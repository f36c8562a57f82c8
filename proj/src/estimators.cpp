#include "dualion/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualion/atom_model.hpp"

namespace dualion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t index_of(const FitResult& fit, const std::string& name) {
  const auto it = std::find(fit.names.begin(), fit.names.end(), name);
  if (it == fit.names.end()) throw std::out_of_range("fit has no parameter " + name);
  return static_cast<std::size_t>(it - fit.names.begin());
}

void check_points(const std::vector<FitPoint>& points, std::size_t min_count) {
  if (points.size() < min_count) {
    throw std::invalid_argument("need at least " + std::to_string(min_count) + " points to fit");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.sigma > 0.0)) {
      throw std::invalid_argument("fit points need finite values and stderr > 0");
    }
  }
  std::vector<double> xs;
  for (const auto& p : points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw std::invalid_argument("fit abscissae must be distinct");
  }
}

std::vector<FitPoint> sorted(std::vector<FitPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
  return points;
}

using Model = std::function<ModelEval(double, const Eigen::VectorXd&)>;

// Fits the parameters flagged in `free`; the others stay at x0.
LmResult run_lm(const std::vector<FitPoint>& points, const Model& model, const Eigen::VectorXd& x0,
                const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                const std::vector<bool>& free, const LmOptions& options) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i]) idx.push_back(static_cast<Eigen::Index>(i));
  }
  const auto k = static_cast<Eigen::Index>(idx.size());
  const auto expand = [&](const Eigen::VectorXd& sub) {
    Eigen::VectorXd full = x0;
    for (Eigen::Index i = 0; i < k; ++i) full(idx[i]) = sub(i);
    return full;
  };
  LmProblem problem;
  problem.lower.resize(k);
  problem.upper.resize(k);
  Eigen::VectorXd start(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    problem.lower(i) = lower(idx[i]);
    problem.upper(i) = upper(idx[i]);
    start(i) = x0(idx[i]);
  }
  problem.residuals = [&](const Eigen::VectorXd& sub, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const Eigen::VectorXd full = expand(sub);
    const auto n = static_cast<Eigen::Index>(points.size());
    r.resize(n);
    if (jac) jac->resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pt = points[static_cast<std::size_t>(i)];
      const ModelEval e = model(pt.x, full);
      r(i) = (e.value - pt.y) / pt.sigma;
      if (jac) {
        for (Eigen::Index j = 0; j < k; ++j) (*jac)(i, j) = e.gradient(idx[j]) / pt.sigma;
      }
    }
  };
  LmResult sub = levenberg_marquardt(problem, start, options);
  LmResult full;
  full.params = expand(sub.params);
  full.stderrs = Eigen::VectorXd::Zero(x0.size());
  for (Eigen::Index i = 0; i < k; ++i) full.stderrs(idx[i]) = sub.stderrs(i);
  full.rss = sub.rss;
  full.iterations = sub.iterations;
  full.converged = sub.converged;
  return full;
}

FitResult to_result(const std::string& model, std::vector<std::string> names, const LmResult& lm) {
  FitResult out;
  out.model = model;
  out.names = std::move(names);
  out.params.assign(lm.params.data(), lm.params.data() + lm.params.size());
  out.stderrs.assign(lm.stderrs.data(), lm.stderrs.data() + lm.stderrs.size());
  out.residual_rss = lm.rss;
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  return out;
}

// Weighted least squares of log(y) against x: returns (intercept, slope).
std::pair<double, double> log_linear(const std::vector<FitPoint>& points, double offset) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double v = p.y - offset;
    if (!(v > 0.0)) continue;
    const double w = (v / p.sigma) * (v / p.sigma);
    const double ly = std::log(v);
    sw += w;
    sx += w * p.x;
    sy += w * ly;
    sxx += w * p.x * p.x;
    sxy += w * p.x * ly;
  }
  if (sw == 0.0) return {std::log(std::max(points.front().y - offset, 1e-6)), 0.0};
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) return {sy / sw, 0.0};
  const double slope = (sw * sxy - sx * sy) / det;
  return {(sy - slope * sx) / sw, slope};
}

}  // namespace

double FitResult::param(const std::string& name) const { return params[index_of(*this, name)]; }

double FitResult::param_stderr(const std::string& name) const {
  return stderrs[index_of(*this, name)];
}

ModelEval eval_power_decay(double n, const Eigen::VectorXd& p) {
  const double f0 = p(0), eps = p(1);
  const double base = std::pow(1.0 - eps, n);
  ModelEval e;
  e.value = f0 * base;
  e.gradient.resize(2);
  e.gradient(0) = base;
  e.gradient(1) = n == 0.0 ? 0.0 : -f0 * n * std::pow(1.0 - eps, n - 1.0);
  return e;
}

ModelEval eval_exp_decay(double t, const Eigen::VectorXd& p) {
  const double decay = std::exp(-p(1) * t);
  ModelEval e;
  e.value = p(0) * decay;
  e.gradient.resize(2);
  e.gradient(0) = decay;
  e.gradient(1) = -p(0) * t * decay;
  return e;
}

ModelEval eval_rb(double m, const Eigen::VectorXd& p) {
  const double a = p(0), b = p(1), q = p(2);
  const double pm = std::pow(q, m);
  ModelEval e;
  e.value = a * pm + b;
  e.gradient.resize(3);
  e.gradient(0) = pm;
  e.gradient(1) = 1.0;
  e.gradient(2) = m == 0.0 ? 0.0 : a * m * std::pow(q, m - 1.0);
  return e;
}

ModelEval eval_thermal(double t, const Eigen::VectorXd& p, const ModeSet& modes) {
  const SignalGradient g = thermal_carrier_signal_gradient(t, p(0), p(1), modes);
  ModelEval e;
  e.value = g.value;
  e.gradient.resize(2);
  e.gradient(0) = g.d_omega0;
  e.gradient(1) = g.d_temperature;
  return e;
}

ResidualFn model_residuals(const std::vector<FitPoint>& points, const Model& model) {
  return [points, model](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const auto n = static_cast<Eigen::Index>(points.size());
    r.resize(n);
    if (jac) jac->resize(n, x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pt = points[static_cast<std::size_t>(i)];
      const ModelEval e = model(pt.x, x);
      r(i) = (e.value - pt.y) / pt.sigma;
      if (jac) jac->row(i) = e.gradient.transpose() / pt.sigma;
    }
  };
}

FitResult fit_power_decay(const std::vector<FitPoint>& input, const LmOptions& options) {
  check_points(input, 3);
  const auto points = sorted(input);
  const auto [a, b] = log_linear(points, 0.0);
  Eigen::Vector2d x0(std::clamp(std::exp(a), 1e-6, 1.05),
                     std::clamp(-std::expm1(b), 0.0, 0.999));
  const Eigen::Vector2d lower(0.0, 0.0);
  const Eigen::Vector2d upper(1.05, 1.0 - 1e-12);
  const auto lm = run_lm(points, eval_power_decay, x0, lower, upper, {true, true}, options);
  return to_result("power_decay", {"F0", "eps"}, lm);
}

FitResult fit_exp_decay(const std::vector<FitPoint>& input, const LmOptions& options) {
  check_points(input, 3);
  const auto points = sorted(input);
  const auto [a, b] = log_linear(points, 0.0);
  Eigen::Vector2d x0(std::clamp(std::exp(a), 1e-6, 1.05), std::max(-b, 0.0));
  const Eigen::Vector2d lower(0.0, 0.0);
  const Eigen::Vector2d upper(1.05, kInf);
  const auto lm = run_lm(points, eval_exp_decay, x0, lower, upper, {true, true}, options);
  FitResult out = to_result("exp_decay", {"F0", "rate"}, lm);
  const double rate = out.params[1];
  out.derived["Tc"] = rate > 0.0 ? 1.0 / rate : kInf;
  out.derived["Tc_stderr"] = rate > 0.0 ? out.stderrs[1] / (rate * rate) : kInf;
  return out;
}

FitResult fit_rb(const std::vector<FitPoint>& input, const RbFitOptions& options) {
  check_points(input, 3);
  const auto points = sorted(input);
  const double b0 = options.fix_b ? options.b : 0.5;
  const auto [a, slope] = log_linear(points, b0);
  Eigen::Vector3d x0(std::clamp(std::exp(a), 1e-3, 1.0), b0, std::clamp(std::exp(slope), 0.0, 1.0));
  const Eigen::Vector3d lower(0.0, 0.0, 0.0);
  const Eigen::Vector3d upper(1.0, 1.0, 1.0);
  const auto lm = run_lm(points, eval_rb, x0, lower, upper, {true, !options.fix_b, true},
                         options.lm);
  FitResult out = to_result("rb", {"A", "B", "p"}, lm);
  out.derived["avg_gate_fidelity"] = 0.5 * (1.0 + out.params[2]);
  out.derived["avg_gate_fidelity_stderr"] = 0.5 * out.stderrs[2];
  out.derived["depolarizing_p"] = 1.0 - out.params[2];
  return out;
}

namespace {

double linear_shift(double temperature, const ModeSet& modes) {
  double s = 1.0;
  for (const auto& m : modes.modes) {
    s -= (mean_occupation(m.omega, temperature) + 0.5) * m.eta * m.eta;
  }
  return s;
}

// |f(t)| of the closed-form signal, which falls monotonically with T.
double envelope(double t, double omega0, double temperature, const ModeSet& modes) {
  double mag = 1.0;
  for (const auto& m : modes.modes) {
    const double n = mean_occupation(m.omega, temperature);
    mag /= std::abs(std::complex<double>(n + 1.0, 0.0) -
                    n * std::polar(1.0, -m.eta * m.eta * omega0 * t));
  }
  return mag;
}

double signal_rss(const std::vector<FitPoint>& points, double omega0,
                  const std::vector<double>& nbar, const ModeSet& modes) {
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = (thermal_carrier_signal(p.x, omega0, nbar, modes) - p.y) / p.sigma;
    rss += r * r;
  }
  return rss;
}

// Best Omega0 on a grid fine enough to keep the phase error over the trace
// below an eighth of a period, at fixed occupations.
double profile_omega0(const std::vector<FitPoint>& points, double w_lo, double w_hi,
                      const std::vector<double>& nbar, const ModeSet& modes) {
  const double span = points.back().x - points.front().x;
  const double step = constants::kTwoPi / (8.0 * span);
  double best_w = w_lo, best = kInf;
  for (double w = w_lo; w <= w_hi; w += step) {
    const double rss = signal_rss(points, w, nbar, modes);
    if (rss < best) {
      best = rss;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace

FitResult fit_thermal_rabi(const std::vector<FitPoint>& input, const ModeSet& modes,
                           const ThermalFitOptions& options) {
  modes.validate();
  check_points(input, 8);
  const auto points = sorted(input);
  if (points.front().x < 0.0) throw std::invalid_argument("times must be >= 0");
  const double span = points.back().x - points.front().x;
  double min_dt = kInf;
  for (std::size_t i = 1; i < points.size(); ++i) {
    min_dt = std::min(min_dt, points[i].x - points[i - 1].x);
  }
  // Scan from half a period over the trace up to the sampling limit.
  const double w_lo = 0.5 * constants::kTwoPi / span;
  const double w_hi = constants::kPi / min_dt;

  std::vector<double> starts;
  const double g_lo = std::log(0.1e-3), g_hi = std::log(100e-3);
  for (int i = 0; i < options.grid_points; ++i) {
    const double f = options.grid_points > 1 ? double(i) / (options.grid_points - 1) : 0.0;
    starts.push_back(std::exp(g_lo + f * (g_hi - g_lo)));
  }
  {
    // Envelope start: the temperature whose closed-form contrast at the end
    // of the trace matches the observed one.
    const std::vector<double> cold(modes.size(), 0.0);
    const double w_cold = profile_omega0(points, w_lo, w_hi, cold, modes);
    const double t_end = points.back().x;
    const double window = constants::kTwoPi / w_cold;
    double amp = 0.0;
    for (const auto& p : points) {
      if (p.x >= t_end - window) amp = std::max(amp, std::abs(2.0 * p.y - 1.0));
    }
    double lo = std::log(options.t_min), hi = std::log(options.t_max);
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double temp = std::exp(mid);
      if (envelope(t_end, w_cold / linear_shift(temp, modes), temp, modes) > amp) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    starts.push_back(std::exp(0.5 * (lo + hi)));
  }

  // Internal units: Omega0 / w_ref and T in mK.
  constexpr double kMilli = 1e-3;
  const double w_ref = w_hi;
  const auto model = [&](double t, const Eigen::VectorXd& x) {
    Eigen::Vector2d phys(x(0) * w_ref, x(1) * kMilli);
    ModelEval e = eval_thermal(t, phys, modes);
    e.gradient(0) *= w_ref;
    e.gradient(1) *= kMilli;
    return e;
  };
  const Eigen::Vector2d lower(0.5 * w_lo / w_ref, options.t_min / kMilli);
  const Eigen::Vector2d upper(2.0, options.t_max / kMilli);

  LmResult best;
  bool have = false;
  int total_iterations = 0;
  for (double t0 : starts) {
    const double shift = linear_shift(t0, modes);
    if (!(shift > 0.0)) continue;
    const double w0 =
        profile_omega0(points, w_lo / shift, w_hi / shift, ThermalState::at_temperature(t0).occupations(modes), modes);
    Eigen::Vector2d x0(std::clamp(w0 / w_ref, lower(0), upper(0)),
                       std::clamp(t0 / kMilli, lower(1), upper(1)));
    LmResult r = run_lm(points, model, x0, lower, upper, {true, true}, options.lm);
    total_iterations += r.iterations;
    const bool better = !have || r.rss < best.rss * (1.0 - 1e-12) ||
                        (std::abs(r.rss - best.rss) <= 1e-12 * best.rss &&
                         r.params(1) < best.params(1));
    if (better) {
      best = r;
      have = true;
    }
  }
  if (!have) throw std::domain_error("no valid start for the thermal fit");

  // A cold trace has no curvature in T near zero; move to the bound when the
  // data cannot tell the difference.
  {
    Eigen::VectorXd r;
    Eigen::Vector2d at_floor(best.params(0), lower(1));
    const auto fn = model_residuals(points, model);
    fn(at_floor, r, nullptr);
    if (r.squaredNorm() <= best.rss) {
      best.params = at_floor;
      best.rss = r.squaredNorm();
    }
  }

  const double w_fit = best.params(0) * w_ref;
  if (w_fit * linear_shift(best.params(1) * kMilli, modes) * span < 2.0 * constants::kTwoPi) {
    throw std::invalid_argument(
        "trace covers fewer than 2 oscillation periods; Omega0 and T are not identifiable");
  }

  FitResult out;
  out.model = "thermal_rabi";
  out.names = {"Omega0", "T"};
  out.params = {w_fit, best.params(1) * kMilli};
  out.stderrs = {best.stderrs(0) * w_ref, best.stderrs(1) * kMilli};
  out.residual_rss = best.rss;
  out.converged = best.converged;
  out.iterations = total_iterations;
  out.derived["T_mK"] = out.params[1] / kMilli;
  out.derived["T_mK_stderr"] = out.stderrs[1] / kMilli;
  out.derived["Omega0_over_2pi_Hz"] = out.params[0] / constants::kTwoPi;
  return out;
}

double average_fidelity_mub(const std::array<double, 6>& per_state) {
  return std::accumulate(per_state.begin(), per_state.end(), 0.0) / 6.0;
}

}  // namespace dualion
