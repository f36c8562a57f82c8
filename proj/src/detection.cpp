#include "dualion/detection.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dualion {

void DetectionConfig::validate() const {
  if (!(bright_rate >= 0.0) || !(dark_rate >= 0.0)) {
    throw std::domain_error("detection count rates must be >= 0");
  }
  if (!(duration > 0.0)) throw std::domain_error("detection duration must be > 0");
  if (threshold < 1) throw std::domain_error("detection threshold must be >= 1");
  if (!(leakage_bright_to_dark >= 0.0) || !(leakage_dark_to_bright >= 0.0)) {
    throw std::domain_error("detection leakage rates must be >= 0");
  }
}

namespace {

int poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<int> dist(mean);
  return dist(rng);
}

// P(count < threshold) for a Poisson mean.
double below_threshold(double mean, int threshold) {
  if (mean <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(threshold), mean);
}

}  // namespace

DetectionOutcome detect_bright_dark(bool is_bright, const DetectionConfig& config, Rng& rng) {
  config.validate();
  const double t = config.duration;
  const double rate_now = is_bright ? config.bright_rate : config.dark_rate;
  const double rate_after = is_bright ? config.dark_rate : config.bright_rate;
  const double leak = is_bright ? config.leakage_bright_to_dark : config.leakage_dark_to_bright;
  double mean = rate_now * t;
  if (leak > 0.0) {
    std::exponential_distribution<double> flip(leak);
    const double tau = flip(rng);
    if (tau < t) mean = rate_now * tau + rate_after * (t - tau);
  }
  DetectionOutcome out;
  out.count = poisson(mean, rng);
  out.bright = out.count >= config.threshold;
  return out;
}

double detection_error(bool is_bright, const DetectionConfig& config) {
  config.validate();
  const double t = config.duration;
  const double r1 = is_bright ? config.bright_rate : config.dark_rate;
  const double r2 = is_bright ? config.dark_rate : config.bright_rate;
  const double leak = is_bright ? config.leakage_bright_to_dark : config.leakage_dark_to_bright;
  const auto wrong = [&](double mean) {
    const double below = below_threshold(mean, config.threshold);
    return is_bright ? below : 1.0 - below;
  };
  double err = std::exp(-leak * t) * wrong(r1 * t);
  if (leak > 0.0) {
    const auto integrand = [&](double tau) {
      return leak * std::exp(-leak * tau) * wrong(r1 * tau + r2 * (t - tau));
    };
    err += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t, 15,
                                                                         1e-13);
  }
  return err;
}

double detection_fidelity(const DetectionConfig& config) {
  return 1.0 - 0.5 * (detection_error(true, config) + detection_error(false, config));
}

DetectionConfig direct_s_detection() { return DetectionConfig{}; }

DetectionConfig shelved_detection_short() {
  DetectionConfig c;
  c.bright_rate = 4.0e4;
  c.dark_rate = 241.0;
  c.duration = 250e-6;
  c.threshold = 2;
  c.leakage_bright_to_dark = 0.0;
  c.leakage_dark_to_bright = 0.0;
  return c;
}

DetectionConfig shelved_detection_extended() {
  DetectionConfig c = shelved_detection_short();
  c.duration = 2.5e-3;
  c.threshold = 6;
  return c;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " outside [0, 1]");
}

// Draws one of two levels according to their populations; true for `a`.
bool sample_level(const DensityMatrix& state, const LevelId& a, const LevelId& b,
                  const char* subspace, Rng& rng) {
  const double pa = state.population(a);
  const double pb = state.population(b);
  if (state.trace() - (pa + pb) > 1e-9) {
    throw std::domain_error(std::string("state is not supported on the ") + subspace +
                            " subspace");
  }
  return rng.uniform() * (pa + pb) < pa;
}

double chain_residual(const std::vector<double>& chain) {
  double residual = 1.0;
  for (double p : chain) {
    check_probability(p, "transfer success");
    residual *= 1.0 - p;
  }
  return residual;
}

}  // namespace

DetectionOutcome shelve_detect_f(const DensityMatrix& state, double pump_success,
                                 const DetectionConfig& det, Rng& rng) {
  check_probability(pump_success, "pump success");
  const bool is_zero = sample_level(state, levels::kF0, levels::kF1, "F-qubit", rng);
  const bool pumped = is_zero && rng.uniform() < pump_success;
  return detect_bright_dark(pumped, det, rng);
}

DetectionOutcome shelve_detect_s(const DensityMatrix& state,
                                 const std::vector<double>& transfer_chain_success,
                                 const DetectionConfig& det, Rng& rng) {
  const double residual = chain_residual(transfer_chain_success);
  const bool is_zero = sample_level(state, levels::kS0, levels::kS1, "S-qubit", rng);
  const bool shelved = is_zero && rng.uniform() >= residual;
  return detect_bright_dark(!shelved, det, rng);
}

double shelve_f_fidelity(double pump_success, const DetectionConfig& det) {
  check_probability(pump_success, "pump success");
  const double eb = detection_error(true, det);
  const double ed = detection_error(false, det);
  const double err0 = pump_success * eb + (1.0 - pump_success) * (1.0 - ed);
  return 1.0 - 0.5 * (err0 + ed);
}

double shelve_s_fidelity(const std::vector<double>& transfer_chain_success,
                         const DetectionConfig& det) {
  const double residual = chain_residual(transfer_chain_success);
  const double eb = detection_error(true, det);
  const double ed = detection_error(false, det);
  const double err0 = (1.0 - residual) * ed + residual * (1.0 - eb);
  return 1.0 - 0.5 * (err0 + eb);
}

DensityMatrix optical_pump_to_0(const DensityMatrix& state, int cycles,
                                double residual_per_cycle) {
  if (cycles < 0) throw std::domain_error("pumping cycles must be >= 0");
  check_probability(residual_per_cycle, "pumping residual");
  const std::size_t zero = state.require_index(levels::kS0);
  const std::size_t one = state.require_index(levels::kS1);
  const double left = std::pow(residual_per_cycle, cycles);
  return apply_channel(state, Channel::population_transfer(one, zero, 1.0 - left, state.dim()));
}

}  // namespace dualion
