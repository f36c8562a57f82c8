#include <gtest/gtest.h>

#include <cmath>

#include "../oracles.hpp"
#include "dualion/detection.hpp"

namespace dualion {
namespace {

using namespace levels;

DetectionConfig simple_config() {
  DetectionConfig c;
  c.bright_rate = 10.0;
  c.dark_rate = 0.1;
  c.duration = 1.0;
  c.threshold = 1;
  c.leakage_bright_to_dark = 0.0;
  c.leakage_dark_to_bright = 0.0;
  return c;
}

// Misidentification probability with one exponential flip, by Simpson
// integration over the flip time.
double flip_error(bool bright, const DetectionConfig& c) {
  const double from = bright ? c.bright_rate : c.dark_rate;
  const double to = bright ? c.dark_rate : c.bright_rate;
  const double gamma = bright ? c.leakage_bright_to_dark : c.leakage_dark_to_bright;
  const double tmax = c.duration;
  const auto wrong = [&](double mean) {
    const double below = oracle::poisson_below(mean, c.threshold);
    return bright ? below : 1.0 - below;
  };
  double err = std::exp(-gamma * tmax) * wrong(from * tmax);
  const int n = 20000;
  const double h = tmax / n;
  double integral = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w * gamma * std::exp(-gamma * s) * wrong(from * s + to * (tmax - s));
  }
  return err + integral * h / 3.0;
}

double mc_error(bool bright, const DetectionConfig& c, int shots, std::uint64_t seed) {
  Rng rng = make_stream(seed, {bright ? 1u : 0u});
  int wrong = 0;
  for (int k = 0; k < shots; ++k) {
    if (detect_bright_dark(bright, c, rng).bright != bright) ++wrong;
  }
  return static_cast<double>(wrong) / shots;
}

void expect_binomial(double observed, double p, int shots) {
  const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / shots);
  EXPECT_NEAR(observed, p, 3 * sigma + 1.0 / shots);
}

TEST(Detection, PoissonTailsWithoutLeakage) {
  const auto c = simple_config();
  EXPECT_NEAR(detection_error(true, c), std::exp(-10.0), 1e-15);
  EXPECT_NEAR(detection_error(false, c), 1.0 - std::exp(-0.1), 1e-15);
  EXPECT_NEAR(std::exp(-10.0), 4.54e-5, 0.01e-5);
  EXPECT_NEAR(1.0 - std::exp(-0.1), 9.52e-2, 0.01e-2);
  const int shots = 1000000;
  expect_binomial(mc_error(true, c, shots, 1), std::exp(-10.0), shots);
  expect_binomial(mc_error(false, c, shots, 2), 1.0 - std::exp(-0.1), shots);
}

TEST(Detection, LeakageMatchesFlipOracle) {
  const auto c = direct_s_detection();
  for (bool bright : {true, false}) {
    EXPECT_NEAR(detection_error(bright, c), flip_error(bright, c), 1e-9);
  }
  auto wide = c;
  wide.threshold = 4;
  wide.duration = 600e-6;
  for (bool bright : {true, false}) {
    EXPECT_NEAR(detection_error(bright, wide), flip_error(bright, wide), 1e-9);
  }
}

TEST(Detection, MonteCarloConvergesToAnalytic) {
  const auto c = direct_s_detection();
  const int shots = 1000000;
  expect_binomial(mc_error(true, c, shots, 3), detection_error(true, c), shots);
  expect_binomial(mc_error(false, c, shots, 4), detection_error(false, c), shots);
}

TEST(Detection, PerfectDiscrimination) {
  DetectionConfig c = simple_config();
  c.dark_rate = 0.0;
  c.bright_rate = 100.0;
  EXPECT_NEAR(detection_fidelity(c), 1.0, 1e-40);
}

TEST(Detection, DirectDefaultsNear983) {
  const auto c = direct_s_detection();
  EXPECT_NEAR(detection_fidelity(c), 0.983, 0.002);
  const int shots = 100000;
  const double mc = 1.0 - 0.5 * (mc_error(true, c, shots, 5) + mc_error(false, c, shots, 6));
  EXPECT_NEAR(mc, 0.983, 0.002);
}

TEST(Detection, InvalidConfig) {
  DetectionConfig c;
  c.threshold = 0;
  EXPECT_THROW(detection_fidelity(c), std::domain_error);
  c = DetectionConfig{};
  c.duration = 0.0;
  EXPECT_THROW(detection_fidelity(c), std::domain_error);
}

double mc_shelve_f(double pump, const DetectionConfig& det, int shots, std::uint64_t seed) {
  const auto s0 = DensityMatrix::from_level(f_qubit_basis(), kF0);
  const auto s1 = DensityMatrix::from_level(f_qubit_basis(), kF1);
  Rng rng = make_stream(seed, {7});
  int wrong = 0;
  for (int k = 0; k < shots; ++k) {
    if (!shelve_detect_f(s0, pump, det, rng).bright) ++wrong;
    if (shelve_detect_f(s1, pump, det, rng).bright) ++wrong;
  }
  return 1.0 - 0.5 * wrong / shots;
}

double mc_shelve_s(const std::vector<double>& chain, const DetectionConfig& det, int shots,
                   std::uint64_t seed) {
  const auto s0 = DensityMatrix::from_level(s_qubit_basis(), kS0);
  const auto s1 = DensityMatrix::from_level(s_qubit_basis(), kS1);
  Rng rng = make_stream(seed, {8});
  int wrong = 0;
  for (int k = 0; k < shots; ++k) {
    if (shelve_detect_s(s0, chain, det, rng).bright) ++wrong;
    if (!shelve_detect_s(s1, chain, det, rng).bright) ++wrong;
  }
  return 1.0 - 0.5 * wrong / shots;
}

TEST(ShelveF, DarkStateStaysDark) {
  DetectionConfig det = shelved_detection_short();
  const auto s1 = DensityMatrix::from_level(f_qubit_basis(), kF1);
  Rng rng(9);
  int bright = 0;
  const int shots = 100000;
  for (int k = 0; k < shots; ++k) bright += shelve_detect_f(s1, 1.0, det, rng).bright;
  const double tail = 1.0 - oracle::poisson_below(det.dark_rate * det.duration, det.threshold);
  expect_binomial(static_cast<double>(bright) / shots, tail, shots);
}

TEST(ShelveF, DefaultsShortWindow) {
  const double analytic = shelve_f_fidelity(kDefaultPumpSuccess, shelved_detection_short());
  EXPECT_NEAR(analytic, 0.9986, 0.0005);
  EXPECT_NEAR(mc_shelve_f(kDefaultPumpSuccess, shelved_detection_short(), 100000, 10), 0.9986,
              0.0005);
}

TEST(ShelveF, ExtendedWindow) {
  EXPECT_GE(shelve_f_fidelity(kDefaultPumpSuccess, shelved_detection_extended()), 0.9995);
  EXPECT_GE(mc_shelve_f(kDefaultPumpSuccess, shelved_detection_extended(), 100000, 11), 0.9995);
}

TEST(ShelveF, MonotoneInPumpAndSeparation) {
  const auto det = shelved_detection_short();
  double prev = 0.0;
  for (double pump = 0.9; pump <= 1.0; pump += 0.01) {
    const double f = shelve_f_fidelity(pump, det);
    EXPECT_GE(f, prev);
    prev = f;
  }
  prev = 0.0;
  for (double rb = 1e3; rb <= 1e5; rb *= 1.5) {
    auto d = det;
    d.bright_rate = rb;
    const double f = shelve_f_fidelity(kDefaultPumpSuccess, d);
    EXPECT_GE(f, prev - 1e-15);
    prev = f;
  }
}

TEST(ShelveS, IdealIsPerfect) {
  DetectionConfig det = shelved_detection_short();
  det.dark_rate = 0.0;
  det.bright_rate = 1e7;
  EXPECT_NEAR(shelve_s_fidelity({1.0, 1.0}, det), 1.0, 1e-12);
}

TEST(ShelveS, Defaults) {
  const double analytic = shelve_s_fidelity(kDefaultTransferChain, shelved_detection_extended());
  EXPECT_NEAR(analytic, 0.9991, 0.0002);
  EXPECT_NEAR(mc_shelve_s(kDefaultTransferChain, shelved_detection_extended(), 100000, 12),
              0.9991, 0.001);
}

TEST(ShelveS, ChainBeatsSinglePulse) {
  const auto det = shelved_detection_extended();
  const double single = shelve_s_fidelity({kDefaultTransferChain.front()}, det);
  const double chain = shelve_s_fidelity(kDefaultTransferChain, det);
  EXPECT_LT(single, chain);
}

TEST(OpticalPump, Examples) {
  const auto s0 = DensityMatrix::from_level(s_qubit_basis(), kS0);
  EXPECT_LT((optical_pump_to_0(s0, 3, 0.01).matrix() - s0.matrix()).norm(), 1e-15);
  const auto s1 = DensityMatrix::from_level(s_qubit_basis(), kS1);
  EXPECT_NEAR(optical_pump_to_0(s1, 1, 0.0).population(kS0), 1.0, 1e-15);
  for (int c = 0; c <= 5; ++c) {
    const auto out = optical_pump_to_0(s1, c, 0.1);
    EXPECT_NEAR(out.population(kS1), std::pow(0.1, c), 1e-15);
    EXPECT_NEAR(out.trace(), 1.0, 1e-15);
  }
}

}  // namespace
}  // namespace dualion
