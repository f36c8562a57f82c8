#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dualion/fit.hpp"
#include "dualion/noise.hpp"
#include "dualion/protocols.hpp"

namespace dualion {
namespace {

using namespace levels;
constexpr double kInf = std::numeric_limits<double>::infinity();

ModeSet paper_modes() { return two_ion_transverse_modes(3.15e6, 2.97e6, 0.12e6, 0.024); }

TEST(PulseNoise, NoiselessLimit) {
  NoiseConfig noise;
  noise.coherence_time_411 = kInf;
  noise.coherence_time_3432 = kInf;
  noise.amplitude_jitter_rms = 0.0;
  Rng rng(1);
  for (auto laser : {ConversionLaser::laser411, ConversionLaser::laser3432}) {
    const auto p = sample_pulse_noise(noise, laser, 0.5e-6, rng);
    EXPECT_EQ(p.detuning_offset, 0.0);
    EXPECT_EQ(p.phase_offset, 0.0);
    EXPECT_EQ(p.amplitude_factor, 1.0);
  }
}

TEST(PulseNoise, WidthFromCoherenceTime) {
  const double tau = 230e-6;
  // 1 / (pi tau) in Hz as angular frequency.
  EXPECT_NEAR(detuning_width(tau), 2 * constants::kPi / (constants::kPi * tau), 1e-9);
  EXPECT_EQ(detuning_width(kInf), 0.0);
  EXPECT_THROW(detuning_width(0.0), std::domain_error);
}

TEST(PulseNoise, GaussianStdMatchesWidth) {
  NoiseConfig noise;
  noise.model = LineShape::gaussian_detuning;
  const double width = detuning_width(noise.coherence_time_3432);
  Rng rng = make_stream(11, {2});
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double d = sample_pulse_noise(noise, ConversionLaser::laser3432, 0.39e-6, rng).detuning_offset;
    s += d;
    s2 += d * d;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_NEAR(sd / width, 1.0, 0.02);
}

TEST(PulseNoise, LorentzianHalfWidth) {
  NoiseConfig noise;
  const double half = 0.5 * detuning_width(noise.coherence_time_411);
  Rng rng = make_stream(12, {2});
  const int n = 100000;
  int inside = 0;
  for (int k = 0; k < n; ++k) {
    const double d = sample_pulse_noise(noise, ConversionLaser::laser411, 0.54e-6, rng).detuning_offset;
    if (std::abs(d) < half) ++inside;
  }
  EXPECT_NEAR(static_cast<double>(inside) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(PulseNoise, AmplitudeJitter) {
  NoiseConfig noise;
  noise.amplitude_jitter_rms = 0.01;
  Rng rng = make_stream(13, {2});
  const int n = 100000;
  double s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = sample_pulse_noise(noise, ConversionLaser::laser411, 0.54e-6, rng).amplitude_factor - 1.0;
    s2 += a * a;
  }
  EXPECT_NEAR(std::sqrt(s2 / n) / 0.01, 1.0, 0.02);
}

TEST(PulseNoise, DeterministicGivenStream) {
  NoiseConfig noise;
  Rng a = make_stream(5, {1, 2, 3});
  Rng b = make_stream(5, {1, 2, 3});
  for (int k = 0; k < 10; ++k) {
    const auto pa = sample_pulse_noise(noise, ConversionLaser::laser411, 0.54e-6, a);
    const auto pb = sample_pulse_noise(noise, ConversionLaser::laser411, 0.54e-6, b);
    EXPECT_EQ(pa.detuning_offset, pb.detuning_offset);
    EXPECT_EQ(pa.phase_offset, pb.phase_offset);
  }
}

TEST(PulseNoise, LaserLineshapeAloneGivesSmallPiError) {
  NoiseConfig noise;
  const double err = 1.0 - expected_pi_transfer(0.54e-6, noise.coherence_time_411,
                                                noise.model, {1.0});
  EXPECT_GT(err, 1e-4);
  EXPECT_LT(err, 3e-3);
}

// Monte Carlo one-way and round-trip conversion infidelity with the raw
// physical noise (laser line shapes and thermal 411 nm Rabi spread).
struct ConversionErrors {
  double one_way = 0.0;
  double round_trip = 0.0;
  double f0_to_s0 = 0.0;
};

ConversionErrors simulate(int shots) {
  const ModeSet modes = paper_modes();
  const NoiseConfig noise;
  const std::vector<double> nbar(4, 3.0);
  const auto p411 = dual_tone_411(0.54e-6);
  const auto p3432 = dual_tone_3432(0.39e-6);
  const auto mubs = mub_states();
  ConversionErrors e;
  for (int k = 0; k < shots; ++k) {
    const auto& psi = mubs[k % 6];
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(6);
    amp(0) = psi(0);
    amp(1) = psi(1);
    Eigen::VectorXcd target_f = Eigen::VectorXcd::Zero(6);
    target_f(4) = psi(0);
    target_f(5) = psi(1);
    Rng rng = make_stream(21, {static_cast<std::uint64_t>(k)});
    const auto rho = DensityMatrix::pure(conversion_basis(), amp);
    const auto f = convert_s_to_f(rho, p411, p3432, noise, rng, &modes, &nbar);
    e.one_way += 1.0 - fidelity(f.state, target_f);
    // Population left outside the F-qubit counts as lost.
    double kept = 0.0;
    const auto f_only = embed(restrict_to(f.state, f_qubit_basis(), &kept), conversion_basis());
    const auto back = convert_f_to_s(f_only, p3432, p411, noise, rng, &modes, &nbar);
    e.round_trip += 1.0 - kept * fidelity(back.state, amp);
    const auto f0 = DensityMatrix::from_level(conversion_basis(), kF0);
    e.f0_to_s0 += convert_f_to_s(f0, p3432, p411, noise, rng, &modes, &nbar).state.population(kS0);
  }
  e.one_way /= shots;
  e.round_trip /= shots;
  e.f0_to_s0 /= shots;
  return e;
}

TEST(NoisyConversion, OneWayBandAndRoundTripDoubling) {
  const auto e = simulate(12000);
  EXPECT_GE(e.one_way, 1e-3);
  EXPECT_LE(e.one_way, 1.5e-2);
  EXPECT_NEAR(e.round_trip / e.one_way, 2.0, 0.3);
  EXPECT_GE(e.f0_to_s0, 0.99);
}

TEST(NoisyConversion, ExpectationMatchesMonteCarlo) {
  ConversionSettings s;
  s.target_round_trip_infidelity = 0.0;
  const auto e = simulate(12000);
  const double expected = expected_one_way_infidelity(s, paper_modes());
  EXPECT_NEAR(e.one_way / expected, 1.0, 0.1);
}

TEST(ThermalFactor, UnitAtMean) {
  const auto modes = paper_modes();
  EXPECT_NEAR(thermal_rabi_factor({3, 3, 3, 3}, {3, 3, 3, 3}, modes), 1.0, 1e-15);
  EXPECT_LT(thermal_rabi_factor({10, 3, 3, 3}, {3, 3, 3, 3}, modes), 1.0);
}

TEST(Crosstalk, ZeroRatesGiveIdentity) {
  CrosstalkRates zero{0.0, 0.0, 0.0, kInf};
  for (auto op : {CrosstalkOp::raman_pi2, CrosstalkOp::pump_detect_0, CrosstalkOp::pump_detect_1,
                  CrosstalkOp::cooling}) {
    const Channel c = crosstalk_channel(op, zero, 1e-3);
    EXPECT_EQ(c.strength(), 0.0);
    const auto rho = DensityMatrix::pure(f_qubit_basis(), mub_states()[2]);
    EXPECT_LT((apply_channel(rho, c).matrix() - rho.matrix()).norm(), 1e-15);
  }
}

TEST(Crosstalk, RamanStrength) {
  const CrosstalkRates rates;
  const Channel c = crosstalk_channel(CrosstalkOp::raman_pi2, rates);
  EXPECT_EQ(c.kind(), Channel::Kind::dephasing);
  EXPECT_NEAR(c.strength(), 1.5e-5, 1e-18);
  EXPECT_LT(c.completeness_error(), 1e-10);
}

TEST(Crosstalk, CoolingOneMillisecond) {
  const CrosstalkRates rates;
  const double eps = crosstalk_infidelity(CrosstalkOp::cooling, rates, 1e-3);
  EXPECT_NEAR(eps, 3.4e-4, 0.15 * 3.4e-4);
  EXPECT_NEAR(eps, 1.0 - std::exp(-1e-3 / 2.9), 1e-15);
}

TEST(Crosstalk, ExcessiveInfidelityThrows) {
  CrosstalkRates rates;
  rates.eps_r = 0.7;
  EXPECT_THROW(crosstalk_channel(CrosstalkOp::raman_pi2, rates), std::domain_error);
  rates.eps_r = -0.1;
  EXPECT_THROW(crosstalk_channel(CrosstalkOp::raman_pi2, rates), std::domain_error);
}

TEST(Crosstalk, ChannelsAreComplete) {
  const CrosstalkRates rates;
  for (auto op : {CrosstalkOp::raman_pi2, CrosstalkOp::pump_detect_0, CrosstalkOp::pump_detect_1}) {
    EXPECT_LT(crosstalk_channel(op, rates).completeness_error(), 1e-10);
  }
  for (double dt : {0.0, 1e-3, 0.1, 1.0}) {
    EXPECT_LT(crosstalk_channel(CrosstalkOp::cooling, rates, dt).completeness_error(), 1e-10);
  }
  EXPECT_THROW(crosstalk_channel(CrosstalkOp::cooling, rates, 10.0), std::domain_error);
}

TEST(Crosstalk, ComposedDecayRecoversRate) {
  const auto mubs = mub_states();
  for (double eps : {1e-5, 1e-4, 1e-3}) {
    CrosstalkRates rates;
    rates.eps_r = eps;
    const Channel c = crosstalk_channel(CrosstalkOp::raman_pi2, rates);
    std::vector<FitPoint> pts;
    std::vector<DensityMatrix> states;
    for (const auto& psi : mubs) states.push_back(DensityMatrix::pure(f_qubit_basis(), psi));
    for (int n = 0; n <= 400; ++n) {
      if (n % 40 == 0) {
        std::array<double, 6> per{};
        for (int k = 0; k < 6; ++k) per[k] = fidelity(states[k], mubs[k]);
        const double avg = average_fidelity_mub(per);
        // Repeated dephasing with p = 3 eps / 2: 2/3 + (1 - 3 eps)^n / 3.
        EXPECT_NEAR(avg, 2.0 / 3.0 + std::pow(1 - 3 * eps, n) / 3.0, 1e-12) << n;
        pts.push_back({static_cast<double>(n), avg, 1e-4});
      }
      for (auto& s : states) s = apply_channel(s, c);
    }
    // The power law matches to first order in n eps; its bias in eps is about n eps.
    const auto fit = fit_power_decay(pts);
    EXPECT_NEAR(fit.param("eps") / eps, 1.0, 0.01 + 400 * eps) << eps;
  }
}

TEST(SpatialCrosstalk, GaussianProfile) {
  EXPECT_EQ(spatial_crosstalk_ratio(4e-6, 0.0), 1.0);
  EXPECT_NEAR(spatial_crosstalk_ratio(4e-6, 14e-6) / std::exp(-24.5), 1.0, 1e-12);
  EXPECT_NEAR(spatial_crosstalk_ratio(4e-6, 14e-6), 2.3e-11, 0.05e-11);
  double prev = 2.0;
  for (double d = 0; d < 20e-6; d += 1e-6) {
    const double r = spatial_crosstalk_ratio(4e-6, d);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_THROW(spatial_crosstalk_ratio(0.0, 1e-6), std::domain_error);
}

}  // namespace
}  // namespace dualion
