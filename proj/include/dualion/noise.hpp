#pragma once

#include "dualion/motion.hpp"
#include "dualion/quantum.hpp"
#include "dualion/rng.hpp"

namespace dualion {

enum class LineShape { gaussian_detuning, lorentzian_detuning };

enum class ConversionLaser { laser411, laser3432 };

// Quasi-static per-shot laser noise. One draw per pulse.
struct NoiseConfig {
  double coherence_time_411 = 230e-6;   // s
  double coherence_time_3432 = 20e-6;   // s
  double amplitude_jitter_rms = 0.0;    // fractional
  LineShape model = LineShape::lorentzian_detuning;

  double coherence_time(ConversionLaser laser) const {
    return laser == ConversionLaser::laser411 ? coherence_time_411 : coherence_time_3432;
  }
  void validate() const;
};

// Line-shape width in rad/s for a coherence time tau: 1/(pi tau) in Hz.
// Lorentzian: full width at half maximum. Gaussian: standard deviation.
// Infinite tau gives zero width.
double detuning_width(double coherence_time);

PulsePerturbation sample_pulse_noise(const NoiseConfig& noise, ConversionLaser laser,
                                     double duration, Rng& rng);

// Debye-Waller spread of the 411 nm Rabi frequency: the ratio of the
// first-order carrier Rabi frequency for a sampled Fock state to its value at
// the mean occupations (where pulses are calibrated).
double thermal_rabi_factor(const FockSample& sample, const std::vector<double>& nbar,
                           const ModeSet& modes);

// Conversion with freshly drawn noise on both pulses. When `modes`/`nbar` are
// given the 411 nm amplitude also carries the thermal Rabi factor.
ConversionResult convert_s_to_f(const DensityMatrix& state, const PulseSpec& pulse411,
                                const PulseSpec& pulse3432, const NoiseConfig& noise, Rng& rng,
                                const ModeSet* modes = nullptr,
                                const std::vector<double>* nbar = nullptr);
ConversionResult convert_f_to_s(const DensityMatrix& state, const PulseSpec& pulse3432,
                                const PulseSpec& pulse411, const NoiseConfig& noise, Rng& rng,
                                const ModeSet* modes = nullptr,
                                const std::vector<double>* nbar = nullptr);

// Measured crosstalk on a spectator F-qubit.
struct CrosstalkRates {
  double eps_r = 1.0e-5;   // per pi/2 Raman pulse
  double eps_0 = 9e-5;     // per |0> cool/pump/detect cycle
  double eps_1 = 1.3e-4;   // per |1> cool/pump/detect cycle
  double t_c = 2.9;        // s, coherence time under the cooling beam

  void validate() const;
};

enum class CrosstalkOp { raman_pi2, pump_detect_0, pump_detect_1, cooling };

// MUB-averaged infidelity per application of `op` (cooling uses duration dt).
double crosstalk_infidelity(CrosstalkOp op, const CrosstalkRates& rates, double dt = 0.0);

// Pure dephasing on the F-qubit with strength p = 3 eps / 2.
Channel crosstalk_channel(CrosstalkOp op, const CrosstalkRates& rates, double dt = 0.0);

// Relative intensity of a Gaussian beam of waist radius w at distance d.
double spatial_crosstalk_ratio(double waist_radius, double separation);

}  // namespace dualion
