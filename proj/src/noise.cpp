#include "dualion/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dualion {

void NoiseConfig::validate() const {
  if (!(coherence_time_411 > 0.0) || !(coherence_time_3432 > 0.0)) {
    throw std::domain_error("laser coherence times must be > 0");
  }
  if (!(amplitude_jitter_rms >= 0.0)) throw std::domain_error("amplitude jitter must be >= 0");
}

double detuning_width(double coherence_time) {
  if (!(coherence_time > 0.0)) throw std::domain_error("coherence time must be > 0");
  if (std::isinf(coherence_time)) return 0.0;
  return 2.0 / coherence_time;  // 2 pi * 1 / (pi tau)
}

namespace {

double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

}  // namespace

PulsePerturbation sample_pulse_noise(const NoiseConfig& noise, ConversionLaser laser,
                                     double duration, Rng& rng) {
  if (!(duration > 0.0)) throw std::invalid_argument("pulse duration must be > 0");
  const double tau = noise.coherence_time(laser);
  const double width = detuning_width(tau);
  PulsePerturbation out;
  if (width > 0.0) {
    if (noise.model == LineShape::gaussian_detuning) {
      out.detuning_offset = width * standard_normal(rng);
    } else {
      const double u = rng.uniform();
      out.detuning_offset = 0.5 * width * std::tan(constants::kPi * (u - 0.5));
    }
    // Phase diffusion accumulated over the pulse, variance 2 t / tau.
    out.phase_offset = std::sqrt(2.0 * duration / tau) * standard_normal(rng);
  }
  if (noise.amplitude_jitter_rms > 0.0) {
    out.amplitude_factor = 1.0 + noise.amplitude_jitter_rms * standard_normal(rng);
  }
  return out;
}

double thermal_rabi_factor(const FockSample& sample, const std::vector<double>& nbar,
                           const ModeSet& modes) {
  if (sample.size() != modes.size() || nbar.size() != modes.size()) {
    throw std::invalid_argument("thermal factor inputs must match the mode count");
  }
  double sampled = 1.0;
  double mean = 1.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double eta2 = modes.modes[i].eta * modes.modes[i].eta;
    sampled -= (sample[i] + 0.5) * eta2;
    mean -= (nbar[i] + 0.5) * eta2;
  }
  return sampled / mean;
}

namespace {

PulsePerturbation draw_411(const PulseSpec& pulse, const NoiseConfig& noise, Rng& rng,
                           const ModeSet* modes, const std::vector<double>* nbar) {
  PulsePerturbation p = sample_pulse_noise(noise, ConversionLaser::laser411, pulse.duration, rng);
  if (modes && nbar) {
    p.amplitude_factor *= thermal_rabi_factor(sample_fock(*nbar, rng), *nbar, *modes);
  }
  return p;
}

}  // namespace

ConversionResult convert_s_to_f(const DensityMatrix& state, const PulseSpec& pulse411,
                                const PulseSpec& pulse3432, const NoiseConfig& noise, Rng& rng,
                                const ModeSet* modes, const std::vector<double>* nbar) {
  const PulsePerturbation n411 = draw_411(pulse411, noise, rng, modes, nbar);
  const PulsePerturbation n3432 =
      sample_pulse_noise(noise, ConversionLaser::laser3432, pulse3432.duration, rng);
  return convert_s_to_f(state, pulse411, pulse3432, n411, n3432);
}

ConversionResult convert_f_to_s(const DensityMatrix& state, const PulseSpec& pulse3432,
                                const PulseSpec& pulse411, const NoiseConfig& noise, Rng& rng,
                                const ModeSet* modes, const std::vector<double>* nbar) {
  const PulsePerturbation n3432 =
      sample_pulse_noise(noise, ConversionLaser::laser3432, pulse3432.duration, rng);
  const PulsePerturbation n411 = draw_411(pulse411, noise, rng, modes, nbar);
  return convert_f_to_s(state, pulse3432, pulse411, n3432, n411);
}

void CrosstalkRates::validate() const {
  for (double e : {eps_r, eps_0, eps_1}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::domain_error("crosstalk rate outside [0, 1]");
  }
  if (!(t_c > 0.0)) throw std::domain_error("cooling coherence time must be > 0");
}

double crosstalk_infidelity(CrosstalkOp op, const CrosstalkRates& rates, double dt) {
  rates.validate();
  switch (op) {
    case CrosstalkOp::raman_pi2: return rates.eps_r;
    case CrosstalkOp::pump_detect_0: return rates.eps_0;
    case CrosstalkOp::pump_detect_1: return rates.eps_1;
    case CrosstalkOp::cooling:
      if (!(dt >= 0.0)) throw std::domain_error("cooling duration must be >= 0");
      return -std::expm1(-dt / rates.t_c);
  }
  return 0.0;
}

Channel crosstalk_channel(CrosstalkOp op, const CrosstalkRates& rates, double dt) {
  const double eps = crosstalk_infidelity(op, rates, dt);
  // MUB average of pure dephasing p is 1 - 2p/3.
  if (eps > 2.0 / 3.0) {
    throw std::domain_error("requested infidelity exceeds what pure dephasing can reach (2/3)");
  }
  return Channel::dephasing(1.5 * eps);
}

double spatial_crosstalk_ratio(double waist_radius, double separation) {
  if (!(waist_radius > 0.0) || !(separation >= 0.0)) {
    throw std::domain_error("need waist > 0 and separation >= 0");
  }
  const double r = separation / waist_radius;
  return std::exp(-2.0 * r * r);
}

}  // namespace dualion
