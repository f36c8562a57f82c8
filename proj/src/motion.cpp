#include "dualion/motion.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dualion/atom_model.hpp"

namespace dualion {

using cd = std::complex<double>;

void ModeSet::validate() const {
  if (modes.empty()) throw std::invalid_argument("mode set is empty");
  for (const auto& m : modes) {
    if (!(m.omega > 0.0)) throw std::domain_error("mode frequency must be > 0");
    if (!(m.eta >= 0.0 && m.eta < kMaxLambDicke)) {
      throw std::domain_error("Lamb-Dicke factor outside [0, 0.3)");
    }
  }
}

ModeSet two_ion_transverse_modes(double freq_x_hz, double freq_y_hz, double freq_z_hz, double eta) {
  if (!(freq_x_hz > freq_z_hz && freq_y_hz > freq_z_hz && freq_z_hz > 0.0)) {
    throw std::domain_error("transverse trap frequencies must exceed the axial frequency");
  }
  const auto w = [](double hz) { return constants::kTwoPi * hz; };
  const auto rocking = [](double t, double z) { return std::sqrt(t * t - z * z); };
  ModeSet set;
  set.modes = {
      {w(freq_x_hz), eta},
      {w(rocking(freq_x_hz, freq_z_hz)), eta},
      {w(freq_y_hz), eta},
      {w(rocking(freq_y_hz, freq_z_hz)), eta},
  };
  set.validate();
  return set;
}

ThermalState ThermalState::at_temperature(double kelvin) {
  if (!(kelvin > 0.0)) throw std::domain_error("temperature must be > 0");
  ThermalState s;
  s.temperature_ = kelvin;
  return s;
}

ThermalState ThermalState::with_occupations(std::vector<double> nbar) {
  for (double n : nbar) {
    if (!(n >= 0.0)) throw std::domain_error("mean occupation must be >= 0");
  }
  ThermalState s;
  s.nbar_ = std::move(nbar);
  return s;
}

double ThermalState::temperature() const {
  if (!temperature_) throw std::logic_error("thermal state is given by occupations, not T");
  return *temperature_;
}

std::vector<double> ThermalState::occupations(const ModeSet& modes) const {
  if (temperature_) {
    std::vector<double> out;
    out.reserve(modes.size());
    for (const auto& m : modes.modes) out.push_back(mean_occupation(m.omega, *temperature_));
    return out;
  }
  if (nbar_.size() != modes.size()) {
    throw std::invalid_argument("occupation count does not match the mode count");
  }
  return nbar_;
}

double mean_occupation(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) {
    throw std::domain_error("mean_occupation needs omega > 0 and T > 0");
  }
  const double x = constants::kHbar * omega / (constants::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double temperature_for_occupation(double omega, double nbar) {
  if (!(omega > 0.0) || !(nbar > 0.0)) {
    throw std::domain_error("temperature_for_occupation needs omega > 0 and nbar > 0");
  }
  return constants::kHbar * omega / (constants::kBoltzmann * std::log1p(1.0 / nbar));
}

double fock_probability(const FockSample& sample, const ThermalState& thermal,
                        const ModeSet& modes) {
  if (sample.size() != modes.size()) {
    throw std::invalid_argument("Fock sample length does not match the mode count");
  }
  const auto nbar = thermal.occupations(modes);
  double log_p = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const int n = sample[i];
    if (n < 0) throw std::invalid_argument("phonon numbers must be >= 0");
    if (nbar[i] == 0.0) {
      if (n > 0) return 0.0;
      continue;
    }
    log_p += n * std::log(nbar[i]) - (n + 1) * std::log1p(nbar[i]);
  }
  return std::exp(log_p);
}

int fock_cutoff(double nbar, double tail) {
  if (!(nbar >= 0.0) || !(tail > 0.0 && tail < 1.0)) {
    throw std::domain_error("fock_cutoff needs nbar >= 0 and tail in (0, 1)");
  }
  if (nbar == 0.0) return 0;
  // P(n > N) = q^(N+1) with q = nbar / (nbar + 1).
  const double log_q = std::log(nbar) - std::log1p(nbar);
  const double needed = std::log(tail) / log_q;
  int n = static_cast<int>(std::ceil(needed)) - 1;
  if (n < 0) n = 0;
  while ((n + 1) * log_q > std::log(tail)) ++n;
  while (n > 0 && n * log_q <= std::log(tail)) --n;
  return n;
}

namespace {
constexpr int kMaxLaguerreOrder = 10000;
}

double carrier_rabi(const FockSample& sample, double omega0, const ModeSet& modes,
                    RabiApproximation approximation) {
  if (sample.size() != modes.size()) {
    throw std::invalid_argument("Fock sample length does not match the mode count");
  }
  if (!(omega0 > 0.0)) throw std::domain_error("omega0 must be > 0");
  if (approximation == RabiApproximation::first_order) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double eta2 = modes.modes[i].eta * modes.modes[i].eta;
      sum += (sample[i] + 0.5) * eta2;
    }
    return omega0 * (1.0 - sum);
  }
  double factor = 1.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const int n = sample[i];
    if (n < 0) throw std::invalid_argument("phonon numbers must be >= 0");
    if (n > kMaxLaguerreOrder) {
      throw std::domain_error("phonon number beyond stable Laguerre evaluation");
    }
    const double eta2 = modes.modes[i].eta * modes.modes[i].eta;
    factor *= std::exp(-0.5 * eta2) * std::laguerre(static_cast<unsigned>(n), eta2);
  }
  return omega0 * factor;
}

double thermal_carrier_signal(double t, double omega0, const std::vector<double>& nbar,
                              const ModeSet& modes) {
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  if (nbar.size() != modes.size()) {
    throw std::invalid_argument("occupation count does not match the mode count");
  }
  double shift = 1.0;
  for (const auto& m : modes.modes) shift -= 0.5 * m.eta * m.eta;
  cd f = std::polar(1.0, omega0 * t * shift);
  for (std::size_t i = 0; i < nbar.size(); ++i) {
    const double eta2 = modes.modes[i].eta * modes.modes[i].eta;
    f /= cd(nbar[i] + 1.0, 0.0) - nbar[i] * std::polar(1.0, -eta2 * omega0 * t);
  }
  return 0.5 * (1.0 + f.real());
}

double thermal_carrier_signal(double t, double omega0, const ThermalState& thermal,
                              const ModeSet& modes) {
  return thermal_carrier_signal(t, omega0, thermal.occupations(modes), modes);
}

SignalGradient thermal_carrier_signal_gradient(double t, double omega0, double temperature,
                                               const ModeSet& modes) {
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  const cd i(0.0, 1.0);
  double shift = 1.0;
  for (const auto& m : modes.modes) shift -= 0.5 * m.eta * m.eta;
  cd f = std::polar(1.0, omega0 * t * shift);
  cd dlog_omega = i * t * shift;
  cd dlog_temp = 0.0;
  for (const auto& m : modes.modes) {
    const double beta = m.eta * m.eta;
    const double n = mean_occupation(m.omega, temperature);
    const double x = constants::kHbar * m.omega / (constants::kBoltzmann * temperature);
    const double dn_dt = n * (n + 1.0) * x / temperature;
    const cd e = std::polar(1.0, -beta * omega0 * t);
    const cd d = cd(n + 1.0, 0.0) - n * e;
    f /= d;
    dlog_omega -= i * n * beta * t * e / d;
    dlog_temp -= (1.0 - e) / d * dn_dt;
  }
  SignalGradient g;
  g.value = 0.5 * (1.0 + f.real());
  g.d_omega0 = 0.5 * (f * dlog_omega).real();
  g.d_temperature = 0.5 * (f * dlog_temp).real();
  return g;
}

ThermalState cooling_step(const ThermalState& thermal, const ModeSet& modes, double dt, double rate,
                          const std::vector<double>& steady_state_nbar,
                          const std::vector<double>& participation) {
  if (!(dt >= 0.0) || !(rate >= 0.0)) throw std::domain_error("cooling needs dt >= 0, rate >= 0");
  if (steady_state_nbar.size() != modes.size() || participation.size() != modes.size()) {
    throw std::invalid_argument("cooling parameters must have one entry per mode");
  }
  auto nbar = thermal.occupations(modes);
  for (std::size_t i = 0; i < nbar.size(); ++i) {
    const double decay = std::exp(-participation[i] * rate * dt);
    nbar[i] = steady_state_nbar[i] + (nbar[i] - steady_state_nbar[i]) * decay;
  }
  return ThermalState::with_occupations(std::move(nbar));
}

ThermalState heating_step(const ThermalState& thermal, const ModeSet& modes, double dt,
                          double heating_rate) {
  if (!(dt >= 0.0) || !(heating_rate >= 0.0)) {
    throw std::domain_error("heating needs dt >= 0 and rate >= 0");
  }
  auto nbar = thermal.occupations(modes);
  for (double& n : nbar) n += heating_rate * dt;
  return ThermalState::with_occupations(std::move(nbar));
}

FockSample sample_fock(const std::vector<double>& nbar, Rng& rng) {
  FockSample out(nbar.size(), 0);
  for (std::size_t i = 0; i < nbar.size(); ++i) {
    if (nbar[i] <= 0.0) continue;
    // Inversion of the geometric law P(n) = (1 - q) q^n.
    const double log_q = std::log(nbar[i]) - std::log1p(nbar[i]);
    const double u = 1.0 - rng.uniform();
    out[i] = static_cast<int>(std::floor(std::log(u) / log_q));
  }
  return out;
}

}  // namespace dualion
