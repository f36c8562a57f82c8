#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dualion/rng.hpp"

namespace dualion {

struct Mode {
  double omega = 0.0;  // rad/s
  double eta = 0.0;    // Lamb-Dicke factor of the probe laser
};

inline constexpr double kMaxLambDicke = 0.3;

struct ModeSet {
  std::vector<Mode> modes;

  std::size_t size() const { return modes.size(); }
  void validate() const;
};

// The four transverse modes of a two-ion crystal: centre-of-mass modes at the
// trap frequencies and rocking modes at sqrt(w_t^2 - w_z^2). Frequencies in Hz.
ModeSet two_ion_transverse_modes(double freq_x_hz, double freq_y_hz, double freq_z_hz, double eta);

// Either one effective temperature shared by all modes or an explicit
// occupation per mode.
class ThermalState {
 public:
  static ThermalState at_temperature(double kelvin);
  static ThermalState with_occupations(std::vector<double> nbar);

  bool has_temperature() const { return temperature_.has_value(); }
  double temperature() const;
  std::vector<double> occupations(const ModeSet& modes) const;

 private:
  std::optional<double> temperature_;
  std::vector<double> nbar_;
};

using FockSample = std::vector<int>;

// Bose-Einstein occupation 1 / (exp(hbar w / kB T) - 1).
double mean_occupation(double omega, double temperature);

// Inverse of mean_occupation at fixed omega.
double temperature_for_occupation(double omega, double nbar);

double fock_probability(const FockSample& sample, const ThermalState& thermal, const ModeSet& modes);

// Smallest N with P(n <= N) >= 1 - tail for a thermal distribution.
int fock_cutoff(double nbar, double tail = 1e-9);

enum class RabiApproximation { exact, first_order };

// Carrier Rabi frequency for a given phonon configuration.
double carrier_rabi(const FockSample& sample, double omega0, const ModeSet& modes,
                    RabiApproximation approximation);

// Probability of remaining in the initial level after a carrier pulse of
// length t, averaged over the thermal phonon distribution (first-order form).
double thermal_carrier_signal(double t, double omega0, const ThermalState& thermal,
                              const ModeSet& modes);
double thermal_carrier_signal(double t, double omega0, const std::vector<double>& nbar,
                              const ModeSet& modes);

// Partial derivatives of the signal with respect to omega0 and T.
struct SignalGradient {
  double value = 0.0;
  double d_omega0 = 0.0;
  double d_temperature = 0.0;
};
SignalGradient thermal_carrier_signal_gradient(double t, double omega0, double temperature,
                                               const ModeSet& modes);

// Per-mode relaxation n -> n_ss + (n - n_ss) exp(-participation * rate * dt).
ThermalState cooling_step(const ThermalState& thermal, const ModeSet& modes, double dt, double rate,
                          const std::vector<double>& steady_state_nbar,
                          const std::vector<double>& participation);

// n -> n + heating_rate * dt on every mode.
ThermalState heating_step(const ThermalState& thermal, const ModeSet& modes, double dt,
                          double heating_rate);

FockSample sample_fock(const std::vector<double>& nbar, Rng& rng);

}  // namespace dualion
