#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dualion/detection.hpp"
#include "dualion/fit.hpp"
#include "dualion/motion.hpp"
#include "dualion/noise.hpp"
#include "dualion/quantum.hpp"

namespace dualion {

enum class ExperimentKind {
  conversion_cycle,
  raman_crosstalk,
  pump_detect_crosstalk_0,
  pump_detect_crosstalk_1,
  sympathetic_cooling,
  global_cooling,
  rb_s_qubit,
  rb_f_qubit,
  thermometry,
};

inline constexpr std::array<ExperimentKind, 9> kAllExperiments = {
    ExperimentKind::conversion_cycle,        ExperimentKind::raman_crosstalk,
    ExperimentKind::pump_detect_crosstalk_0, ExperimentKind::pump_detect_crosstalk_1,
    ExperimentKind::sympathetic_cooling,     ExperimentKind::global_cooling,
    ExperimentKind::rb_s_qubit,              ExperimentKind::rb_f_qubit,
    ExperimentKind::thermometry,
};

std::string to_string(ExperimentKind kind);
// Throws std::invalid_argument for unknown names.
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::conversion_cycle;
  std::vector<double> sweep;
  int shots = 10000;  // per sweep point, spread round-robin over the MUB states
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurveRecord {
  double sweep_value = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::optional<std::array<double, 6>> per_mub;
};

// k successes out of n: mean k/n and the binomial error of the smoothed
// estimate (k+1)/(n+2), which stays non-zero at k = 0 or n.
CurveRecord binomial_record(double sweep_value, long successes, long trials);

// |0>, |1>, |+>, |->, |L>, |R> with |+-> = (|0> +- |1>)/sqrt2 and
// |L>, |R> = (|0> +- i|1>)/sqrt2.
std::array<Eigen::Vector2cd, 6> mub_states();

std::vector<FitPoint> to_fit_points(const std::vector<CurveRecord>& curve);

// ---------------------------------------------------------------- conversion

struct ConversionSettings {
  double pi_time_411 = 0.54e-6;   // s
  double pi_time_3432 = 0.39e-6;  // s
  NoiseConfig noise;
  double nbar = 3.0;  // per mode, sets the 411 nm Debye-Waller spread
  // When > 0 both coherence times are scaled by one common factor so that the
  // expected round-trip infidelity equals this value.
  double target_round_trip_infidelity = 0.0065;
  double spam = 0.034;
};

// Expected transfer probability of one noisy pi pulse: quadrature over the
// detuning line shape, averaged over amplitude samples.
double expected_pi_transfer(double pi_time, double coherence_time, LineShape model,
                            const std::vector<double>& amplitude_factors);
// Amplitude samples (thermal x jitter) used by the expectations below.
std::vector<double> amplitude_samples(ConversionLaser laser, const NoiseConfig& noise, double nbar,
                                      const ModeSet& modes, int count = 256);
// 1 - (E[P411] E[P3432]) and its square-law round-trip counterpart.
double expected_one_way_infidelity(const ConversionSettings& s, const ModeSet& modes);
double expected_round_trip_infidelity(const ConversionSettings& s, const ModeSet& modes);
// Common coherence-time scale reaching `target` round-trip infidelity.
double calibrate_coherence_scale(const ConversionSettings& s, const ModeSet& modes, double target);
// Settings after applying the calibration (identity when the target is <= 0).
ConversionSettings calibrated(const ConversionSettings& s, const ModeSet& modes);

struct ConversionRun {
  std::vector<CurveRecord> curve;
  double coherence_scale = 1.0;
  double expected_round_trip = 0.0;
};

ConversionRun run_conversion_cycle(const ExperimentPlan& plan, const ConversionSettings& settings,
                                   const ModeSet& modes);

// ------------------------------------------------------------------ crosstalk

struct FPrepResult {
  DensityMatrix state;  // over the F-qubit basis
  bool kept = true;     // false when the shot is discarded after verification
};

// S-qubit state -> F-qubit through one noisy conversion; the shot is kept with
// probability equal to the population that reached the F-qubit levels.
FPrepResult prepare_f_qubit(const Eigen::Vector2cd& psi, const ConversionSettings& settings,
                            const ModeSet& modes, Rng& rng);

struct CrosstalkSettings {
  CrosstalkRates rates;
  ConversionSettings conversion;  // F-qubit preparation
  double spam_raman = 9e-4;
  double spam_pump_0 = 2e-3;
  double spam_pump_1 = 9e-3;
  double spam_cooling = 2e-3;
  // S-qubit inset of the Raman experiment.
  double raman_pi2_time = 2.5e-6;        // s
  double raman_decoherence_time = 60e-6; // s
  std::vector<double> raman_trace_times;  // s, empty -> 0 to 24 pi/2 times
  // S-qubit inset of the pump/detect experiments.
  int pump_cycles = 3;
  double pump_residual = 0.01;
  double microwave_pi_error = 1e-4;
  DetectionConfig detection = direct_s_detection();
};

struct CrosstalkRun {
  std::vector<CurveRecord> curve;     // F-qubit MUB fidelity
  std::vector<CurveRecord> s_trace;   // S-qubit inset
  double discard_fraction = 0.0;
};

CrosstalkRun run_raman_crosstalk(const ExperimentPlan& plan, const CrosstalkSettings& settings,
                                 const ModeSet& modes);
CrosstalkRun run_pump_detect_crosstalk(const ExperimentPlan& plan,
                                       const CrosstalkSettings& settings, const ModeSet& modes,
                                       bool with_pi_pulse);

// -------------------------------------------------------------------- cooling

struct CoolingSettings {
  double steady_state_temperature = 5e-3;  // K
  double heating_rate = 2.3e4;             // quanta/s per mode
  double heating_time = 10e-3;             // s
  double cooling_rate = 8500.0;            // 1/s at participation 1
  double participation_sympathetic = 0.5;
  double participation_global = 1.0;
  double omega0 = 2.0 * 3.14159265358979323846 * 859.4e3;  // 411 nm carrier, rad/s
  std::vector<double> probe_times;    // s, empty -> 0 to 30 us in 0.1 us steps
  int probe_shots = 1000;             // per probe time
  std::vector<double> fidelity_sweep; // s, empty -> 0 to 50 ms in 5 ms steps
};

struct CoolingRun {
  std::vector<CurveRecord> temperature;  // fitted T (K) per cooling time
  std::vector<CurveRecord> fidelity;     // F-qubit MUB fidelity (sympathetic only)
  std::vector<double> true_temperature;  // mean-occupation equivalent of mode 0
  double discard_fraction = 0.0;
  bool all_converged = true;
};

CoolingRun run_cooling(const ExperimentPlan& plan, const CoolingSettings& cooling,
                       const CrosstalkSettings& crosstalk, const ModeSet& modes, bool sympathetic);

// ---------------------------------------------------------------- benchmarking

enum class GateErrorModel { depolarizing, dephasing };

struct RbSettings {
  double gate_infidelity = 2e-4;  // average gate infidelity per Clifford
  GateErrorModel model = GateErrorModel::depolarizing;
  double readout_flip = 0.01;
  int sequences = 20;
};

std::vector<CurveRecord> run_rb(const ExperimentPlan& plan, const RbSettings& settings);

// ----------------------------------------------------------------- thermometry

struct ThermometrySettings {
  double temperature = 9.2e-3;  // K
  double omega0 = 2.0 * 3.14159265358979323846 * 859.4e3;
};

// Binomially sampled carrier Rabi trace at the plan's time points.
std::vector<CurveRecord> run_thermometry(const ExperimentPlan& plan,
                                         const ThermometrySettings& settings,
                                         const ModeSet& modes);
std::vector<CurveRecord> sample_carrier_trace(const std::vector<double>& times, double omega0,
                                              const std::vector<double>& nbar,
                                              const ModeSet& modes, int shots, Rng& rng);

// Numeric id used in RNG stream keys.
std::uint64_t experiment_id(ExperimentKind kind);

}  // namespace dualion
