#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dualion/atom_model.hpp"

namespace dualion {

using Basis = std::vector<LevelId>;

// Tolerance ladder shared by every state check.
namespace tolerance {
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kKrausCompleteness = 1e-10;
inline constexpr double kNormalization = 1e-10;
}  // namespace tolerance

struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |tr rho - 1|
  double min_eigenvalue = 0.0;

  bool valid() const {
    return hermiticity_error <= tolerance::kHermiticity && trace_error <= tolerance::kTrace &&
           min_eigenvalue >= -tolerance::kPositivity;
  }
};

// Density matrix over an ordered list of atomic levels.
class DensityMatrix {
 public:
  DensityMatrix(Basis basis, Eigen::MatrixXcd data);

  static DensityMatrix pure(Basis basis, const Eigen::VectorXcd& amplitudes);
  static DensityMatrix from_level(Basis basis, const LevelId& level);

  std::size_t dim() const { return basis_.size(); }
  const Basis& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return data_; }
  Eigen::MatrixXcd& matrix() { return data_; }

  std::optional<std::size_t> index_of(const LevelId& level) const;
  // Throws std::domain_error when `level` is not in the basis.
  std::size_t require_index(const LevelId& level) const;

  double population(const LevelId& level) const;
  double trace() const { return data_.trace().real(); }

  StateDiagnostics diagnostics() const;

 private:
  Basis basis_;
  Eigen::MatrixXcd data_;
};

// Qubit basis helpers.
Basis s_qubit_basis();
Basis f_qubit_basis();
// S0, S1, D5/2(F=2), D5/2(F=3), F0', F1' - the levels touched by conversion.
Basis conversion_basis();

// One frequency component of a pulse, addressing its own two-level path.
struct Tone {
  Transition path;
  double detuning_offset = 0.0;  // rad/s, added to the pulse detuning
  double phase = 0.0;            // rad, added to the pulse phase
};

// A coherent drive. All tones share the Rabi frequency and duration; their
// paths must be disjoint.
struct PulseSpec {
  std::vector<Tone> tones;
  double rabi = 0.0;      // rad/s
  double detuning = 0.0;  // rad/s
  double phase = 0.0;     // rad
  double duration = 0.0;  // s

  static PulseSpec single(const Transition& path, double rabi, double detuning, double phase,
                          double duration);

  const Transition& transition() const { return tones.front().path; }
  double area() const { return rabi * duration; }
  void validate() const;
};

// Dual-tone pi pulses for the two conversion lasers.
PulseSpec dual_tone_411(double pi_time);
PulseSpec dual_tone_3432(double pi_time);

// 2x2 propagator for H = (D/2) sz + (W/2)(cos p sx + sin p sy) acting on
// (lower, upper) amplitudes for time t.
Eigen::Matrix2cd rabi_propagator(double rabi, double detuning, double phase, double duration);

DensityMatrix apply_rabi(const DensityMatrix& state, const PulseSpec& pulse);

// Per-shot scalar perturbations of one pulse.
struct PulsePerturbation {
  double detuning_offset = 0.0;  // rad/s
  double phase_offset = 0.0;     // rad
  double amplitude_factor = 1.0;
};

PulseSpec perturbed(const PulseSpec& pulse, const PulsePerturbation& noise);

struct ConversionResult {
  DensityMatrix state;
  // Set when any applied pulse area differs from pi (miscalibration).
  bool area_flagged = false;
};

// S-qubit -> F-qubit: 411 nm dual-tone pi pulse then 3432 nm dual-tone pi pulse.
// The input must live on the S-qubit levels up to `support_tolerance`.
ConversionResult convert_s_to_f(const DensityMatrix& state, const PulseSpec& pulse411,
                                const PulseSpec& pulse3432, const PulsePerturbation& noise411 = {},
                                const PulsePerturbation& noise3432 = {},
                                double support_tolerance = 1e-9);

// F-qubit -> S-qubit: the same two pulses in reverse order.
ConversionResult convert_f_to_s(const DensityMatrix& state, const PulseSpec& pulse3432,
                                const PulseSpec& pulse411, const PulsePerturbation& noise3432 = {},
                                const PulsePerturbation& noise411 = {},
                                double support_tolerance = 1e-9);

// Completely positive trace-preserving map given by Kraus operators.
class Channel {
 public:
  enum class Kind { dephasing, depolarizing, population_transfer, custom };

  // Phase flip of level `flipped` with probability p (default: qubit Z).
  static Channel dephasing(double p, std::size_t dim = 2, std::size_t flipped = 1);
  // rho -> (1-p) rho + p I/2 on a qubit.
  static Channel depolarizing(double p);
  // Moves population from `from` to `to` with probability p.
  static Channel population_transfer(std::size_t from, std::size_t to, double p, std::size_t dim);
  // Throws std::domain_error when sum K^dagger K != I.
  static Channel custom(std::vector<Eigen::MatrixXcd> kraus);
  static Channel identity(std::size_t dim);

  Kind kind() const { return kind_; }
  double strength() const { return strength_; }
  std::size_t dim() const { return kraus_.front().rows(); }
  const std::vector<Eigen::MatrixXcd>& kraus() const { return kraus_; }

  // max |sum K^dagger K - I|.
  double completeness_error() const;

 private:
  Channel(Kind kind, double strength, std::vector<Eigen::MatrixXcd> kraus);

  Kind kind_;
  double strength_;
  std::vector<Eigen::MatrixXcd> kraus_;
};

DensityMatrix apply_channel(const DensityMatrix& state, const Channel& channel);

// <psi|rho|psi>. Throws std::domain_error for an unnormalized or mis-sized target.
double fidelity(const DensityMatrix& state, const Eigen::VectorXcd& target);

// Keeps only the block on `keep`, renormalized. Returns the kept population
// through `kept_population`; the block is returned as a new state over `keep`.
DensityMatrix restrict_to(const DensityMatrix& state, const Basis& keep, double* kept_population);

// Embeds a state into a larger basis (zero population elsewhere).
DensityMatrix embed(const DensityMatrix& state, const Basis& target_basis);

}  // namespace dualion
