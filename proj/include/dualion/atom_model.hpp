#pragma once

#include <string>
#include <utility>
#include <vector>

namespace dualion {

// Physical constants (CODATA 2018, exact SI where defined).
namespace constants {
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K
inline constexpr double kSpeedOfLight = 299792458.0; // m / s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
}  // namespace constants

enum class Manifold { S12, P12, D32, D52, F72, Bracket32 };

// One atomic level of 171Yb+. `f` is the hyperfine quantum number and `mf`
// the magnetic quantum number; mf is 0 except for the F7/2 F=4 Zeeman levels
// used by the S-qubit shelving ladder.
struct LevelId {
  Manifold manifold = Manifold::S12;
  int f = 0;
  int mf = 0;

  friend constexpr bool operator==(const LevelId&, const LevelId&) = default;
};

std::string to_string(Manifold manifold);
std::string to_string(const LevelId& level);

// True when `level` belongs to the level set the simulator knows about.
bool is_allowed_level(const LevelId& level);

namespace levels {
inline constexpr LevelId kS0{Manifold::S12, 0, 0};  // |0>
inline constexpr LevelId kS1{Manifold::S12, 1, 0};  // |1>
inline constexpr LevelId kF0{Manifold::F72, 3, 0};  // |0'>
inline constexpr LevelId kF1{Manifold::F72, 4, 0};  // |1'>
// Effective D5/2 legs of the two transfer paths.
inline constexpr LevelId kD2{Manifold::D52, 2, 0};
inline constexpr LevelId kD3{Manifold::D52, 3, 0};
inline constexpr LevelId kP0{Manifold::P12, 0, 0};
inline constexpr LevelId kP1{Manifold::P12, 1, 0};
inline constexpr LevelId kD32{Manifold::D32, 1, 0};
inline constexpr LevelId kBracket{Manifold::Bracket32, 1, 0};
}  // namespace levels

// A directed pair (lower, upper).
using Transition = std::pair<LevelId, LevelId>;

enum class TransitionKind { dipole, quadrupole, octupole_bridge, microwave };

enum class Drive { laser370, laser935, laser411, laser3432, laser976, microwave_s, microwave_f };

std::string to_string(Drive drive);

struct TransitionEntry {
  LevelId lower;
  LevelId upper;
  double wavelength_nm = 0.0;
  TransitionKind kind = TransitionKind::dipole;
  Drive drive = Drive::laser370;
};

// Splittings that parameterize the level structure, all in Hz.
struct AtomData {
  double s_hyperfine_hz = 12.6428e9;
  double f_hyperfine_hz = 3.6205e9;
  double p_hyperfine_hz = 2.1e9;
  // E(D5/2, F=3) - E(D5/2, F=2). The D5/2 hyperfine structure is inverted.
  double d52_leg_splitting_hz = -0.2e9;
};

// Static level data for one ion. Immutable after construction.
class AtomModel {
 public:
  explicit AtomModel(AtomData data = {});

  const AtomData& data() const { return data_; }
  const std::vector<TransitionEntry>& transitions() const { return table_; }

  // Hyperfine splitting of S1/2, P1/2 or F7/2 in Hz. Throws std::domain_error
  // for any other manifold.
  double hyperfine_splitting(Manifold manifold) const;

  // Energy of `level` relative to the lowest hyperfine level of its manifold, in Hz.
  double level_offset(const LevelId& level) const;

  // Which drive addresses a (lower, upper) pair; throws std::domain_error when
  // no tabulated transition connects the two manifolds.
  Drive drive_for(const Transition& path) const;

  // EOM drive frequency for a dual-tone pulse: half the frequency difference
  // between the two transfer paths. Both paths must be legs of the same laser.
  double dual_tone_sideband(const Transition& path_a, const Transition& path_b) const;

 private:
  AtomData data_;
  std::vector<TransitionEntry> table_;
};

// Convenience wrappers over a default-constructed model.
double hyperfine_splitting(Manifold manifold);
double dual_tone_sideband(const Transition& path_a, const Transition& path_b);

}  // namespace dualion
