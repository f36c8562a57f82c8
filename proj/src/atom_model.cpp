#include "dualion/atom_model.hpp"

#include <cmath>
#include <stdexcept>

namespace dualion {

std::string to_string(Manifold manifold) {
  switch (manifold) {
    case Manifold::S12: return "S1/2";
    case Manifold::P12: return "P1/2";
    case Manifold::D32: return "D3/2";
    case Manifold::D52: return "D5/2";
    case Manifold::F72: return "F7/2";
    case Manifold::Bracket32: return "[3/2]3/2";
  }
  return "?";
}

std::string to_string(const LevelId& level) {
  return to_string(level.manifold) + "(F=" + std::to_string(level.f) +
         ",mF=" + std::to_string(level.mf) + ")";
}

std::string to_string(Drive drive) {
  switch (drive) {
    case Drive::laser370: return "370nm";
    case Drive::laser935: return "935nm";
    case Drive::laser411: return "411nm";
    case Drive::laser3432: return "3432nm";
    case Drive::laser976: return "976nm";
    case Drive::microwave_s: return "12.6GHz";
    case Drive::microwave_f: return "3.6GHz";
  }
  return "?";
}

bool is_allowed_level(const LevelId& level) {
  const int f = level.f;
  const int mf = level.mf;
  switch (level.manifold) {
    case Manifold::S12:
    case Manifold::P12:
      return (f == 0 || f == 1) && mf == 0;
    case Manifold::F72:
      if (f == 3) return mf == 0;
      if (f == 4) return mf >= -1 && mf <= 1;
      return false;
    case Manifold::D52:
      return (f == 2 || f == 3) && mf == 0;
    case Manifold::D32:
    case Manifold::Bracket32:
      return f == 1 && mf == 0;
  }
  return false;
}

namespace {

double microwave_wavelength_nm(double frequency_hz) {
  return constants::kSpeedOfLight / frequency_hz * 1e9;
}

}  // namespace

AtomModel::AtomModel(AtomData data) : data_(data) {
  using namespace levels;
  table_ = {
      {kS1, kP0, 370.0, TransitionKind::dipole, Drive::laser370},
      {kD32, kBracket, 935.0, TransitionKind::dipole, Drive::laser935},
      {kS0, kD2, 411.0, TransitionKind::quadrupole, Drive::laser411},
      {kD2, kF0, 3432.0, TransitionKind::octupole_bridge, Drive::laser3432},
      {kD2, kBracket, 976.0, TransitionKind::dipole, Drive::laser976},
      {kS0, kS1, microwave_wavelength_nm(data_.s_hyperfine_hz), TransitionKind::microwave,
       Drive::microwave_s},
      {kF0, kF1, microwave_wavelength_nm(data_.f_hyperfine_hz), TransitionKind::microwave,
       Drive::microwave_f},
  };
}

double AtomModel::hyperfine_splitting(Manifold manifold) const {
  switch (manifold) {
    case Manifold::S12: return data_.s_hyperfine_hz;
    case Manifold::F72: return data_.f_hyperfine_hz;
    case Manifold::P12: return data_.p_hyperfine_hz;
    default:
      throw std::domain_error("no hyperfine splitting stored for " + to_string(manifold));
  }
}

double AtomModel::level_offset(const LevelId& level) const {
  if (!is_allowed_level(level)) {
    throw std::domain_error("unknown level " + to_string(level));
  }
  switch (level.manifold) {
    case Manifold::S12: return level.f == 1 ? data_.s_hyperfine_hz : 0.0;
    case Manifold::P12: return level.f == 1 ? data_.p_hyperfine_hz : 0.0;
    case Manifold::F72: return level.f == 4 ? data_.f_hyperfine_hz : 0.0;
    case Manifold::D52: return level.f == 3 ? data_.d52_leg_splitting_hz : 0.0;
    default: return 0.0;
  }
}

Drive AtomModel::drive_for(const Transition& path) const {
  const auto& [lower, upper] = path;
  if (!is_allowed_level(lower) || !is_allowed_level(upper)) {
    throw std::domain_error("path references an unknown level");
  }
  for (const auto& entry : table_) {
    if (entry.lower.manifold == lower.manifold && entry.upper.manifold == upper.manifold) {
      // The two microwave entries share a manifold pair with nothing else.
      return entry.drive;
    }
  }
  throw std::domain_error("no transition connects " + to_string(lower) + " and " +
                          to_string(upper));
}

double AtomModel::dual_tone_sideband(const Transition& path_a, const Transition& path_b) const {
  const Drive drive_a = drive_for(path_a);
  const Drive drive_b = drive_for(path_b);
  if (drive_a != drive_b) {
    throw std::domain_error("dual-tone paths belong to different lasers (" + to_string(drive_a) +
                            " vs " + to_string(drive_b) + ")");
  }
  // The common optical frequency cancels in the difference.
  const double freq_a = level_offset(path_a.second) - level_offset(path_a.first);
  const double freq_b = level_offset(path_b.second) - level_offset(path_b.first);
  return 0.5 * std::abs(freq_a - freq_b);
}

double hyperfine_splitting(Manifold manifold) { return AtomModel{}.hyperfine_splitting(manifold); }

double dual_tone_sideband(const Transition& path_a, const Transition& path_b) {
  return AtomModel{}.dual_tone_sideband(path_a, path_b);
}

}  // namespace dualion
