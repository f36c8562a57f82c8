#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualion/atom_model.hpp"
#include "dualion/detection.hpp"
#include "dualion/protocols.hpp"

namespace dualion {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string key = {})
      : std::runtime_error(message), line_(line), key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct ModeSettings {
  double freq_x_hz = 3.15e6;
  double freq_y_hz = 2.97e6;
  double freq_z_hz = 0.12e6;
  double eta = 0.024;

  ModeSet build() const { return two_ion_transverse_modes(freq_x_hz, freq_y_hz, freq_z_hz, eta); }
};

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::conversion_cycle;
  std::uint64_t seed = 1;
  int shots = 10000;
  std::string output_dir = "out";
  std::string sweep;  // empty: the experiment's default sweep

  AtomData atom;
  ModeSettings modes;
  ConversionSettings conversion;
  CrosstalkSettings crosstalk;
  CoolingSettings cooling;
  std::string cooling_probe_times;     // sweep text, empty: default
  std::string cooling_fidelity_sweep;  // sweep text, empty: default
  ThermometrySettings thermometry;
  RbSettings rb;
  double rb_infidelity_s = 2e-4;
  double rb_infidelity_f = 1e-4;

  RunConfig();
};

// "start:step:stop" (inclusive, tolerant to rounding) or "v1, v2, ...".
std::vector<double> parse_sweep(const std::string& text);

// Default sweep of each experiment, as sweep text.
std::string default_sweep(ExperimentKind kind);

// Resolved sweep of a config.
std::vector<double> sweep_values(const RunConfig& config);

// INI-like text: [section] headers, key = value lines, '#' comments. Unknown
// sections or keys, duplicates and invalid values raise ConfigError naming
// the line and key. Missing keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every key with its default value and a one-line description.
std::string reference_config();

// Deterministic "section.key=value" listing of every parameter except the
// output directory, and its FNV-1a 64-bit hash in hex.
std::string canonical_dump(const RunConfig& config);
std::string config_hash(const RunConfig& config);

// Cross-field checks; throws ConfigError naming the offending key.
void validate(const RunConfig& config);

// Applies `key = value` as if it came from a file (used for CLI overrides).
void set_value(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value);

struct ConfigKey {
  std::string section;
  std::string key;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

}  // namespace dualion
