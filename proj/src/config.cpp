#include "dualion/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dualion {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("expected a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || std::isnan(v)) {
    throw std::invalid_argument("'" + t + "' is not a number");
  }
  return v;
}

long long to_integer(const std::string& text) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw std::invalid_argument("'" + t + "' is not an integer");
  }
  return v;
}

std::uint64_t to_u64(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t[0] == '-') throw std::invalid_argument("'" + t + "' is not an unsigned integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw std::invalid_argument("'" + t + "' is not an unsigned integer");
  }
  return v;
}

using Check = std::function<void(double)>;

Check positive() {
  return [](double v) {
    if (!(v > 0.0)) throw std::invalid_argument("must be > 0");
  };
}
Check non_negative() {
  return [](double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("must be >= 0");
  };
}
Check finite_positive() {
  return [](double v) {
    if (!(v > 0.0) || std::isinf(v)) throw std::invalid_argument("must be finite and > 0");
  };
}
Check probability() {
  return [](double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("must lie in [0, 1]");
  };
}
Check any() {
  return [](double v) {
    if (std::isinf(v)) throw std::invalid_argument("must be finite");
  };
}

template <typename Access>
ConfigKey real_key(std::string section, std::string key, std::string help, Access access,
                   Check check) {
  return ConfigKey{
      std::move(section), std::move(key), std::move(help),
      [access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); },
      [access, check](RunConfig& c, const std::string& v) {
        const double x = to_double(v);
        check(x);
        access(c) = x;
      }};
}

template <typename Access>
ConfigKey int_key(std::string section, std::string key, std::string help, Access access,
                  long long min_value) {
  return ConfigKey{
      std::move(section), std::move(key), std::move(help),
      [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
      [access, min_value](RunConfig& c, const std::string& v) {
        const long long x = to_integer(v);
        if (x < min_value || x > 2000000000LL) {
          throw std::invalid_argument("must be an integer >= " + std::to_string(min_value));
        }
        access(c) = static_cast<int>(x);
      }};
}

template <typename Access>
ConfigKey sweep_key(std::string section, std::string key, std::string help, Access access) {
  return ConfigKey{std::move(section), std::move(key), std::move(help),
                   [access](const RunConfig& c) { return access(const_cast<RunConfig&>(c)); },
                   [access](RunConfig& c, const std::string& v) {
                     const std::string t = trim(v);
                     if (!t.empty()) parse_sweep(t);
                     access(c) = t;
                   }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k;
  // run
  k.push_back({"run", "experiment", "one of the nine experiment kinds",
               [](const RunConfig& c) { return to_string(c.experiment); },
               [](RunConfig& c, const std::string& v) { c.experiment = experiment_from_string(trim(v)); }});
  k.push_back({"run", "seed", "master seed (unsigned 64-bit)",
               [](const RunConfig& c) { return std::to_string(c.seed); },
               [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }});
  k.push_back(int_key("run", "shots", "shots per sweep point", [](RunConfig& c) -> int& { return c.shots; }, 1));
  k.push_back({"run", "output_dir", "directory for curve and fit files",
               [](const RunConfig& c) { return c.output_dir; },
               [](RunConfig& c, const std::string& v) {
                 if (trim(v).empty()) throw std::invalid_argument("must not be empty");
                 c.output_dir = trim(v);
               }});
  k.push_back(sweep_key("run", "sweep", "sweep values; empty selects the experiment default",
                        [](RunConfig& c) -> std::string& { return c.sweep; }));

  // atom
  k.push_back(real_key("atom", "s_hyperfine_hz", "S1/2 hyperfine splitting",
                       [](RunConfig& c) -> double& { return c.atom.s_hyperfine_hz; }, finite_positive()));
  k.push_back(real_key("atom", "f_hyperfine_hz", "F7/2 hyperfine splitting",
                       [](RunConfig& c) -> double& { return c.atom.f_hyperfine_hz; }, finite_positive()));
  k.push_back(real_key("atom", "p_hyperfine_hz", "P1/2 hyperfine splitting",
                       [](RunConfig& c) -> double& { return c.atom.p_hyperfine_hz; }, finite_positive()));
  k.push_back(real_key("atom", "d52_leg_splitting_hz", "E(D5/2 F=3) - E(D5/2 F=2)",
                       [](RunConfig& c) -> double& { return c.atom.d52_leg_splitting_hz; }, any()));

  // modes
  k.push_back(real_key("modes", "freq_x_hz", "radial trap frequency x",
                       [](RunConfig& c) -> double& { return c.modes.freq_x_hz; }, finite_positive()));
  k.push_back(real_key("modes", "freq_y_hz", "radial trap frequency y",
                       [](RunConfig& c) -> double& { return c.modes.freq_y_hz; }, finite_positive()));
  k.push_back(real_key("modes", "freq_z_hz", "axial trap frequency",
                       [](RunConfig& c) -> double& { return c.modes.freq_z_hz; }, finite_positive()));
  k.push_back(real_key("modes", "eta", "411 nm Lamb-Dicke factor, equal for all four modes",
                       [](RunConfig& c) -> double& { return c.modes.eta; }, [](double v) {
                         if (!(v >= 0.0 && v < kMaxLambDicke)) throw std::invalid_argument("must lie in [0, 0.3)");
                       }));

  // conversion
  k.push_back(real_key("conversion", "pi_time_411", "411 nm dual-tone pi time (s)",
                       [](RunConfig& c) -> double& { return c.conversion.pi_time_411; }, finite_positive()));
  k.push_back(real_key("conversion", "pi_time_3432", "3432 nm dual-tone pi time (s)",
                       [](RunConfig& c) -> double& { return c.conversion.pi_time_3432; }, finite_positive()));
  k.push_back(real_key("conversion", "coherence_time_411", "411 nm laser coherence time (s, inf allowed)",
                       [](RunConfig& c) -> double& { return c.conversion.noise.coherence_time_411; }, positive()));
  k.push_back(real_key("conversion", "coherence_time_3432", "3432 nm laser coherence time (s, inf allowed)",
                       [](RunConfig& c) -> double& { return c.conversion.noise.coherence_time_3432; }, positive()));
  k.push_back(real_key("conversion", "amplitude_jitter_rms", "fractional Rabi amplitude jitter per pulse",
                       [](RunConfig& c) -> double& { return c.conversion.noise.amplitude_jitter_rms; }, non_negative()));
  k.push_back({"conversion", "line_shape", "per-shot detuning law: lorentzian or gaussian",
               [](const RunConfig& c) {
                 return std::string(c.conversion.noise.model == LineShape::gaussian_detuning ? "gaussian" : "lorentzian");
               },
               [](RunConfig& c, const std::string& v) {
                 const std::string t = trim(v);
                 if (t == "gaussian") {
                   c.conversion.noise.model = LineShape::gaussian_detuning;
                 } else if (t == "lorentzian") {
                   c.conversion.noise.model = LineShape::lorentzian_detuning;
                 } else {
                   throw std::invalid_argument("must be lorentzian or gaussian");
                 }
               }});
  k.push_back(real_key("conversion", "nbar", "mean phonon number per mode during conversion",
                       [](RunConfig& c) -> double& { return c.conversion.nbar; }, non_negative()));
  k.push_back(real_key("conversion", "target_round_trip_infidelity",
                       "scale coherence times to this round-trip error; 0 keeps them as given",
                       [](RunConfig& c) -> double& { return c.conversion.target_round_trip_infidelity; },
                       [](double v) {
                         if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("must lie in [0, 1)");
                       }));
  k.push_back(real_key("conversion", "spam", "state preparation and measurement error",
                       [](RunConfig& c) -> double& { return c.conversion.spam; }, probability()));

  // crosstalk
  k.push_back(real_key("crosstalk", "eps_r", "F-qubit error per Raman pi/2 pulse",
                       [](RunConfig& c) -> double& { return c.crosstalk.rates.eps_r; }, probability()));
  k.push_back(real_key("crosstalk", "eps_0", "F-qubit error per |0> cool/pump/detect cycle",
                       [](RunConfig& c) -> double& { return c.crosstalk.rates.eps_0; }, probability()));
  k.push_back(real_key("crosstalk", "eps_1", "F-qubit error per |1> cool/pump/detect cycle",
                       [](RunConfig& c) -> double& { return c.crosstalk.rates.eps_1; }, probability()));
  k.push_back(real_key("crosstalk", "t_c", "F-qubit coherence time under the cooling beam (s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.rates.t_c; }, positive()));
  k.push_back(real_key("crosstalk", "spam_raman", "F-qubit SPAM error, Raman experiment",
                       [](RunConfig& c) -> double& { return c.crosstalk.spam_raman; }, probability()));
  k.push_back(real_key("crosstalk", "spam_pump_0", "F-qubit SPAM error, |0> pump/detect experiment",
                       [](RunConfig& c) -> double& { return c.crosstalk.spam_pump_0; }, probability()));
  k.push_back(real_key("crosstalk", "spam_pump_1", "F-qubit SPAM error, |1> pump/detect experiment",
                       [](RunConfig& c) -> double& { return c.crosstalk.spam_pump_1; }, probability()));
  k.push_back(real_key("crosstalk", "spam_cooling", "F-qubit SPAM error, cooling experiment",
                       [](RunConfig& c) -> double& { return c.crosstalk.spam_cooling; }, probability()));
  k.push_back(real_key("crosstalk", "prep_target_round_trip_infidelity",
                       "conversion calibration for F-qubit preparation; 0 keeps coherence times",
                       [](RunConfig& c) -> double& { return c.crosstalk.conversion.target_round_trip_infidelity; },
                       [](double v) {
                         if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("must lie in [0, 1)");
                       }));
  k.push_back(real_key("crosstalk", "raman_pi2_time", "S-qubit Raman pi/2 time (s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.raman_pi2_time; }, finite_positive()));
  k.push_back(real_key("crosstalk", "raman_decoherence_time", "Raman Rabi decay time (s, inf allowed)",
                       [](RunConfig& c) -> double& { return c.crosstalk.raman_decoherence_time; }, positive()));
  k.push_back(int_key("crosstalk", "pump_cycles", "optical pumping cycles per S-qubit reset",
                      [](RunConfig& c) -> int& { return c.crosstalk.pump_cycles; }, 0));
  k.push_back(real_key("crosstalk", "pump_residual", "|1> population left per pumping cycle",
                       [](RunConfig& c) -> double& { return c.crosstalk.pump_residual; }, probability()));
  k.push_back(real_key("crosstalk", "microwave_pi_error", "S-qubit microwave pi pulse error",
                       [](RunConfig& c) -> double& { return c.crosstalk.microwave_pi_error; }, probability()));

  // detection
  k.push_back(real_key("detection", "bright_rate", "bright count rate (1/s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.detection.bright_rate; }, non_negative()));
  k.push_back(real_key("detection", "dark_rate", "dark count rate (1/s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.detection.dark_rate; }, non_negative()));
  k.push_back(real_key("detection", "duration", "detection window (s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.detection.duration; }, finite_positive()));
  k.push_back(int_key("detection", "threshold", "counts needed for a bright outcome",
                      [](RunConfig& c) -> int& { return c.crosstalk.detection.threshold; }, 1));
  k.push_back(real_key("detection", "leakage_bright_to_dark", "bright to dark flip rate (1/s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.detection.leakage_bright_to_dark; }, non_negative()));
  k.push_back(real_key("detection", "leakage_dark_to_bright", "dark to bright flip rate (1/s)",
                       [](RunConfig& c) -> double& { return c.crosstalk.detection.leakage_dark_to_bright; }, non_negative()));

  // cooling
  k.push_back(real_key("cooling", "steady_state_temperature", "Doppler steady-state temperature (K)",
                       [](RunConfig& c) -> double& { return c.cooling.steady_state_temperature; }, finite_positive()));
  k.push_back(real_key("cooling", "heating_rate", "heating rate (quanta/s per mode)",
                       [](RunConfig& c) -> double& { return c.cooling.heating_rate; }, non_negative()));
  k.push_back(real_key("cooling", "heating_time", "heating duration before cooling (s)",
                       [](RunConfig& c) -> double& { return c.cooling.heating_time; }, non_negative()));
  k.push_back(real_key("cooling", "cooling_rate", "relaxation rate at full participation (1/s)",
                       [](RunConfig& c) -> double& { return c.cooling.cooling_rate; }, non_negative()));
  k.push_back(real_key("cooling", "participation_sympathetic", "mode participation, one cooled ion",
                       [](RunConfig& c) -> double& { return c.cooling.participation_sympathetic; }, non_negative()));
  k.push_back(real_key("cooling", "participation_global", "mode participation, both ions cooled",
                       [](RunConfig& c) -> double& { return c.cooling.participation_global; }, non_negative()));
  k.push_back(real_key("cooling", "omega0", "411 nm carrier Rabi frequency for thermometry (rad/s)",
                       [](RunConfig& c) -> double& { return c.cooling.omega0; }, finite_positive()));
  k.push_back(int_key("cooling", "probe_shots", "shots per thermometry probe time",
                      [](RunConfig& c) -> int& { return c.cooling.probe_shots; }, 1));
  k.push_back(sweep_key("cooling", "probe_times", "thermometry probe times (s); empty: 0:1e-7:3e-5",
                        [](RunConfig& c) -> std::string& { return c.cooling_probe_times; }));
  k.push_back(sweep_key("cooling", "fidelity_sweep", "F-qubit cooling times (s); empty: 0:0.005:0.05",
                        [](RunConfig& c) -> std::string& { return c.cooling_fidelity_sweep; }));

  // thermometry
  k.push_back(real_key("thermometry", "temperature", "true effective temperature (K)",
                       [](RunConfig& c) -> double& { return c.thermometry.temperature; }, finite_positive()));
  k.push_back(real_key("thermometry", "omega0", "true carrier Rabi frequency (rad/s)",
                       [](RunConfig& c) -> double& { return c.thermometry.omega0; }, finite_positive()));

  // rb
  k.push_back(real_key("rb", "infidelity_s", "S-qubit average Clifford infidelity",
                       [](RunConfig& c) -> double& { return c.rb_infidelity_s; }, [](double v) {
                         if (!(v >= 0.0 && v <= 0.5)) throw std::invalid_argument("must lie in [0, 0.5]");
                       }));
  k.push_back(real_key("rb", "infidelity_f", "F-qubit average Clifford infidelity",
                       [](RunConfig& c) -> double& { return c.rb_infidelity_f; }, [](double v) {
                         if (!(v >= 0.0 && v <= 0.5)) throw std::invalid_argument("must lie in [0, 0.5]");
                       }));
  k.push_back({"rb", "error_model", "per-gate error: depolarizing or dephasing",
               [](const RunConfig& c) {
                 return std::string(c.rb.model == GateErrorModel::dephasing ? "dephasing" : "depolarizing");
               },
               [](RunConfig& c, const std::string& v) {
                 const std::string t = trim(v);
                 if (t == "depolarizing") {
                   c.rb.model = GateErrorModel::depolarizing;
                 } else if (t == "dephasing") {
                   c.rb.model = GateErrorModel::dephasing;
                 } else {
                   throw std::invalid_argument("must be depolarizing or dephasing");
                 }
               }});
  k.push_back(real_key("rb", "readout_flip", "symmetric readout flip probability",
                       [](RunConfig& c) -> double& { return c.rb.readout_flip; }, [](double v) {
                         if (!(v >= 0.0 && v <= 0.5)) throw std::invalid_argument("must lie in [0, 0.5]");
                       }));
  k.push_back(int_key("rb", "sequences", "random sequences per length",
                      [](RunConfig& c) -> int& { return c.rb.sequences; }, 1));
  return k;
}

}  // namespace

RunConfig::RunConfig() { crosstalk.conversion.target_round_trip_infidelity = 0.0; }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

std::vector<double> parse_sweep(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("sweep is empty");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_double(item));
    if (parts.size() != 3) throw std::invalid_argument("range sweep must be start:step:stop");
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (!(step > 0.0) || !(stop >= start)) {
      throw std::invalid_argument("range sweep needs step > 0 and stop >= start");
    }
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e7) throw std::invalid_argument("range sweep has too many points");
    for (long i = 0; i <= static_cast<long>(count); ++i) out.push_back(start + i * step);
  } else {
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw std::invalid_argument("sweep must be strictly increasing");
  }
  return out;
}

std::string default_sweep(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::conversion_cycle: return "0:2:20";
    case ExperimentKind::raman_crosstalk: return "0:100:1000";
    case ExperimentKind::pump_detect_crosstalk_0:
    case ExperimentKind::pump_detect_crosstalk_1: return "0:10:100";
    case ExperimentKind::sympathetic_cooling:
    case ExperimentKind::global_cooling: return "0:0.0002:0.002";
    case ExperimentKind::rb_s_qubit:
    case ExperimentKind::rb_f_qubit: return "0:200:2000";
    case ExperimentKind::thermometry: return "0:1e-7:3e-5";
  }
  return "0";
}

std::vector<double> sweep_values(const RunConfig& config) {
  return parse_sweep(config.sweep.empty() ? default_sweep(config.experiment) : config.sweep);
}

void set_value(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.section == section && k.key == key) {
      try {
        k.set(config, value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(section + "." + key + ": " + e.what(), 0, section + "." + key);
      }
      return;
    }
  }
  throw ConfigError("unknown key " + section + "." + key, 0, section + "." + key);
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> sections;
  for (const auto& k : config_keys()) sections.insert(k.section);
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) {
        throw ConfigError(where + "unknown section [" + section + "]", line_no, section);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(where + "key '" + key + "' appears before any [section]", line_no, key);
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key " + full, line_no, full);
    try {
      set_value(config, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what(), line_no, full);
    }
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& c) {
  const auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what, 0, key);
  };
  if (!(c.modes.freq_x_hz > c.modes.freq_z_hz && c.modes.freq_y_hz > c.modes.freq_z_hz)) {
    fail("modes.freq_z_hz", "must be below both radial frequencies");
  }
  try {
    sweep_values(c);
  } catch (const std::invalid_argument& e) {
    fail("run.sweep", e.what());
  }
  double eta_sum = 0.0;
  for (int i = 0; i < 4; ++i) eta_sum += (c.conversion.nbar + 0.5) * c.modes.eta * c.modes.eta;
  if (!(eta_sum < 1.0)) fail("conversion.nbar", "first-order Rabi factor would be non-positive");
  if (c.cooling.participation_sympathetic > c.cooling.participation_global) {
    fail("cooling.participation_sympathetic", "must not exceed participation_global");
  }
}

std::string reference_config() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "# dualion reference configuration: every key at its default value.\n";
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = k.section;
      out << "\n[" << section << "]\n";
    }
    out << "# " << k.help << "\n" << k.key << " = " << k.get(defaults) << "\n";
  }
  return out.str();
}

std::string canonical_dump(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& k : config_keys()) {
    if (k.section == "run" && k.key == "output_dir") continue;
    out << k.section << "." << k.key << "=" << k.get(config) << "\n";
  }
  return out.str();
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_dump(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dualion
