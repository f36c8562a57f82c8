#include "dualion/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "json.hpp"

namespace dualion {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan; non-finite values are written as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json fit_json(const std::string& name, const FitResult& fit) {
  Json j;
  j["name"] = name;
  j["model"] = fit.model;
  Json params = Json::object();
  Json errs = Json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    params[fit.names[i]] = number(fit.params[i]);
    errs[fit.names[i]] = number(fit.stderrs[i]);
  }
  j["parameters"] = params;
  j["stderrs"] = errs;
  j["residual_rss"] = number(fit.residual_rss);
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  Json derived = Json::object();
  for (const auto& [k, v] : fit.derived) derived[k] = number(v);
  j["derived"] = derived;
  return j;
}

Json failed_fit_json(const std::string& name, const std::string& model, const std::string& why) {
  Json j;
  j["name"] = name;
  j["model"] = model;
  j["converged"] = false;
  j["error"] = why;
  return j;
}

class Writer {
 public:
  explicit Writer(const RunConfig& config) : dir_(config.output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw OutputError("cannot create output directory " + dir_.string());
    }
  }

  void write(const std::string& name, const std::string& content, RunReport& report) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw OutputError("failed writing " + path.string());
    report.files.push_back(path.string());
  }

 private:
  std::filesystem::path dir_;
};

// Fits with exceptions mapped onto non-convergence.
template <typename F>
void add_fit(Json& fits, bool& converged, const std::string& name, const std::string& model,
             F&& fit_fn, FitResult* out = nullptr) {
  try {
    FitResult fit = fit_fn();
    if (!fit.converged) converged = false;
    fits.push_back(fit_json(name, fit));
    if (out) *out = fit;
  } catch (const std::invalid_argument& e) {
    converged = false;
    fits.push_back(failed_fit_json(name, model, e.what()));
  }
}

}  // namespace

std::string curve_csv(const std::vector<CurveRecord>& curve) {
  const bool mub = !curve.empty() && curve.front().per_mub.has_value();
  std::string out = "sweep_value,mean,stderr";
  if (mub) {
    for (int k = 0; k < 6; ++k) out += ",mub_" + std::to_string(k);
  }
  out += "\n";
  for (const auto& r : curve) {
    out += fmt(r.sweep_value) + "," + fmt(r.mean) + "," + fmt(r.std_error);
    if (mub) {
      for (int k = 0; k < 6; ++k) out += "," + (r.per_mub ? fmt((*r.per_mub)[k]) : std::string("nan"));
    }
    out += "\n";
  }
  return out;
}

RunReport run_experiment(const RunConfig& config) {
  validate(config);
  ExperimentPlan plan;
  plan.kind = config.experiment;
  plan.sweep = sweep_values(config);
  plan.shots = config.shots;
  plan.seed = config.seed;
  const ModeSet modes = config.modes.build();
  CrosstalkSettings crosstalk = config.crosstalk;
  CoolingSettings cooling = config.cooling;
  if (!config.cooling_probe_times.empty()) cooling.probe_times = parse_sweep(config.cooling_probe_times);
  if (!config.cooling_fidelity_sweep.empty()) {
    cooling.fidelity_sweep = parse_sweep(config.cooling_fidelity_sweep);
  }

  const std::string name = to_string(plan.kind);
  Writer writer(config);
  RunReport report;
  Json summary;
  summary["experiment"] = name;
  summary["seed"] = config.seed;
  summary["config_hash"] = config_hash(config);
  summary["shots"] = config.shots;
  Json fits = Json::array();
  Json derived = Json::object();
  bool converged = true;

  switch (plan.kind) {
    case ExperimentKind::conversion_cycle: {
      const ConversionRun run = run_conversion_cycle(plan, config.conversion, modes);
      writer.write(name + ".csv", curve_csv(run.curve), report);
      derived["coherence_scale"] = number(run.coherence_scale);
      derived["expected_round_trip_infidelity"] = number(run.expected_round_trip);
      const AtomModel atom(config.atom);
      derived["sideband_411_hz"] = atom.dual_tone_sideband({levels::kS0, levels::kD2},
                                                           {levels::kS1, levels::kD3});
      derived["sideband_3432_hz"] = atom.dual_tone_sideband({levels::kD2, levels::kF0},
                                                            {levels::kD3, levels::kF1});
      add_fit(fits, converged, "conversion", "power_decay",
              [&] { return fit_power_decay(to_fit_points(run.curve)); });
      break;
    }
    case ExperimentKind::raman_crosstalk:
    case ExperimentKind::pump_detect_crosstalk_0:
    case ExperimentKind::pump_detect_crosstalk_1: {
      const CrosstalkRun run =
          plan.kind == ExperimentKind::raman_crosstalk
              ? run_raman_crosstalk(plan, crosstalk, modes)
              : run_pump_detect_crosstalk(plan, crosstalk, modes,
                                          plan.kind == ExperimentKind::pump_detect_crosstalk_1);
      writer.write(name + ".csv", curve_csv(run.curve), report);
      writer.write(name + "_s_trace.csv", curve_csv(run.s_trace), report);
      derived["discard_fraction"] = number(run.discard_fraction);
      add_fit(fits, converged, "crosstalk", "power_decay",
              [&] { return fit_power_decay(to_fit_points(run.curve)); });
      break;
    }
    case ExperimentKind::sympathetic_cooling:
    case ExperimentKind::global_cooling: {
      const bool sympathetic = plan.kind == ExperimentKind::sympathetic_cooling;
      const CoolingRun run = run_cooling(plan, cooling, crosstalk, modes, sympathetic);
      writer.write(name + ".csv", curve_csv(run.temperature), report);
      if (!run.all_converged) converged = false;
      Json truth = Json::array();
      for (double t : run.true_temperature) truth.push_back(number(t));
      derived["true_temperature_K"] = truth;
      if (!run.temperature.empty()) {
        derived["final_temperature_K"] = number(run.temperature.back().mean);
        derived["final_temperature_stderr_K"] = number(run.temperature.back().std_error);
      }
      derived["steady_state_temperature_K"] = number(cooling.steady_state_temperature);
      if (sympathetic) {
        writer.write(name + "_fidelity.csv", curve_csv(run.fidelity), report);
        derived["discard_fraction"] = number(run.discard_fraction);
        FitResult fit;
        add_fit(fits, converged, "coherence", "exp_decay",
                [&] { return fit_exp_decay(to_fit_points(run.fidelity)); }, &fit);
        if (!fit.params.empty()) {
          const double tc = fit.derived.at("Tc");
          derived["Tc"] = number(tc);
          derived["Tc_stderr"] = number(fit.derived.at("Tc_stderr"));
          derived["crosstalk_1ms"] = number(-std::expm1(-1e-3 / tc));
        }
      }
      break;
    }
    case ExperimentKind::rb_s_qubit:
    case ExperimentKind::rb_f_qubit: {
      RbSettings rb = config.rb;
      rb.gate_infidelity = plan.kind == ExperimentKind::rb_s_qubit ? config.rb_infidelity_s
                                                                   : config.rb_infidelity_f;
      const auto curve = run_rb(plan, rb);
      writer.write(name + ".csv", curve_csv(curve), report);
      add_fit(fits, converged, "rb", "rb", [&] { return fit_rb(to_fit_points(curve)); });
      break;
    }
    case ExperimentKind::thermometry: {
      const auto curve = run_thermometry(plan, config.thermometry, modes);
      writer.write(name + ".csv", curve_csv(curve), report);
      derived["true_temperature_K"] = number(config.thermometry.temperature);
      derived["true_omega0"] = number(config.thermometry.omega0);
      add_fit(fits, converged, "thermal", "thermal_rabi",
              [&] { return fit_thermal_rabi(to_fit_points(curve), modes); });
      break;
    }
  }

  summary["fits"] = fits;
  summary["derived"] = derived;
  summary["converged"] = converged;
  writer.write(name + "_fit.json", summary.dump(2) + "\n", report);
  report.converged = converged;
  return report;
}

int run_with_exit_code(const RunConfig& config) {
  try {
    const RunReport report = run_experiment(config);
    if (!report.converged) {
      std::cerr << "error: a fit did not converge; partial outputs written to " << config.output_dir
                << "\n";
      return kExitNonConvergence;
    }
    return kExitSuccess;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const OutputError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
}

}  // namespace dualion
