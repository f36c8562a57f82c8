#include "dualion/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "dualion/clifford.hpp"

namespace dualion {

using cd = std::complex<double>;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kNames[] = {
    "conversion_cycle",    "raman_crosstalk", "pump_detect_crosstalk_0", "pump_detect_crosstalk_1",
    "sympathetic_cooling", "global_cooling",  "rb_s_qubit",              "rb_f_qubit",
    "thermometry",
};

int as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw std::invalid_argument(std::string(what) + " sweep values must be non-negative integers");
  }
  return static_cast<int>(v);
}

Eigen::VectorXcd lift(const Eigen::Vector2cd& psi, std::size_t dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v(0) = psi(0);
  v(1) = psi(1);
  return v;
}

bool bernoulli(double p, Rng& rng) { return rng.uniform() < p; }

// N-fold composition of a qubit dephasing channel is dephasing with
// (1 - 2 p_N) = (1 - 2 p)^N.
Channel repeated_dephasing(const Channel& step, int n) {
  if (step.kind() != Channel::Kind::dephasing) {
    throw std::invalid_argument("repeated_dephasing needs a dephasing channel");
  }
  const double p = 0.5 * (1.0 - std::pow(1.0 - 2.0 * step.strength(), n));
  return Channel::dephasing(std::clamp(p, 0.0, 1.0));
}

struct Tally {
  long success = 0;
  long trials = 0;
  std::array<long, 6> mub_success{};
  std::array<long, 6> mub_trials{};

  void add(int mub, bool ok) {
    ++trials;
    ++mub_trials[static_cast<std::size_t>(mub)];
    if (ok) {
      ++success;
      ++mub_success[static_cast<std::size_t>(mub)];
    }
  }

  CurveRecord record(double x) const {
    CurveRecord r = binomial_record(x, success, trials);
    std::array<double, 6> per{};
    for (std::size_t i = 0; i < 6; ++i) {
      per[i] = mub_trials[i] > 0 ? double(mub_success[i]) / double(mub_trials[i]) : kNaN;
    }
    r.per_mub = per;
    return r;
  }
};

std::vector<double> uniform_nbar(double nbar, const ModeSet& modes) {
  return std::vector<double>(modes.size(), nbar);
}

}  // namespace

std::string to_string(ExperimentKind kind) { return kNames[static_cast<int>(kind)]; }

ExperimentKind experiment_from_string(const std::string& name) {
  for (auto kind : kAllExperiments) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::uint64_t experiment_id(ExperimentKind kind) { return static_cast<std::uint64_t>(kind) + 1; }

void ExperimentPlan::validate() const {
  if (shots < 1) throw std::domain_error("shots must be >= 1");
  if (sweep.empty()) throw std::domain_error("sweep must not be empty");
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i] > sweep[i - 1])) throw std::domain_error("sweep must be strictly increasing");
  }
}

CurveRecord binomial_record(double sweep_value, long successes, long trials) {
  CurveRecord r;
  r.sweep_value = sweep_value;
  if (trials <= 0) {
    r.mean = kNaN;
    r.std_error = kNaN;
    return r;
  }
  const double n = static_cast<double>(trials);
  const double smoothed = (successes + 1.0) / (n + 2.0);
  r.mean = successes / n;
  r.std_error = std::sqrt(smoothed * (1.0 - smoothed) / n);
  return r;
}

std::array<Eigen::Vector2cd, 6> mub_states() {
  const double r = 1.0 / std::sqrt(2.0);
  const cd i(0.0, 1.0);
  return {Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0), Eigen::Vector2cd(r, r),
          Eigen::Vector2cd(r, -r),    Eigen::Vector2cd(r, r * i), Eigen::Vector2cd(r, -r * i)};
}

std::vector<FitPoint> to_fit_points(const std::vector<CurveRecord>& curve) {
  std::vector<FitPoint> out;
  for (const auto& c : curve) {
    if (std::isfinite(c.mean) && c.std_error > 0.0) out.push_back({c.sweep_value, c.mean, c.std_error});
  }
  return out;
}

// ---------------------------------------------------------------- conversion

double expected_pi_transfer(double pi_time, double coherence_time, LineShape model,
                            const std::vector<double>& amplitude_factors) {
  if (!(pi_time > 0.0)) throw std::domain_error("pi time must be > 0");
  const double rabi = constants::kPi / pi_time;
  const double width = detuning_width(coherence_time);
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (double a : amplitude_factors) {
    const double w = rabi * a;
    const auto transfer = [&](double delta) {
      const double g2 = w * w + delta * delta;
      if (g2 == 0.0) return 0.0;
      const double s = std::sin(0.5 * std::sqrt(g2) * pi_time);
      return w * w / g2 * s * s;
    };
    // |delta| > 50 W carries < 1e-7 of the transfer; beyond it sin^2 only
    // adds oscillations for the quadrature to chase.
    const double cap = 50.0 * w;
    double e = 0.0;
    if (width == 0.0) {
      e = transfer(0.0);
    } else if (model == LineShape::lorentzian_detuning) {
      const double gamma = 0.5 * width;
      const auto f = [&](double u) { return transfer(gamma * std::tan(u)); };
      const double h = std::atan(cap / gamma);
      e = gauss_kronrod<double, 61>::integrate(f, -h, h, 12, 1e-12) / constants::kPi;
    } else {
      const auto f = [&](double z) {
        return transfer(width * z) * std::exp(-0.5 * z * z) / std::sqrt(constants::kTwoPi);
      };
      const double h = std::min(12.0, cap / width);
      e = gauss_kronrod<double, 61>::integrate(f, -h, h, 12, 1e-12);
    }
    total += e;
  }
  return total / static_cast<double>(amplitude_factors.size());
}

std::vector<double> amplitude_samples(ConversionLaser laser, const NoiseConfig& noise, double nbar,
                                      const ModeSet& modes, int count) {
  const bool thermal = laser == ConversionLaser::laser411 && nbar > 0.0;
  const bool jitter = noise.amplitude_jitter_rms > 0.0;
  if (!thermal && !jitter) return {1.0};
  Rng rng(0x41c64e6da3bc0074ULL);
  const auto occupations = uniform_nbar(nbar, modes);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double a = 1.0;
    if (jitter) a *= 1.0 + noise.amplitude_jitter_rms * normal(rng);
    if (thermal) a *= thermal_rabi_factor(sample_fock(occupations, rng), occupations, modes);
    out.push_back(a);
  }
  return out;
}

namespace {

double expected_pair(const ConversionSettings& s, const ModeSet& modes) {
  const auto amp411 = amplitude_samples(ConversionLaser::laser411, s.noise, s.nbar, modes);
  const auto amp3432 = amplitude_samples(ConversionLaser::laser3432, s.noise, s.nbar, modes);
  return expected_pi_transfer(s.pi_time_411, s.noise.coherence_time_411, s.noise.model, amp411) *
         expected_pi_transfer(s.pi_time_3432, s.noise.coherence_time_3432, s.noise.model, amp3432);
}

ConversionSettings scaled(ConversionSettings s, double factor) {
  s.noise.coherence_time_411 *= factor;
  s.noise.coherence_time_3432 *= factor;
  return s;
}

}  // namespace

double expected_one_way_infidelity(const ConversionSettings& s, const ModeSet& modes) {
  return 1.0 - expected_pair(s, modes);
}

double expected_round_trip_infidelity(const ConversionSettings& s, const ModeSet& modes) {
  const double p = expected_pair(s, modes);
  return 1.0 - p * p;
}

double calibrate_coherence_scale(const ConversionSettings& s, const ModeSet& modes, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::domain_error("target infidelity outside (0, 1)");
  const auto f = [&](double log_scale) {
    return expected_round_trip_infidelity(scaled(s, std::exp(log_scale)), modes) - target;
  };
  double lo = std::log(1e-4), hi = std::log(1e6);
  if (f(lo) < 0.0 || f(hi) > 0.0) {
    throw std::domain_error("target round-trip infidelity is out of reach of the noise model");
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(45), iters);
  return std::exp(0.5 * (root.first + root.second));
}

ConversionSettings calibrated(const ConversionSettings& s, const ModeSet& modes) {
  if (!(s.target_round_trip_infidelity > 0.0)) return s;
  return scaled(s, calibrate_coherence_scale(s, modes, s.target_round_trip_infidelity));
}

ConversionRun run_conversion_cycle(const ExperimentPlan& plan, const ConversionSettings& settings,
                                   const ModeSet& modes) {
  plan.validate();
  if (!(settings.spam >= 0.0 && settings.spam <= 1.0)) throw std::domain_error("spam outside [0, 1]");
  ConversionRun run;
  const ConversionSettings s = calibrated(settings, modes);
  if (settings.target_round_trip_infidelity > 0.0) {
    run.coherence_scale = s.noise.coherence_time_411 / settings.noise.coherence_time_411;
  }
  run.expected_round_trip = expected_round_trip_infidelity(s, modes);

  const PulseSpec p411 = dual_tone_411(s.pi_time_411);
  const PulseSpec p3432 = dual_tone_3432(s.pi_time_3432);
  const auto nbar = uniform_nbar(s.nbar, modes);
  const ModeSet* mode_ptr = s.nbar > 0.0 ? &modes : nullptr;
  const std::vector<double>* nbar_ptr = s.nbar > 0.0 ? &nbar : nullptr;
  const Basis basis = conversion_basis();
  const Basis s_basis = s_qubit_basis();
  const Basis f_basis = f_qubit_basis();
  const auto mubs = mub_states();
  const std::uint64_t id = experiment_id(plan.kind);

  for (std::size_t i = 0; i < plan.sweep.size(); ++i) {
    const int rounds = as_count(plan.sweep[i], "conversion");
    Tally tally;
    for (int shot = 0; shot < plan.shots; ++shot) {
      const int m = shot % 6;
      Rng rng = make_stream(plan.seed, {id, i, 0, static_cast<std::uint64_t>(shot)});
      DensityMatrix rho = DensityMatrix::pure(basis, lift(mubs[static_cast<std::size_t>(m)], 6));
      double survival = 1.0;
      for (int k = 0; k < rounds && survival > 0.0; ++k) {
        double kept = 0.0;
        auto there = convert_s_to_f(rho, p411, p3432, s.noise, rng, mode_ptr, nbar_ptr);
        rho = embed(restrict_to(there.state, f_basis, &kept), basis);
        survival *= kept;
        auto back = convert_f_to_s(rho, p3432, p411, s.noise, rng, mode_ptr, nbar_ptr);
        rho = embed(restrict_to(back.state, s_basis, &kept), basis);
        survival *= kept;
      }
      const double fid = fidelity(rho, lift(mubs[static_cast<std::size_t>(m)], 6));
      tally.add(m, bernoulli((1.0 - s.spam) * survival * fid, rng));
    }
    run.curve.push_back(tally.record(plan.sweep[i]));
  }
  return run;
}

// ------------------------------------------------------------------ crosstalk

FPrepResult prepare_f_qubit(const Eigen::Vector2cd& psi, const ConversionSettings& settings,
                            const ModeSet& modes, Rng& rng) {
  const Basis basis = conversion_basis();
  const auto nbar = uniform_nbar(settings.nbar, modes);
  const bool thermal = settings.nbar > 0.0;
  const auto r = convert_s_to_f(DensityMatrix::pure(basis, lift(psi, 6)),
                                dual_tone_411(settings.pi_time_411),
                                dual_tone_3432(settings.pi_time_3432), settings.noise, rng,
                                thermal ? &modes : nullptr, thermal ? &nbar : nullptr);
  double kept = 0.0;
  DensityMatrix f = restrict_to(r.state, f_qubit_basis(), &kept);
  return FPrepResult{std::move(f), bernoulli(kept, rng)};
}

namespace {

// F-qubit MUB fidelity after a sweep-dependent channel.
template <typename ChannelFor>
std::vector<CurveRecord> spectator_curve(const ExperimentPlan& plan,
                                         const std::vector<double>& sweep,
                                         const ConversionSettings& prep, const ModeSet& modes,
                                         double spam, std::uint64_t substream,
                                         ChannelFor channel_for, double* discard_fraction) {
  if (!(spam >= 0.0 && spam <= 1.0)) throw std::domain_error("spam outside [0, 1]");
  const auto mubs = mub_states();
  const std::uint64_t id = experiment_id(plan.kind);
  std::vector<CurveRecord> curve;
  long discarded = 0, total = 0;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const Channel channel = channel_for(sweep[i]);
    Tally tally;
    for (int shot = 0; shot < plan.shots; ++shot) {
      const int m = shot % 6;
      Rng rng = make_stream(plan.seed, {id, i, substream, static_cast<std::uint64_t>(shot)});
      const auto& psi = mubs[static_cast<std::size_t>(m)];
      FPrepResult f = prepare_f_qubit(psi, prep, modes, rng);
      ++total;
      if (!f.kept) {
        ++discarded;
        continue;
      }
      const double fid = fidelity(apply_channel(f.state, channel), psi);
      tally.add(m, bernoulli((1.0 - spam) * fid, rng));
    }
    curve.push_back(tally.record(sweep[i]));
  }
  if (discard_fraction) *discard_fraction = total > 0 ? double(discarded) / double(total) : 0.0;
  return curve;
}

std::vector<CurveRecord> binomial_trace(const std::vector<double>& xs,
                                        const std::vector<double>& probs, long trials, Rng& rng) {
  std::vector<CurveRecord> out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    std::binomial_distribution<long> dist(trials, std::clamp(probs[k], 0.0, 1.0));
    out.push_back(binomial_record(xs[k], dist(rng), trials));
  }
  return out;
}

}  // namespace

CrosstalkRun run_raman_crosstalk(const ExperimentPlan& plan, const CrosstalkSettings& settings,
                                 const ModeSet& modes) {
  plan.validate();
  settings.rates.validate();
  CrosstalkRun run;
  const Channel step = crosstalk_channel(CrosstalkOp::raman_pi2, settings.rates);
  run.curve = spectator_curve(
      plan, plan.sweep, settings.conversion, modes, settings.spam_raman, 0,
      [&](double n) { return repeated_dephasing(step, as_count(n, "Raman pulse")); },
      &run.discard_fraction);

  std::vector<double> times = settings.raman_trace_times;
  if (times.empty()) {
    for (int k = 0; k <= 96; ++k) times.push_back(0.25 * k * settings.raman_pi2_time);
  }
  const double rabi = constants::kPi / (2.0 * settings.raman_pi2_time);
  std::vector<double> probs;
  for (double t : times) {
    const double decay = std::isinf(settings.raman_decoherence_time)
                             ? 1.0
                             : std::exp(-t / settings.raman_decoherence_time);
    probs.push_back(0.5 * (1.0 - decay * std::cos(rabi * t)));
  }
  Rng rng = make_stream(plan.seed, {experiment_id(plan.kind), 0, 1, 0});
  run.s_trace = binomial_trace(times, probs, plan.shots, rng);
  return run;
}

CrosstalkRun run_pump_detect_crosstalk(const ExperimentPlan& plan,
                                       const CrosstalkSettings& settings, const ModeSet& modes,
                                       bool with_pi_pulse) {
  plan.validate();
  settings.rates.validate();
  settings.detection.validate();
  CrosstalkRun run;
  const CrosstalkOp op = with_pi_pulse ? CrosstalkOp::pump_detect_1 : CrosstalkOp::pump_detect_0;
  const Channel step = crosstalk_channel(op, settings.rates);
  const double spam = with_pi_pulse ? settings.spam_pump_1 : settings.spam_pump_0;
  run.curve = spectator_curve(
      plan, plan.sweep, settings.conversion, modes, spam, 0,
      [&](double n) { return repeated_dephasing(step, as_count(n, "cycle")); },
      &run.discard_fraction);

  // One S-qubit cycle: pump from the scrambled post-detection state, optional
  // microwave pi pulse, then direct detection.
  const Basis sb = s_qubit_basis();
  DensityMatrix s(sb, 0.5 * Eigen::MatrixXcd::Identity(2, 2));
  s = optical_pump_to_0(s, settings.pump_cycles, settings.pump_residual);
  if (with_pi_pulse) {
    if (!(settings.microwave_pi_error >= 0.0 && settings.microwave_pi_error <= 1.0)) {
      throw std::domain_error("microwave pi error outside [0, 1]");
    }
    const double area = 2.0 * std::asin(std::sqrt(1.0 - settings.microwave_pi_error));
    s = apply_rabi(s, PulseSpec::single({levels::kS0, levels::kS1}, area / 1e-6, 0.0, 0.0, 1e-6));
  }
  const double p_one = s.population(levels::kS1);
  const std::uint64_t id = experiment_id(plan.kind);
  for (std::size_t i = 0; i < plan.sweep.size(); ++i) {
    const long cycles = std::max(1, as_count(plan.sweep[i], "cycle"));
    const long trials = cycles * plan.shots;
    Rng rng = make_stream(plan.seed, {id, i, 1, 0});
    long bright = 0;
    for (long k = 0; k < trials; ++k) {
      const bool is_one = rng.uniform() < p_one;
      if (detect_bright_dark(is_one, settings.detection, rng).bright) ++bright;
    }
    run.s_trace.push_back(binomial_record(plan.sweep[i], bright, trials));
  }
  return run;
}

// -------------------------------------------------------------------- cooling

std::vector<CurveRecord> sample_carrier_trace(const std::vector<double>& times, double omega0,
                                              const std::vector<double>& nbar,
                                              const ModeSet& modes, int shots, Rng& rng) {
  if (shots < 1) throw std::domain_error("probe shots must be >= 1");
  std::vector<double> probs;
  for (double t : times) probs.push_back(thermal_carrier_signal(t, omega0, nbar, modes));
  return binomial_trace(times, probs, shots, rng);
}

CoolingRun run_cooling(const ExperimentPlan& plan, const CoolingSettings& cooling,
                       const CrosstalkSettings& crosstalk, const ModeSet& modes,
                       bool sympathetic) {
  plan.validate();
  modes.validate();
  CoolingRun run;
  std::vector<double> ss;
  for (const auto& m : modes.modes) {
    ss.push_back(mean_occupation(m.omega, cooling.steady_state_temperature));
  }
  const ThermalState hot = heating_step(ThermalState::with_occupations(ss), modes,
                                        cooling.heating_time, cooling.heating_rate);
  const double part =
      sympathetic ? cooling.participation_sympathetic : cooling.participation_global;
  const std::vector<double> participation(modes.size(), part);
  std::vector<double> probe = cooling.probe_times;
  if (probe.empty()) {
    for (int k = 0; k <= 300; ++k) probe.push_back(k * 0.1e-6);
  }
  const std::uint64_t id = experiment_id(plan.kind);
  for (std::size_t i = 0; i < plan.sweep.size(); ++i) {
    const double t = plan.sweep[i];
    const auto nbar = cooling_step(hot, modes, t, cooling.cooling_rate, ss, participation)
                          .occupations(modes);
    run.true_temperature.push_back(temperature_for_occupation(modes.modes[0].omega, nbar[0]));
    Rng rng = make_stream(plan.seed, {id, i, 2, 0});
    const auto trace = sample_carrier_trace(probe, cooling.omega0, nbar, modes,
                                            cooling.probe_shots, rng);
    CurveRecord rec;
    rec.sweep_value = t;
    try {
      const FitResult fit = fit_thermal_rabi(to_fit_points(trace), modes);
      rec.mean = fit.param("T");
      rec.std_error = fit.param_stderr("T");
      if (!fit.converged) run.all_converged = false;
    } catch (const std::invalid_argument&) {
      rec.mean = kNaN;
      rec.std_error = kNaN;
      run.all_converged = false;
    }
    run.temperature.push_back(rec);
  }
  if (sympathetic) {
    std::vector<double> sweep = cooling.fidelity_sweep;
    if (sweep.empty()) {
      for (int k = 0; k <= 10; ++k) sweep.push_back(k * 5e-3);
    }
    run.fidelity = spectator_curve(
        plan, sweep, crosstalk.conversion, modes, crosstalk.spam_cooling, 3,
        [&](double dt) { return crosstalk_channel(CrosstalkOp::cooling, crosstalk.rates, dt); },
        &run.discard_fraction);
  }
  return run;
}

// ---------------------------------------------------------------- benchmarking

std::vector<CurveRecord> run_rb(const ExperimentPlan& plan, const RbSettings& settings) {
  plan.validate();
  if (!(settings.gate_infidelity >= 0.0 && settings.gate_infidelity <= 0.5)) {
    throw std::domain_error("gate infidelity outside [0, 0.5]");
  }
  if (!(settings.readout_flip >= 0.0 && settings.readout_flip <= 0.5)) {
    throw std::domain_error("readout flip outside [0, 0.5]");
  }
  if (settings.sequences < 1) throw std::domain_error("sequences must be >= 1");
  // Average gate infidelity r: depolarizing p = 2r, dephasing p = 3r/2.
  const Channel error = settings.model == GateErrorModel::depolarizing
                            ? Channel::depolarizing(2.0 * settings.gate_infidelity)
                            : Channel::dephasing(1.5 * settings.gate_infidelity);
  const Basis basis = plan.kind == ExperimentKind::rb_f_qubit ? f_qubit_basis() : s_qubit_basis();
  const CliffordGroup& group = clifford_group();
  const long per_sequence = (plan.shots + settings.sequences - 1) / settings.sequences;
  const std::uint64_t id = experiment_id(plan.kind);
  std::vector<CurveRecord> curve;
  for (std::size_t i = 0; i < plan.sweep.size(); ++i) {
    const int length = as_count(plan.sweep[i], "sequence length");
    long success = 0, trials = 0;
    for (int seq = 0; seq < settings.sequences; ++seq) {
      Rng rng = make_stream(plan.seed, {id, i, 0, static_cast<std::uint64_t>(seq)});
      std::uniform_int_distribution<std::size_t> pick(0, CliffordGroup::kSize - 1);
      DensityMatrix rho = DensityMatrix::from_level(basis, basis[0]);
      std::size_t net = 0;
      const auto apply = [&](std::size_t g) {
        const Eigen::Matrix2cd& u = group.matrix(g);
        rho.matrix() = u * rho.matrix() * u.adjoint();
        rho = apply_channel(rho, error);
        net = group.multiply(g, net);
      };
      for (int k = 0; k < length; ++k) apply(pick(rng));
      apply(group.inverse(net));
      const double survival = std::clamp(rho.matrix()(0, 0).real(), 0.0, 1.0);
      const double q = settings.readout_flip;
      std::binomial_distribution<long> dist(per_sequence, (1.0 - q) * survival + q * (1.0 - survival));
      success += dist(rng);
      trials += per_sequence;
    }
    curve.push_back(binomial_record(plan.sweep[i], success, trials));
  }
  return curve;
}

// ----------------------------------------------------------------- thermometry

std::vector<CurveRecord> run_thermometry(const ExperimentPlan& plan,
                                         const ThermometrySettings& settings,
                                         const ModeSet& modes) {
  plan.validate();
  const auto nbar = ThermalState::at_temperature(settings.temperature).occupations(modes);
  Rng rng = make_stream(plan.seed, {experiment_id(plan.kind), 0, 0, 0});
  return sample_carrier_trace(plan.sweep, settings.omega0, nbar, modes, plan.shots, rng);
}

}  // namespace dualion
