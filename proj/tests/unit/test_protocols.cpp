#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dualion/protocols.hpp"

namespace dualion {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModeSet paper_modes() { return two_ion_transverse_modes(3.15e6, 2.97e6, 0.12e6, 0.024); }

ExperimentPlan plan(ExperimentKind kind, std::vector<double> sweep, int shots, std::uint64_t seed = 5) {
  ExperimentPlan p;
  p.kind = kind;
  p.sweep = std::move(sweep);
  p.shots = shots;
  p.seed = seed;
  return p;
}

ConversionSettings ideal_conversion() {
  ConversionSettings s;
  s.noise.coherence_time_411 = kInf;
  s.noise.coherence_time_3432 = kInf;
  s.nbar = 0.0;
  s.target_round_trip_infidelity = 0.0;
  s.spam = 0.0;
  return s;
}

TEST(Mub, OverlapsAndCompleteness) {
  const auto s = mub_states();
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 6; ++i) {
    sum += s[i] * s[i].adjoint();
    for (int j = 0; j < 6; ++j) {
      const double o = std::norm(s[i].dot(s[j]));
      if (i == j) {
        EXPECT_NEAR(o, 1.0, 1e-15);
      } else if (i / 2 == j / 2) {
        EXPECT_NEAR(o, 0.0, 1e-15);
      } else {
        EXPECT_NEAR(o, 0.5, 1e-15);
      }
    }
  }
  EXPECT_LT((sum - 3.0 * Eigen::Matrix2cd::Identity()).norm(), 1e-14);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR((s[2] - Eigen::Vector2cd(r, r)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((s[4] - Eigen::Vector2cd(r, std::complex<double>(0, r))).norm(), 0.0, 1e-15);
}

TEST(Plan, Validation) {
  EXPECT_THROW(plan(ExperimentKind::rb_s_qubit, {}, 10).validate(), std::domain_error);
  EXPECT_THROW(plan(ExperimentKind::rb_s_qubit, {1, 1}, 10).validate(), std::domain_error);
  EXPECT_THROW(plan(ExperimentKind::rb_s_qubit, {1, 2}, 0).validate(), std::domain_error);
  EXPECT_NO_THROW(plan(ExperimentKind::rb_s_qubit, {1, 2}, 1).validate());
}

TEST(Plan, ExperimentNames) {
  for (auto kind : kAllExperiments) EXPECT_EQ(experiment_from_string(to_string(kind)), kind);
  EXPECT_THROW(experiment_from_string("nope"), std::invalid_argument);
}

TEST(BinomialRecord, SmoothedError) {
  const auto r = binomial_record(1.0, 0, 100);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_GT(r.std_error, 0.0);
  const auto h = binomial_record(1.0, 50, 100);
  EXPECT_NEAR(h.std_error, std::sqrt(0.5 * 0.5 / 100), 1e-12);
}

TEST(Conversion, IdealGivesUnitFidelity) {
  const auto run = run_conversion_cycle(plan(ExperimentKind::conversion_cycle, {0, 1, 5}, 60),
                                        ideal_conversion(), paper_modes());
  for (const auto& r : run.curve) {
    EXPECT_EQ(r.mean, 1.0);
    ASSERT_TRUE(r.per_mub.has_value());
    for (double v : *r.per_mub) EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(run.coherence_scale, 1.0);
}

TEST(Conversion, CalibrationHitsTarget) {
  const ConversionSettings s;
  const auto modes = paper_modes();
  const auto c = calibrated(s, modes);
  EXPECT_NEAR(expected_round_trip_infidelity(c, modes), 0.0065, 1e-9);
  EXPECT_NEAR(c.noise.coherence_time_3432 / c.noise.coherence_time_411,
              s.noise.coherence_time_3432 / s.noise.coherence_time_411, 1e-12);
}

TEST(Conversion, CurveFollowsExpectedDecay) {
  const ConversionSettings s;
  const auto modes = paper_modes();
  const auto run = run_conversion_cycle(plan(ExperimentKind::conversion_cycle, {0, 4, 8, 12}, 3000),
                                        s, modes);
  for (const auto& r : run.curve) {
    const double expected = (1 - s.spam) * std::pow(1 - run.expected_round_trip, r.sweep_value);
    EXPECT_NEAR(r.mean, expected, 4 * r.std_error + 0.002) << r.sweep_value;
  }
}

TEST(Raman, ZeroRatesFlatAtSpam) {
  CrosstalkSettings s;
  s.rates = CrosstalkRates{0.0, 0.0, 0.0, kInf};
  s.conversion = ideal_conversion();
  const auto run = run_raman_crosstalk(plan(ExperimentKind::raman_crosstalk, {0, 500, 1000}, 6000),
                                       s, paper_modes());
  const double p = 1 - s.spam_raman;
  const double sigma = std::sqrt(p * (1 - p) / 6000);
  for (const auto& r : run.curve) EXPECT_NEAR(r.mean, p, 4 * sigma);
  EXPECT_EQ(run.discard_fraction, 0.0);
}

TEST(Raman, StderrScalesWithShots) {
  CrosstalkSettings s;
  s.conversion = ideal_conversion();
  s.spam_raman = 0.1;
  const auto a = run_raman_crosstalk(plan(ExperimentKind::raman_crosstalk, {0, 10}, 1200), s, paper_modes());
  const auto b = run_raman_crosstalk(plan(ExperimentKind::raman_crosstalk, {0, 10}, 4800), s, paper_modes());
  EXPECT_NEAR(a.curve[0].std_error / b.curve[0].std_error, 2.0, 0.3);
}

TEST(Raman, SQubitInsetDecays) {
  CrosstalkSettings s;
  s.conversion = ideal_conversion();
  const auto run = run_raman_crosstalk(plan(ExperimentKind::raman_crosstalk, {0, 10}, 2000), s, paper_modes());
  ASSERT_EQ(run.s_trace.size(), 97u);
  EXPECT_NEAR(run.s_trace[0].mean, 0.0, 0.01);
  // After one pi/2 pulse the population is near one half; after a pi pulse near one.
  EXPECT_NEAR(run.s_trace[4].mean, 0.5, 0.05);
  EXPECT_GT(run.s_trace[8].mean, 0.85);
  EXPECT_NEAR(run.s_trace.back().mean, 0.5, 0.2);
}

TEST(PumpDetect, BaselineAtZeroCycles) {
  CrosstalkSettings s;
  s.conversion = ideal_conversion();
  for (bool pi : {false, true}) {
    const auto kind = pi ? ExperimentKind::pump_detect_crosstalk_1 : ExperimentKind::pump_detect_crosstalk_0;
    const auto run = run_pump_detect_crosstalk(plan(kind, {0, 50}, 6000), s, paper_modes(), pi);
    const double spam = pi ? s.spam_pump_1 : s.spam_pump_0;
    EXPECT_NEAR(run.curve[0].mean, 1 - spam, 4 * run.curve[0].std_error);
    // Inset: bright fraction near 1% without the pi pulse and near 98% with it.
    if (pi) {
      EXPECT_GT(run.s_trace[0].mean, 0.95);
    } else {
      EXPECT_LT(run.s_trace[0].mean, 0.03);
    }
  }
}

TEST(PrepareF, NoiselessKeepsEveryShot) {
  Rng rng(3);
  for (const auto& psi : mub_states()) {
    const auto r = prepare_f_qubit(psi, ideal_conversion(), paper_modes(), rng);
    EXPECT_TRUE(r.kept);
    EXPECT_NEAR(fidelity(r.state, psi), 1.0, 1e-12);
  }
}

TEST(Cooling, InitialTemperatureRecovered) {
  CoolingSettings cooling;
  CrosstalkSettings crosstalk;
  crosstalk.conversion = ideal_conversion();
  const auto run = run_cooling(plan(ExperimentKind::global_cooling, {0.0, 2e-3}, 10), cooling,
                               crosstalk, paper_modes(), false);
  ASSERT_TRUE(run.all_converged);
  EXPECT_NEAR(run.temperature[0].mean, run.true_temperature[0], 3 * run.temperature[0].std_error);
  EXPECT_TRUE(run.fidelity.empty());
}

TEST(Cooling, SympatheticAndGlobalShareSteadyState) {
  CoolingSettings cooling;
  CrosstalkSettings crosstalk;
  crosstalk.conversion = ideal_conversion();
  cooling.fidelity_sweep = {0.0, 0.05};
  const auto modes = paper_modes();
  const auto g = run_cooling(plan(ExperimentKind::global_cooling, {5e-3}, 600), cooling, crosstalk, modes, false);
  const auto s = run_cooling(plan(ExperimentKind::sympathetic_cooling, {5e-3}, 600), cooling, crosstalk, modes, true);
  EXPECT_NEAR(g.temperature[0].mean, s.temperature[0].mean,
              3 * std::hypot(g.temperature[0].std_error, s.temperature[0].std_error));
  EXPECT_NEAR(s.true_temperature[0], cooling.steady_state_temperature, 1e-6);
  ASSERT_EQ(s.fidelity.size(), 2u);
}

TEST(Rb, PerfectGatesSurvive) {
  RbSettings s;
  s.gate_infidelity = 0.0;
  s.readout_flip = 0.0;
  const auto curve = run_rb(plan(ExperimentKind::rb_s_qubit, {0, 100, 1000}, 200), s);
  for (const auto& r : curve) EXPECT_EQ(r.mean, 1.0);
}

TEST(Rb, DephasingAndDepolarizingBothDecay) {
  for (auto model : {GateErrorModel::depolarizing, GateErrorModel::dephasing}) {
    RbSettings s;
    s.gate_infidelity = 5e-3;
    s.model = model;
    s.readout_flip = 0.0;
    const auto curve = run_rb(plan(ExperimentKind::rb_f_qubit, {0, 100}, 4000), s);
    // m random Cliffords plus the recovery gate: 1/2 + 1/2 (1 - 2r)^(m+1) after twirling.
    // At m = 0 the recovery gate is the identity and dephasing leaves |0> untouched.
    const double m0 = model == GateErrorModel::dephasing ? 1.0 : 0.5 + 0.5 * (1 - 2 * 5e-3);
    EXPECT_NEAR(curve[0].mean, m0, 0.004);
    EXPECT_NEAR(curve[1].mean, 0.5 + 0.5 * std::pow(1 - 2 * 5e-3, 101), 0.05);
  }
}

TEST(Thermometry, TraceShape) {
  const auto curve = run_thermometry(plan(ExperimentKind::thermometry, {0.0, 1e-6, 2e-6}, 1000),
                                     ThermometrySettings{}, paper_modes());
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].mean, 1.0);
}

TEST(Determinism, IdenticalInputsGiveIdenticalCurves) {
  CrosstalkSettings s;
  const auto p = plan(ExperimentKind::pump_detect_crosstalk_0, {0, 20, 40}, 300, 99);
  const auto a = run_pump_detect_crosstalk(p, s, paper_modes(), false);
  const auto b = run_pump_detect_crosstalk(p, s, paper_modes(), false);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].mean, b.curve[i].mean);
    EXPECT_EQ(a.curve[i].std_error, b.curve[i].std_error);
    EXPECT_EQ(*a.curve[i].per_mub, *b.curve[i].per_mub);
  }
  for (std::size_t i = 0; i < a.s_trace.size(); ++i) EXPECT_EQ(a.s_trace[i].mean, b.s_trace[i].mean);
  auto other = p;
  other.seed = 100;
  const auto c = run_pump_detect_crosstalk(other, s, paper_modes(), false);
  bool differs = false;
  for (std::size_t i = 0; i < a.curve.size(); ++i) differs |= a.curve[i].mean != c.curve[i].mean;
  EXPECT_TRUE(differs);
}

TEST(Monotonicity, FidelityCurvesNonIncreasingInExpectation) {
  CrosstalkSettings s;
  s.conversion = ideal_conversion();
  s.rates.eps_0 = 2e-3;
  const auto run = run_pump_detect_crosstalk(
      plan(ExperimentKind::pump_detect_crosstalk_0, {0, 25, 50, 75, 100}, 3000), s, paper_modes(), false);
  for (std::size_t i = 1; i < run.curve.size(); ++i) {
    const double rise = run.curve[i].mean - run.curve[i - 1].mean;
    EXPECT_LT(rise, 4 * std::hypot(run.curve[i].std_error, run.curve[i - 1].std_error));
  }
}

}  // namespace
}  // namespace dualion
