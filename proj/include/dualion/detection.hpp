#pragma once

#include <vector>

#include "dualion/quantum.hpp"
#include "dualion/rng.hpp"

namespace dualion {

// Threshold photon-counting detection with one possible flip per window.
struct DetectionConfig {
  double bright_rate = 4.0e4;            // counts/s
  double dark_rate = 200.0;              // counts/s
  double duration = 250e-6;              // s
  int threshold = 2;                     // outcome bright when count >= threshold
  double leakage_bright_to_dark = 490.0; // 1/s
  double leakage_dark_to_bright = 44.0;  // 1/s

  void validate() const;
};

struct DetectionOutcome {
  bool bright = false;
  int count = 0;
};

DetectionOutcome detect_bright_dark(bool is_bright, const DetectionConfig& config, Rng& rng);

// Exact misidentification probability of detect_bright_dark (quadrature over
// the flip time).
double detection_error(bool is_bright, const DetectionConfig& config);
// 1 - (bright error + dark error) / 2.
double detection_fidelity(const DetectionConfig& config);

// Calibrated defaults.
DetectionConfig direct_s_detection();         // 98.3% direct 370 nm detection
DetectionConfig shelved_detection_short();    // 250 us window after shelving
DetectionConfig shelved_detection_extended(); // 2.5 ms window after shelving
inline constexpr double kDefaultPumpSuccess = 1.0 - 5.6e-4;
inline const std::vector<double> kDefaultTransferChain = {0.992, 0.787};

// F-qubit readout: |0'> is pumped back to S (bright) with probability
// pump_success, |1'> stays dark. Outcome bright reports |0'>.
DetectionOutcome shelve_detect_f(const DensityMatrix& state, double pump_success,
                                 const DetectionConfig& det, Rng& rng);

// S-qubit readout: |0> is shelved to F (dark) through a chain of transfer
// stages, each moving the remaining population with its own probability; the
// rest of S fluoresces. Outcome bright reports |1>.
DetectionOutcome shelve_detect_s(const DensityMatrix& state,
                                 const std::vector<double>& transfer_chain_success,
                                 const DetectionConfig& det, Rng& rng);

// Shelving fidelities in closed form.
double shelve_f_fidelity(double pump_success, const DetectionConfig& det);
double shelve_s_fidelity(const std::vector<double>& transfer_chain_success,
                         const DetectionConfig& det);

// Optical pumping on the S manifold: |1> population left is residual^cycles,
// the rest ends in |0>.
DensityMatrix optical_pump_to_0(const DensityMatrix& state, int cycles,
                                double residual_per_cycle);

}  // namespace dualion
