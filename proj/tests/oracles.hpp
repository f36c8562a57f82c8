#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "dualion/motion.hpp"

// Reference implementations written independently of the library code.
namespace oracle {

constexpr double kHbar = 1.054571817e-34;
constexpr double kKb = 1.380649e-23;
constexpr double kPi = 3.14159265358979323846;

// Bose-Einstein occupation evaluated with 50 decimal digits.
inline double mean_occupation(double omega, double temperature) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const Big x = Big(kHbar) * Big(omega) / (Big(kKb) * Big(temperature));
  const Big n = 1 / (boost::multiprecision::exp(x) - 1);
  return n.convert_to<double>();
}

// Thermal phonon distribution of one mode, truncated where the cumulative
// probability first reaches 1 - tail.
inline std::vector<double> thermal_distribution(double nbar, double tail = 1e-9) {
  std::vector<double> p;
  double cumulative = 0.0;
  double term = 1.0 / (nbar + 1.0);
  const double ratio = nbar / (nbar + 1.0);
  while (cumulative < 1.0 - tail) {
    p.push_back(term);
    cumulative += term;
    term *= ratio;
    if (term == 0.0) break;
  }
  return p;
}

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Brute-force thermal average of (1 + cos(Omega_n t)) / 2 over Fock
// configurations with the first-order Rabi frequency. All modes must share
// one Lamb-Dicke factor so the frequency depends only on the total phonon
// number, whose distribution is the convolution of the per-mode laws.
class FockSumSignal {
 public:
  FockSumSignal(const std::vector<double>& nbar, double eta, double omega0, double tail = 1e-9)
      : eta2_(eta * eta), omega0_(omega0), modes_(nbar.size()) {
    total_ = {1.0};
    for (double n : nbar) total_ = convolve(total_, thermal_distribution(n, tail));
  }

  double mass() const {
    double s = 0.0;
    for (double p : total_) s += p;
    return s;
  }

  double operator()(double t) const {
    double s = 0.0;
    for (std::size_t n = 0; n < total_.size(); ++n) {
      const double rabi =
          omega0_ * (1.0 - (static_cast<double>(n) + 0.5 * static_cast<double>(modes_)) * eta2_);
      s += total_[n] * 0.5 * (1.0 + std::cos(rabi * t));
    }
    return s;
  }

 private:
  double eta2_;
  double omega0_;
  std::size_t modes_;
  std::vector<double> total_;
};

// Poisson lower tail P(X < k) for mean mu by direct summation.
inline double poisson_below(double mu, int k) {
  double term = std::exp(-mu);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    s += term;
    term *= mu / (i + 1);
  }
  return s;
}

// Fidelity <psi| sum K rho K^dagger |psi> averaged over the six MUB states.
inline double mub_average(const std::vector<Eigen::Matrix2cd>& kraus) {
  const std::complex<double> i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Eigen::Vector2cd> states(6);
  states[0] << 1.0, 0.0;
  states[1] << 0.0, 1.0;
  states[2] << r, r;
  states[3] << r, -r;
  states[4] << r, i * r;
  states[5] << r, -i * r;
  double s = 0.0;
  for (const auto& psi : states) {
    const Eigen::Matrix2cd rho = psi * psi.adjoint();
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    s += (psi.adjoint() * out * psi)(0, 0).real();
  }
  return s / 6.0;
}

// Bloch-sphere (Haar) average fidelity of a qubit channel from its Kraus
// operators: (2 + sum |tr K|^2) / 6.
inline double haar_average(const std::vector<Eigen::Matrix2cd>& kraus) {
  double s = 0.0;
  for (const auto& k : kraus) s += std::norm(k.trace());
  return (2.0 + s) / 6.0;
}

}  // namespace oracle
