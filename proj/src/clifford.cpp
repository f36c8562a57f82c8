#include "dualion/clifford.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <stdexcept>

namespace dualion {

using cd = std::complex<double>;

bool equal_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, double tol) {
  // |tr(a^dagger b)| = 2 exactly when b = e^{i phi} a for unitaries.
  return std::abs(std::abs((a.adjoint() * b).trace()) - 2.0) < tol;
}

CliffordGroup::CliffordGroup() {
  Eigen::Matrix2cd h, s;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  s << 1, 0, 0, cd(0, 1);
  const std::array<Eigen::Matrix2cd, 2> generators = {h, s};

  elements_.push_back(Eigen::Matrix2cd::Identity());
  std::deque<std::size_t> frontier = {0};
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    for (const auto& g : generators) {
      const Eigen::Matrix2cd next = g * elements_[i];
      if (find(next) == kSize) {
        elements_.push_back(next);
        frontier.push_back(elements_.size() - 1);
      }
    }
  }
  if (elements_.size() != kSize) throw std::logic_error("Clifford generation did not close");

  for (std::size_t a = 0; a < kSize; ++a) {
    for (std::size_t b = 0; b < kSize; ++b) {
      table_[a][b] = find(elements_[a] * elements_[b]);
      if (table_[a][b] == 0) inverse_[b] = a;
    }
  }
}

std::size_t CliffordGroup::find(const Eigen::Matrix2cd& u) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (equal_up_to_phase(elements_[i], u)) return i;
  }
  return kSize;
}

const CliffordGroup& clifford_group() {
  static const CliffordGroup group;
  return group;
}

}  // namespace dualion
