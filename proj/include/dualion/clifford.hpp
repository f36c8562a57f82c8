#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dualion {

// The 24-element single-qubit Clifford group modulo global phase, generated
// from H and S. Element 0 is the identity.
class CliffordGroup {
 public:
  static constexpr std::size_t kSize = 24;

  CliffordGroup();

  const Eigen::Matrix2cd& matrix(std::size_t i) const { return elements_.at(i); }
  // Index of matrix(a) * matrix(b) (apply b first, then a).
  std::size_t multiply(std::size_t a, std::size_t b) const { return table_.at(a).at(b); }
  std::size_t inverse(std::size_t i) const { return inverse_.at(i); }
  // Index of the element equal to `u` up to phase, or kSize when none is.
  std::size_t find(const Eigen::Matrix2cd& u) const;

 private:
  std::vector<Eigen::Matrix2cd> elements_;
  std::array<std::array<std::size_t, kSize>, kSize> table_{};
  std::array<std::size_t, kSize> inverse_{};
};

const CliffordGroup& clifford_group();

// Equal up to a global phase.
bool equal_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, double tol = 1e-10);

}  // namespace dualion
