#include "dualion/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace dualion {

using cd = std::complex<double>;

DensityMatrix::DensityMatrix(Basis basis, Eigen::MatrixXcd data)
    : basis_(std::move(basis)), data_(std::move(data)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (n == 0 || data_.rows() != n || data_.cols() != n) {
    throw std::invalid_argument("density matrix shape does not match its basis");
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    for (std::size_t j = i + 1; j < basis_.size(); ++j) {
      if (basis_[i] == basis_[j]) {
        throw std::invalid_argument("duplicate level in basis: " + to_string(basis_[i]));
      }
    }
  }
}

DensityMatrix DensityMatrix::pure(Basis basis, const Eigen::VectorXcd& amplitudes) {
  if (amplitudes.size() != static_cast<Eigen::Index>(basis.size())) {
    throw std::invalid_argument("amplitude vector does not match basis");
  }
  if (std::abs(amplitudes.squaredNorm() - 1.0) > tolerance::kNormalization) {
    throw std::domain_error("pure state is not normalized");
  }
  return DensityMatrix(std::move(basis), amplitudes * amplitudes.adjoint());
}

DensityMatrix DensityMatrix::from_level(Basis basis, const LevelId& level) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  DensityMatrix out(std::move(basis), std::move(rho));
  const auto k = static_cast<Eigen::Index>(out.require_index(level));
  out.data_(k, k) = 1.0;
  return out;
}

std::optional<std::size_t> DensityMatrix::index_of(const LevelId& level) const {
  const auto it = std::find(basis_.begin(), basis_.end(), level);
  if (it == basis_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - basis_.begin());
}

std::size_t DensityMatrix::require_index(const LevelId& level) const {
  if (auto idx = index_of(level)) return *idx;
  throw std::domain_error("level " + to_string(level) + " is not in the state's basis");
}

double DensityMatrix::population(const LevelId& level) const {
  const auto k = static_cast<Eigen::Index>(require_index(level));
  return data_(k, k).real();
}

StateDiagnostics DensityMatrix::diagnostics() const {
  StateDiagnostics d;
  d.hermiticity_error = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(data_.trace() - cd(1.0, 0.0));
  const Eigen::MatrixXcd herm = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

Basis s_qubit_basis() { return {levels::kS0, levels::kS1}; }
Basis f_qubit_basis() { return {levels::kF0, levels::kF1}; }

Basis conversion_basis() {
  using namespace levels;
  return {kS0, kS1, kD2, kD3, kF0, kF1};
}

PulseSpec PulseSpec::single(const Transition& path, double rabi, double detuning, double phase,
                            double duration) {
  PulseSpec p;
  p.tones = {Tone{path, 0.0, 0.0}};
  p.rabi = rabi;
  p.detuning = detuning;
  p.phase = phase;
  p.duration = duration;
  return p;
}

void PulseSpec::validate() const {
  if (tones.empty()) throw std::invalid_argument("pulse has no tones");
  if (!(duration >= 0.0)) throw std::invalid_argument("pulse duration must be >= 0");
  if (!(rabi >= 0.0)) throw std::invalid_argument("pulse Rabi frequency must be >= 0");
}

PulseSpec dual_tone_411(double pi_time) {
  using namespace levels;
  PulseSpec p;
  p.tones = {Tone{{kS0, kD2}}, Tone{{kS1, kD3}}};
  p.rabi = constants::kPi / pi_time;
  p.duration = pi_time;
  return p;
}

PulseSpec dual_tone_3432(double pi_time) {
  using namespace levels;
  PulseSpec p;
  p.tones = {Tone{{kD2, kF0}}, Tone{{kD3, kF1}}};
  p.rabi = constants::kPi / pi_time;
  p.duration = pi_time;
  return p;
}

Eigen::Matrix2cd rabi_propagator(double rabi, double detuning, double phase, double duration) {
  // Basis order (lower, upper); sz = |u><u| - |l><l|.
  const double generalized = std::hypot(rabi, detuning);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (generalized == 0.0 || duration == 0.0) return u;
  const double half_angle = 0.5 * generalized * duration;
  const double c = std::cos(half_angle);
  const double s = std::sin(half_angle);
  const double nz = detuning / generalized;
  const double nt = rabi / generalized;
  const cd i(0.0, 1.0);
  // n.sigma = [[-nz, nt e^{i phase}], [nt e^{-i phase}, nz]]
  u(0, 0) = cd(c, 0.0) + i * s * nz;
  u(1, 1) = cd(c, 0.0) - i * s * nz;
  u(0, 1) = -i * s * nt * std::exp(i * phase);
  u(1, 0) = -i * s * nt * std::exp(-i * phase);
  return u;
}

namespace {

// rho -> U rho U^dagger where U acts on levels (a, b) only.
void rotate_pair(Eigen::MatrixXcd& rho, Eigen::Index a, Eigen::Index b, const Eigen::Matrix2cd& u) {
  const Eigen::Index n = rho.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd ra = rho(a, k);
    const cd rb = rho(b, k);
    rho(a, k) = u(0, 0) * ra + u(0, 1) * rb;
    rho(b, k) = u(1, 0) * ra + u(1, 1) * rb;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd ca = rho(k, a);
    const cd cb = rho(k, b);
    rho(k, a) = ca * std::conj(u(0, 0)) + cb * std::conj(u(0, 1));
    rho(k, b) = ca * std::conj(u(1, 0)) + cb * std::conj(u(1, 1));
  }
}

}  // namespace

DensityMatrix apply_rabi(const DensityMatrix& state, const PulseSpec& pulse) {
  pulse.validate();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  pairs.reserve(pulse.tones.size());
  std::vector<bool> used(state.dim(), false);
  for (const auto& tone : pulse.tones) {
    const auto a = state.require_index(tone.path.first);
    const auto b = state.require_index(tone.path.second);
    if (a == b || used[a] || used[b]) {
      throw std::invalid_argument("pulse tones must address disjoint level pairs");
    }
    used[a] = used[b] = true;
    pairs.emplace_back(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  DensityMatrix out = state;
  for (std::size_t t = 0; t < pulse.tones.size(); ++t) {
    const auto& tone = pulse.tones[t];
    const Eigen::Matrix2cd u =
        rabi_propagator(pulse.rabi, pulse.detuning + tone.detuning_offset,
                        pulse.phase + tone.phase, pulse.duration);
    rotate_pair(out.matrix(), pairs[t].first, pairs[t].second, u);
  }
  return out;
}

PulseSpec perturbed(const PulseSpec& pulse, const PulsePerturbation& noise) {
  PulseSpec p = pulse;
  p.rabi *= noise.amplitude_factor;
  p.detuning += noise.detuning_offset;
  p.phase += noise.phase_offset;
  return p;
}

namespace {

constexpr double kAreaFlagTolerance = 1e-9;

bool off_pi(const PulseSpec& p) {
  return std::abs(p.area() - constants::kPi) > kAreaFlagTolerance * constants::kPi;
}

void require_support(const DensityMatrix& state, const LevelId& a, const LevelId& b,
                     double tolerance, const char* what) {
  const double inside = state.population(a) + state.population(b);
  if (state.trace() - inside > tolerance) {
    throw std::domain_error(std::string("input state is not supported on the ") + what +
                            " subspace");
  }
}

ConversionResult convert_pair(const DensityMatrix& state, const PulseSpec& first,
                              const PulseSpec& second, const PulsePerturbation& noise_first,
                              const PulsePerturbation& noise_second) {
  const PulseSpec p1 = perturbed(first, noise_first);
  const PulseSpec p2 = perturbed(second, noise_second);
  DensityMatrix out = apply_rabi(apply_rabi(state, p1), p2);
  return ConversionResult{std::move(out), off_pi(p1) || off_pi(p2)};
}

}  // namespace

ConversionResult convert_s_to_f(const DensityMatrix& state, const PulseSpec& pulse411,
                                const PulseSpec& pulse3432, const PulsePerturbation& noise411,
                                const PulsePerturbation& noise3432, double support_tolerance) {
  require_support(state, levels::kS0, levels::kS1, support_tolerance, "S-qubit");
  return convert_pair(state, pulse411, pulse3432, noise411, noise3432);
}

ConversionResult convert_f_to_s(const DensityMatrix& state, const PulseSpec& pulse3432,
                                const PulseSpec& pulse411, const PulsePerturbation& noise3432,
                                const PulsePerturbation& noise411, double support_tolerance) {
  require_support(state, levels::kF0, levels::kF1, support_tolerance, "F-qubit");
  return convert_pair(state, pulse3432, pulse411, noise3432, noise411);
}

Channel::Channel(Kind kind, double strength, std::vector<Eigen::MatrixXcd> kraus)
    : kind_(kind), strength_(strength), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::domain_error("channel needs at least one Kraus operator");
  const auto n = kraus_.front().rows();
  for (const auto& k : kraus_) {
    if (k.rows() != n || k.cols() != n) {
      throw std::domain_error("Kraus operators must be square and share a dimension");
    }
  }
  if (completeness_error() > tolerance::kKrausCompleteness) {
    throw std::domain_error("Kraus set is not complete (sum K^dagger K != I)");
  }
}

namespace {

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("channel probability outside [0, 1]");
}

}  // namespace

Channel Channel::dephasing(double p, std::size_t dim, std::size_t flipped) {
  require_probability(p);
  if (flipped >= dim) throw std::invalid_argument("dephasing level out of range");
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(n, n);
  z(static_cast<Eigen::Index>(flipped), static_cast<Eigen::Index>(flipped)) = -1.0;
  return Channel(Kind::dephasing, p,
                 {std::sqrt(1.0 - p) * Eigen::MatrixXcd::Identity(n, n), std::sqrt(p) * z});
}

Channel Channel::depolarizing(double p) {
  require_probability(p);
  Eigen::MatrixXcd x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cd(0, -1), cd(0, 1), 0;
  z << 1, 0, 0, -1;
  const double w = std::sqrt(p / 4.0);
  return Channel(Kind::depolarizing, p,
                 {std::sqrt(1.0 - 0.75 * p) * Eigen::MatrixXcd::Identity(2, 2), w * x, w * y,
                  w * z});
}

Channel Channel::population_transfer(std::size_t from, std::size_t to, double p, std::size_t dim) {
  require_probability(p);
  if (from >= dim || to >= dim || from == to) {
    throw std::invalid_argument("population transfer levels out of range");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  const auto f = static_cast<Eigen::Index>(from);
  Eigen::MatrixXcd k0 = Eigen::MatrixXcd::Identity(n, n);
  k0(f, f) = std::sqrt(1.0 - p);
  Eigen::MatrixXcd k1 = Eigen::MatrixXcd::Zero(n, n);
  k1(static_cast<Eigen::Index>(to), f) = std::sqrt(p);
  return Channel(Kind::population_transfer, p, {k0, k1});
}

Channel Channel::custom(std::vector<Eigen::MatrixXcd> kraus) {
  return Channel(Kind::custom, 0.0, std::move(kraus));
}

Channel Channel::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Channel(Kind::custom, 0.0, {Eigen::MatrixXcd::Identity(n, n)});
}

double Channel::completeness_error() const {
  const auto n = kraus_.front().rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return (sum - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

DensityMatrix apply_channel(const DensityMatrix& state, const Channel& channel) {
  if (channel.dim() != state.dim()) {
    throw std::domain_error("channel dimension does not match the state");
  }
  const auto n = static_cast<Eigen::Index>(state.dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& k : channel.kraus()) out += k * state.matrix() * k.adjoint();
  return DensityMatrix(state.basis(), std::move(out));
}

double fidelity(const DensityMatrix& state, const Eigen::VectorXcd& target) {
  if (target.size() != static_cast<Eigen::Index>(state.dim())) {
    throw std::domain_error("target dimension does not match the state");
  }
  if (std::abs(target.squaredNorm() - 1.0) > tolerance::kNormalization) {
    throw std::domain_error("target state is not normalized");
  }
  const cd value = target.dot(state.matrix() * target);  // conj(target) . rho target
  return std::clamp(value.real(), 0.0, 1.0);
}

DensityMatrix restrict_to(const DensityMatrix& state, const Basis& keep, double* kept_population) {
  std::vector<Eigen::Index> idx;
  idx.reserve(keep.size());
  for (const auto& level : keep) idx.push_back(static_cast<Eigen::Index>(state.require_index(level)));
  const auto n = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXcd block(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) block(r, c) = state.matrix()(idx[r], idx[c]);
  }
  const double pop = block.trace().real();
  if (kept_population) *kept_population = pop;
  if (!(pop > 0.0)) throw std::domain_error("no population left on the kept levels");
  return DensityMatrix(keep, block / pop);
}

DensityMatrix embed(const DensityMatrix& state, const Basis& target_basis) {
  const auto n = static_cast<Eigen::Index>(target_basis.size());
  DensityMatrix out(target_basis, Eigen::MatrixXcd::Zero(n, n));
  std::vector<Eigen::Index> idx;
  for (const auto& level : state.basis()) {
    idx.push_back(static_cast<Eigen::Index>(out.require_index(level)));
  }
  const auto m = static_cast<Eigen::Index>(state.dim());
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) out.matrix()(idx[r], idx[c]) = state.matrix()(r, c);
  }
  return out;
}

}  // namespace dualion
