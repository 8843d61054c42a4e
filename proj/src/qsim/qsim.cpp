#include "ghzw/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "ghzw/errors.hpp"

namespace ghzw {

namespace {
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}

Eigen::Matrix2cd DichotomicObservable::matrix() const {
  Eigen::Matrix2cd m;
  const double c = std::cos(theta), s = std::sin(theta);
  m << c, s, s, -c;
  return flip ? Eigen::Matrix2cd(-m) : m;
}

Eigen::Matrix2cd DichotomicObservable::eigenbasis() const {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2cd u;
  u << c, s, -s, c;
  if (flip) u.row(0).swap(u.row(1));
  return u;
}

PureState ghz_state(int n, Phase phase) {
  if (n < 2) throw InvalidArity("GHZ state needs at least 2 qubits, got " + std::to_string(n));
  if (n > 12) throw InvalidArity("GHZ state limited to 12 qubits");
  const Eigen::Index d = Eigen::Index{1} << n;
  PureState psi{n, Eigen::VectorXcd::Zero(d)};
  psi.amplitudes(0) = kInvSqrt2;
  psi.amplitudes(d - 1) = phase == Phase::Plus ? kInvSqrt2 : -kInvSqrt2;
  return psi;
}

MixedState to_mixed(const PureState& psi) {
  return {psi.n_qubits, psi.amplitudes * psi.amplitudes.adjoint()};
}

MixedState white_noise(int n) {
  if (n < 1 || n > 12) throw InvalidArity("white noise needs 1..12 qubits");
  const Eigen::Index d = Eigen::Index{1} << n;
  return {n, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d)};
}

MixedState noisy_ghz(int n, double p, double k) {
  if (!(p >= 0 && p <= 1)) throw DomainError("p must lie in [0,1]");
  if (!(k >= 0 && k <= 1)) throw DomainError("k must lie in [0,1]");
  MixedState rho = white_noise(n);
  rho.density *= (1 - p) * (1 - k);
  rho.density += p * to_mixed(ghz_state(n, Phase::Plus)).density;
  rho.density += k * (1 - p) * to_mixed(ghz_state(n, Phase::Minus)).density;
  return rho;
}

double fidelity_to_ghz(const MixedState& rho) {
  const PureState g = ghz_state(rho.n_qubits);
  if (rho.density.rows() != g.amplitudes.size() || rho.density.cols() != g.amplitudes.size())
    throw InvalidArity("density matrix shape does not match its qubit count");
  return (g.amplitudes.adjoint() * rho.density * g.amplitudes)(0).real();
}

void validate_state(const MixedState& rho) {
  const Eigen::Index d = Eigen::Index{1} << rho.n_qubits;
  if (rho.density.rows() != d || rho.density.cols() != d)
    throw InvalidArity("density matrix shape does not match its qubit count");
  if ((rho.density - rho.density.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.density.trace().real() - 1.0) > 1e-12 || std::abs(rho.density.trace().imag()) > 1e-12)
    throw DomainError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.density, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix is not positive");
}

std::vector<int> strategy_inputs(const MeasurementStrategy& s) {
  std::vector<int> inputs;
  for (const auto& party : s) {
    if (party.empty()) throw InvalidArity("every party needs at least one setting");
    inputs.push_back(static_cast<int>(party.size()));
  }
  return inputs;
}

namespace {

// rho <- G_q rho G_q^dagger for a single-qubit G acting on qubit q.
void conjugate_qubit(Eigen::MatrixXcd& rho, int n, int q, const Eigen::Matrix2cd& g) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - q);
  for (Eigen::Index i0 = 0; i0 < d; ++i0) {
    if (i0 & bit) continue;
    const Eigen::Index i1 = i0 | bit;
    Eigen::RowVectorXcd r0 = rho.row(i0), r1 = rho.row(i1);
    rho.row(i0) = g(0, 0) * r0 + g(0, 1) * r1;
    rho.row(i1) = g(1, 0) * r0 + g(1, 1) * r1;
  }
  const Eigen::Matrix2cd gc = g.conjugate();
  for (Eigen::Index j0 = 0; j0 < d; ++j0) {
    if (j0 & bit) continue;
    const Eigen::Index j1 = j0 | bit;
    Eigen::VectorXcd c0 = rho.col(j0), c1 = rho.col(j1);
    rho.col(j0) = c0 * gc(0, 0) + c1 * gc(0, 1);
    rho.col(j1) = c0 * gc(1, 0) + c1 * gc(1, 1);
  }
}

void fill(const Eigen::MatrixXcd& rho, int q, std::size_t setting_prefix,
          const MeasurementStrategy& s, std::vector<double>& table) {
  const int n = static_cast<int>(s.size());
  if (q == n) {
    const std::size_t no = std::size_t{1} << n;
    for (std::size_t o = 0; o < no; ++o)
      table[setting_prefix * no + o] = std::max(0.0, rho(o, o).real());
    return;
  }
  for (std::size_t x = 0; x < s[q].size(); ++x) {
    Eigen::MatrixXcd next = rho;
    conjugate_qubit(next, n, q, s[q][x].eigenbasis());
    fill(next, q + 1, setting_prefix * s[q].size() + x, s, table);
  }
}

}  // namespace

Behavior behavior_from_state(const MixedState& rho, const MeasurementStrategy& s) {
  std::vector<int> inputs = strategy_inputs(s);
  if (static_cast<int>(inputs.size()) != rho.n_qubits)
    throw InvalidArity("strategy has " + std::to_string(inputs.size()) + " parties but state has " +
                       std::to_string(rho.n_qubits) + " qubits");
  std::size_t ns = 1;
  for (int m : inputs) ns *= m;
  std::vector<double> table(ns << rho.n_qubits, 0.0);
  fill(rho.density, 0, 0, s, table);
  // Clipping tiny negative round-off can leave rows off by ~1e-16.
  const std::size_t no = std::size_t{1} << rho.n_qubits;
  for (std::size_t x = 0; x < ns; ++x) {
    double sum = 0;
    for (std::size_t o = 0; o < no; ++o) sum += table[x * no + o];
    for (std::size_t o = 0; o < no; ++o) table[x * no + o] /= sum;
  }
  return Behavior(std::move(inputs), std::move(table));
}

Behavior behavior_from_state(const PureState& psi, const MeasurementStrategy& s) {
  return behavior_from_state(to_mixed(psi), s);
}

}  // namespace ghzw
