#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ghzw/behavior.hpp"

namespace ghzw {

struct PureState {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;  // basis index: qubit 0 is the most significant bit
};

struct MixedState {
  int n_qubits = 0;
  Eigen::MatrixXcd density;
};

enum class Phase { Plus, Minus };

/// cos(theta) Z + sin(theta) X; `flip` swaps which eigenvector reads as +1.
struct DichotomicObservable {
  double theta = 0.0;
  bool flip = false;

  Eigen::Matrix2cd matrix() const;
  /// Rows are <e_+| and <e_-|.
  Eigen::Matrix2cd eigenbasis() const;
};

/// settings[party][input]
using MeasurementStrategy = std::vector<std::vector<DichotomicObservable>>;

PureState ghz_state(int n, Phase phase = Phase::Plus);
MixedState to_mixed(const PureState& psi);
MixedState white_noise(int n);
/// p |GHZ><GHZ| + k(1-p) |GHZ-><GHZ-| + (1-p)(1-k) I / 2^n
MixedState noisy_ghz(int n, double p, double k);

double fidelity_to_ghz(const MixedState& rho);
/// Checks hermiticity, unit trace and positivity with the library tolerances.
void validate_state(const MixedState& rho);

std::vector<int> strategy_inputs(const MeasurementStrategy& s);
Behavior behavior_from_state(const MixedState& rho, const MeasurementStrategy& s);
Behavior behavior_from_state(const PureState& psi, const MeasurementStrategy& s);

}  // namespace ghzw
