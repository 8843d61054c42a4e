#pragma once

#include <string>
#include <vector>

#include "ghzw/behavior.hpp"
#include "ghzw/qsim.hpp"

namespace ghzw {

/// Linear functional sum_i coeff_i <term_i>, claimed to satisfy W <= bound.
struct Witness {
  std::string name;
  std::vector<int> inputs_per_party;
  std::vector<CorrelatorTerm> terms;
  double bound = 0.0;

  int n_parties() const { return static_cast<int>(inputs_per_party.size()); }
  /// Throws SignatureMismatch if any term does not fit the signature.
  void validate() const;
};

Witness build_w3();
Witness build_w4();
/// Division-free N-party functional: conditional CHSH between A and B on the
/// product of all Charlies at setting 1, plus twice the two-body chain.
Witness build_n_party(int n);

MeasurementStrategy w3_strategy();
MeasurementStrategy w4_strategy();
/// Bob's second setting is (Z - X)/sqrt2 by default; `main_text_b1` uses
/// (X - Z)/sqrt2 instead.
MeasurementStrategy n_party_strategy(int n, bool main_text_b1 = false);

double evaluate(const Witness& w, const Behavior& b);
/// coeff_i * <term_i>, in term order.
std::vector<double> evaluate_terms(const Witness& w, const Behavior& b);

/// Coefficient of every entry of the behavior table, so that
/// evaluate(w, b) == sum_k coeffs[k] * b.table()[k]. Conditional terms are
/// rejected.
std::vector<double> table_coefficients(const Witness& w);

/// v with v * w(target) + (1 - v) * w(noise) == bound, clamped to [0, 1].
double visibility_specific(const Witness& w, const Behavior& target, const Behavior& noise);
double visibility_specific(double target_value, double noise_value, double bound);

struct Threshold {
  double p = 0.0;
  double fidelity = 0.0;
};

/// Crossing point of the witness on noisy_ghz(n, p, k), which is affine in p.
Threshold threshold_mixed_noise(const Witness& w, const MeasurementStrategy& s, int n, double k);

/// One event P_S(a|x) of a marginal of the behavior.
struct ProbabilityEvent {
  std::vector<int> parties;   // ascending
  std::vector<int> settings;
  std::vector<int> outcomes;  // +1 / -1
  double coeff = 0.0;
};

/// sum_e coeff_e P(e) <= bound, all coefficients nonnegative.
///
/// Relates to the correlator witness it came from through
/// value = scale * (W(P) + shift).
struct ProbabilityFormWitness {
  std::string name;
  std::vector<int> inputs_per_party;
  std::vector<ProbabilityEvent> events;
  double bound = 0.0;
  double shift = 0.0;
  double scale = 1.0;

  int n_parties() const { return static_cast<int>(inputs_per_party.size()); }
};

ProbabilityFormWitness to_probability_form(const Witness& w);
Witness to_correlator_form(const ProbabilityFormWitness& pf);
double evaluate(const ProbabilityFormWitness& pf, const Behavior& b);

}  // namespace ghzw
