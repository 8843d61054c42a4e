#include "ghzw/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ghzw/errors.hpp"

namespace ghzw {

namespace {

CorrelatorTerm term(double coeff, std::initializer_list<Factor> factors) {
  return CorrelatorTerm{std::vector<Factor>(factors), std::nullopt, coeff};
}

constexpr double kPi = std::numbers::pi;

}  // namespace

void Witness::validate() const {
  for (const CorrelatorTerm& t : terms) check_term(t, inputs_per_party);
}

Witness build_w3() {
  enum { A, B, C };
  Witness w{"W3", {2, 2, 2}, {}, 8.0};
  w.terms = {
      term(1, {{A, 0}, {B, 0}}),       term(1, {{B, 0}, {C, 0}}),
      term(-1, {{A, 0}, {B, 1}}),      term(-1, {{B, 1}, {C, 0}}),
      term(4, {{A, 0}, {C, 0}}),       term(2, {{A, 1}, {B, 0}, {C, 1}}),
      term(2, {{A, 1}, {B, 1}, {C, 1}}),
  };
  return w;
}

Witness build_w4() {
  enum { A, B, C, D };
  Witness w{"W4", {2, 2, 2, 2}, {}, 6.0};
  w.terms = {
      term(1, {{A, 0}, {B, 0}}),
      term(-1, {{A, 0}, {B, 1}}),
      term(2, {{A, 0}, {D, 0}}),
      term(2, {{C, 0}, {D, 0}}),
      term(1, {{A, 1}, {B, 0}, {C, 1}, {D, 1}}),
      term(1, {{A, 1}, {B, 1}, {C, 1}, {D, 1}}),
  };
  return w;
}

Witness build_n_party(int n) {
  if (n < 3) throw InvalidArity("N-party witness needs n >= 3, got " + std::to_string(n));
  constexpr int A = 0, B = 1;
  Witness w{"NParty" + std::to_string(n), std::vector<int>(n, 2), {}, 2.0 * n};
  w.inputs_per_party[B] = 3;

  // Bell part: P(C=+1) I(+) + P(C=-1) I(-) with C the product of all
  // Charlies at setting 1, expanded into unconditional correlators.
  w.terms.push_back(term(1, {{A, 0}, {B, 0}}));
  w.terms.push_back(term(1, {{A, 0}, {B, 1}}));
  CorrelatorTerm t10{{{A, 1}, {B, 0}}, std::nullopt, 1.0};
  CorrelatorTerm t11{{{A, 1}, {B, 1}}, std::nullopt, -1.0};
  for (int c = 2; c < n; ++c) {
    t10.factors.push_back({c, 1});
    t11.factors.push_back({c, 1});
  }
  w.terms.push_back(t10);
  w.terms.push_back(t11);

  // Chain A0 - B2 - C[1]0 - ... - C[n-2]0, each link weighted 2.
  w.terms.push_back(term(2, {{A, 0}, {B, 2}}));
  w.terms.push_back(term(2, {{B, 2}, {2, 0}}));
  for (int c = 2; c + 1 < n; ++c) w.terms.push_back(term(2, {{c, 0}, {c + 1, 0}}));
  return w;
}

MeasurementStrategy w3_strategy() {
  const DichotomicObservable z{0.0}, x{kPi / 2};
  return {{z, x}, {{kPi / 4}, {3 * kPi / 4}}, {z, x}};
}

MeasurementStrategy w4_strategy() {
  const DichotomicObservable z{0.0}, x{kPi / 2};
  return {{z, x}, {{kPi / 4}, {3 * kPi / 4}}, {z, x}, {z, x}};
}

MeasurementStrategy n_party_strategy(int n, bool main_text_b1) {
  if (n < 3) throw InvalidArity("N-party strategy needs n >= 3");
  const DichotomicObservable z{0.0}, x{kPi / 2};
  MeasurementStrategy s(n, {z, x});
  // (Z - X)/sqrt2 is the flipped (X - Z)/sqrt2.
  s[1] = {{kPi / 4}, {3 * kPi / 4, !main_text_b1}, z};
  return s;
}

namespace {

void check_signature(const Witness& w, const Behavior& b) {
  if (w.inputs_per_party != b.inputs())
    throw SignatureMismatch("witness " + w.name + " does not match the behavior's input signature");
}

}  // namespace

std::vector<double> evaluate_terms(const Witness& w, const Behavior& b) {
  check_signature(w, b);
  std::vector<double> out;
  out.reserve(w.terms.size());
  for (const CorrelatorTerm& t : w.terms) out.push_back(t.coeff * expectation(b, t));
  return out;
}

double evaluate(const Witness& w, const Behavior& b) {
  double sum = 0;
  for (double v : evaluate_terms(w, b)) sum += v;
  return sum;
}

std::vector<double> table_coefficients(const Witness& w) {
  w.validate();
  const Behavior shape = Behavior::uniform(w.inputs_per_party);
  const int n = w.n_parties();
  const std::size_t no = shape.n_outcomes();
  std::vector<double> coeffs(shape.table().size(), 0.0);
  for (const CorrelatorTerm& t : w.terms) {
    if (t.condition) throw DomainError("conditional terms are not linear in the behavior");
    std::vector<int> x(n, 0);
    for (const Factor& f : t.factors) x[f.party] = f.setting;
    const std::size_t s = shape.setting_index(x);
    for (std::size_t o = 0; o < no; ++o) {
      int sign = 1;
      for (const Factor& f : t.factors) {
        bool minus = (o >> (n - 1 - f.party)) & 1u;
        if (minus != f.flip) sign = -sign;
      }
      coeffs[s * no + o] += sign * t.coeff;
    }
  }
  return coeffs;
}

double visibility_specific(double target_value, double noise_value, double bound) {
  if (target_value == noise_value) throw NoCrossing("witness takes the same value on target and noise");
  const double v = (bound - noise_value) / (target_value - noise_value);
  return std::clamp(v, 0.0, 1.0);
}

double visibility_specific(const Witness& w, const Behavior& target, const Behavior& noise) {
  return visibility_specific(evaluate(w, target), evaluate(w, noise), w.bound);
}

Threshold threshold_mixed_noise(const Witness& w, const MeasurementStrategy& s, int n, double k) {
  if (static_cast<int>(s.size()) != n)
    throw InvalidArity("strategy has " + std::to_string(s.size()) + " parties, expected " + std::to_string(n));
  const double v1 = evaluate(w, behavior_from_state(noisy_ghz(n, 1.0, k), s));
  const double v0 = evaluate(w, behavior_from_state(noisy_ghz(n, 0.0, k), s));
  if (!(v1 > w.bound)) throw NoCrossing("witness " + w.name + " is not violated at p = 1");
  const double p = v0 > w.bound ? 0.0 : (w.bound - v0) / (v1 - v0);
  return {p, p + (1 - p) * (1 - k) / std::ldexp(1.0, n)};
}

}  // namespace ghzw
