#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ghzw {

/// Conditional outcome table P(a|x) for N dichotomic parties.
///
/// Settings are enumerated in mixed radix with party 0 most significant.
/// Outcomes are N-bit strings, party 0 in the most significant bit, and bit
/// value 0 stands for the +1 outcome.
class Behavior {
 public:
  Behavior() = default;
  /// Validates normalization (1e-10) and positivity (-1e-12).
  Behavior(std::vector<int> inputs, std::vector<double> table);

  static Behavior uniform(std::vector<int> inputs);
  /// outputs[party][setting] is +1 or -1.
  static Behavior deterministic(std::vector<int> inputs,
                                const std::vector<std::vector<int>>& outputs);

  int n_parties() const { return static_cast<int>(inputs_.size()); }
  const std::vector<int>& inputs() const { return inputs_; }
  std::size_t n_settings() const { return n_settings_; }
  std::size_t n_outcomes() const { return std::size_t{1} << inputs_.size(); }
  const std::vector<double>& table() const { return table_; }

  double prob(std::size_t setting, std::size_t outcome) const {
    return table_[setting * n_outcomes() + outcome];
  }
  std::size_t setting_index(std::span<const int> x) const;
  std::vector<int> setting_tuple(std::size_t setting) const;

  /// Distribution of the listed parties' outcomes (bits in listed order,
  /// first listed party most significant) when they use `settings` and every
  /// other party uses setting 0.
  std::vector<double> marginal(std::span<const int> parties,
                               std::span<const int> settings) const;

  bool is_nonsignalling(double tol = 1e-10) const;

 private:
  std::vector<int> inputs_;
  std::size_t n_settings_ = 0;
  std::vector<double> table_;
};

/// v * a + (1 - v) * b.
Behavior mixture(const Behavior& a, const Behavior& b, double v);

struct Factor {
  int party = 0;
  int setting = 0;
  bool flip = false;
};

struct Condition {
  int party = 0;
  int setting = 0;
  int outcome = 1;  // +1 or -1
};

/// coeff * <prod of factors>, optionally conditioned on one party's outcome.
struct CorrelatorTerm {
  std::vector<Factor> factors;
  std::optional<Condition> condition;
  double coeff = 1.0;
};

/// Expectation of the product of the term's factors (the coefficient is not
/// applied). Parties the term does not mention are read at setting 0.
double expectation(const Behavior& b, const CorrelatorTerm& term);

/// Throws unless the term's parties are distinct and exist in `inputs`.
void check_term(const CorrelatorTerm& term, const std::vector<int>& inputs);

}  // namespace ghzw
