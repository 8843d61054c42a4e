#include "ghzw/behavior.hpp"

#include <cmath>
#include <string>

#include "ghzw/errors.hpp"

namespace ghzw {

namespace {

std::size_t count_settings(const std::vector<int>& inputs) {
  std::size_t n = 1;
  for (int m : inputs) {
    if (m < 1) throw InvalidArity("every party needs at least one setting");
    n *= static_cast<std::size_t>(m);
  }
  return n;
}

}  // namespace

Behavior::Behavior(std::vector<int> inputs, std::vector<double> table)
    : inputs_(std::move(inputs)), table_(std::move(table)) {
  if (inputs_.empty()) throw InvalidArity("behavior needs at least one party");
  if (inputs_.size() > 20) throw InvalidArity("too many parties");
  n_settings_ = count_settings(inputs_);
  const std::size_t no = n_outcomes();
  if (table_.size() != n_settings_ * no)
    throw InvalidArity("behavior table has " + std::to_string(table_.size()) +
                       " entries, expected " + std::to_string(n_settings_ * no));
  for (std::size_t s = 0; s < n_settings_; ++s) {
    double sum = 0;
    for (std::size_t o = 0; o < no; ++o) {
      double v = table_[s * no + o];
      if (!(v >= -1e-12))
        throw DomainError("negative probability at setting " + std::to_string(s));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw DomainError("setting " + std::to_string(s) + " sums to " + std::to_string(sum));
  }
}

Behavior Behavior::uniform(std::vector<int> inputs) {
  std::size_t ns = count_settings(inputs);
  std::size_t no = std::size_t{1} << inputs.size();
  return Behavior(std::move(inputs), std::vector<double>(ns * no, 1.0 / static_cast<double>(no)));
}

Behavior Behavior::deterministic(std::vector<int> inputs,
                                 const std::vector<std::vector<int>>& outputs) {
  const std::size_t n = inputs.size();
  if (outputs.size() != n) throw InvalidArity("one output list per party required");
  for (std::size_t p = 0; p < n; ++p)
    if (outputs[p].size() != static_cast<std::size_t>(inputs[p]))
      throw InvalidArity("output list length must equal the party's input count");
  std::size_t ns = count_settings(inputs);
  std::size_t no = std::size_t{1} << n;
  std::vector<double> table(ns * no, 0.0);
  std::vector<int> x(n, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    std::size_t rem = s;
    for (std::size_t p = n; p-- > 0;) {
      x[p] = static_cast<int>(rem % inputs[p]);
      rem /= inputs[p];
    }
    std::size_t o = 0;
    for (std::size_t p = 0; p < n; ++p) o = (o << 1) | (outputs[p][x[p]] < 0 ? 1u : 0u);
    table[s * no + o] = 1.0;
  }
  return Behavior(std::move(inputs), std::move(table));
}

std::size_t Behavior::setting_index(std::span<const int> x) const {
  if (x.size() != inputs_.size()) throw InvalidArity("setting tuple has wrong length");
  std::size_t s = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] < 0 || x[p] >= inputs_[p]) throw InvalidArity("setting out of range");
    s = s * inputs_[p] + x[p];
  }
  return s;
}

std::vector<int> Behavior::setting_tuple(std::size_t setting) const {
  std::vector<int> x(inputs_.size());
  for (std::size_t p = inputs_.size(); p-- > 0;) {
    x[p] = static_cast<int>(setting % inputs_[p]);
    setting /= inputs_[p];
  }
  return x;
}

std::vector<double> Behavior::marginal(std::span<const int> parties,
                                       std::span<const int> settings) const {
  if (parties.size() != settings.size()) throw InvalidArity("parties/settings length mismatch");
  const int n = n_parties();
  std::vector<int> x(n, 0);
  for (std::size_t i = 0; i < parties.size(); ++i) {
    if (parties[i] < 0 || parties[i] >= n) throw InvalidArity("party out of range");
    x[parties[i]] = settings[i];
  }
  const std::size_t s = setting_index(x);
  const std::size_t no = n_outcomes();
  std::vector<double> out(std::size_t{1} << parties.size(), 0.0);
  for (std::size_t o = 0; o < no; ++o) {
    std::size_t k = 0;
    for (int p : parties) k = (k << 1) | ((o >> (n - 1 - p)) & 1u);
    out[k] += table_[s * no + o];
  }
  return out;
}

bool Behavior::is_nonsignalling(double tol) const {
  const int n = n_parties();
  const std::size_t no = n_outcomes();
  for (int j = 0; j < n; ++j) {
    if (inputs_[j] < 2) continue;
    const std::size_t bit = std::size_t{1} << (n - 1 - j);
    for (std::size_t s = 0; s < n_settings_; ++s) {
      std::vector<int> x = setting_tuple(s);
      if (x[j] != 0) continue;
      for (int k = 1; k < inputs_[j]; ++k) {
        x[j] = k;
        const std::size_t s2 = setting_index(x);
        for (std::size_t o = 0; o < no; ++o) {
          if (o & bit) continue;
          double m0 = table_[s * no + o] + table_[s * no + (o | bit)];
          double m1 = table_[s2 * no + o] + table_[s2 * no + (o | bit)];
          if (std::abs(m0 - m1) > tol) return false;
        }
      }
    }
  }
  return true;
}

Behavior mixture(const Behavior& a, const Behavior& b, double v) {
  if (a.inputs() != b.inputs()) throw SignatureMismatch("mixture of behaviors with different inputs");
  std::vector<double> t(a.table().size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = v * a.table()[i] + (1 - v) * b.table()[i];
  return Behavior(a.inputs(), std::move(t));
}

void check_term(const CorrelatorTerm& term, const std::vector<int>& inputs) {
  const int n = static_cast<int>(inputs.size());
  std::vector<char> seen(n, 0);
  auto visit = [&](int party, int setting) {
    if (party < 0 || party >= n) throw SignatureMismatch("term references party " + std::to_string(party));
    if (setting < 0 || setting >= inputs[party])
      throw SignatureMismatch("term references setting " + std::to_string(setting) + " of party " +
                              std::to_string(party));
    if (seen[party]) throw SignatureMismatch("party " + std::to_string(party) + " appears twice in a term");
    seen[party] = 1;
  };
  for (const Factor& f : term.factors) visit(f.party, f.setting);
  if (term.condition) {
    visit(term.condition->party, term.condition->setting);
    if (term.condition->outcome != 1 && term.condition->outcome != -1)
      throw DomainError("condition outcome must be +1 or -1");
  }
}

double expectation(const Behavior& b, const CorrelatorTerm& term) {
  check_term(term, b.inputs());
  std::vector<int> parties, settings;
  for (const Factor& f : term.factors) {
    parties.push_back(f.party);
    settings.push_back(f.setting);
  }
  if (term.condition) {
    parties.push_back(term.condition->party);
    settings.push_back(term.condition->setting);
  }
  const std::vector<double> m = b.marginal(parties, settings);
  const std::size_t nf = term.factors.size();
  double num = 0, den = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (term.condition) {
      bool minus = k & 1u;
      if ((term.condition->outcome < 0) != minus) continue;
      den += m[k];
    }
    std::size_t bits = term.condition ? k >> 1 : k;
    int sign = 1;
    for (std::size_t i = 0; i < nf; ++i) {
      bool minus = (bits >> (nf - 1 - i)) & 1u;
      if (minus != term.factors[i].flip) sign = -sign;
    }
    num += sign * m[k];
  }
  if (!term.condition) return num;
  if (den <= 1e-15) throw DegenerateCondition("conditioning event has probability zero");
  return num / den;
}

}  // namespace ghzw
