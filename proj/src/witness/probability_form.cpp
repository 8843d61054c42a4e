#include <algorithm>
#include <cmath>
#include <map>

#include "ghzw/errors.hpp"
#include "ghzw/witness.hpp"

namespace ghzw {

namespace {

using BlockKey = std::pair<std::vector<int>, std::vector<int>>;  // parties, settings

std::vector<int> outcome_signs(std::size_t bits, std::size_t width) {
  std::vector<int> a(width);
  for (std::size_t i = 0; i < width; ++i) a[i] = ((bits >> (width - 1 - i)) & 1u) ? -1 : 1;
  return a;
}

}  // namespace

ProbabilityFormWitness to_probability_form(const Witness& w) {
  w.validate();
  std::map<BlockKey, std::vector<double>> blocks;
  double constant = 0;
  for (const CorrelatorTerm& t : w.terms) {
    if (t.condition) throw DomainError("conditional terms have no probability form");
    if (t.factors.empty()) {
      constant += t.coeff;
      continue;
    }
    std::vector<Factor> fs = t.factors;
    std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) { return a.party < b.party; });
    BlockKey key;
    for (const Factor& f : fs) {
      key.first.push_back(f.party);
      key.second.push_back(f.setting);
    }
    auto& c = blocks[key];
    const std::size_t width = fs.size();
    c.resize(std::size_t{1} << width, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      int sign = 1;
      for (std::size_t i = 0; i < width; ++i) {
        bool minus = (k >> (width - 1 - i)) & 1u;
        if (minus != fs[i].flip) sign = -sign;
      }
      c[k] += sign * t.coeff;
    }
  }

  ProbabilityFormWitness pf;
  pf.name = w.name;
  pf.inputs_per_party = w.inputs_per_party;
  double shift = -constant;
  for (auto& [key, c] : blocks) {
    const double lo = *std::min_element(c.begin(), c.end());
    if (lo < 0) {
      for (double& v : c) v -= lo;
      shift -= lo;
    }
  }
  const double raw_bound = w.bound + shift;
  const double scale = raw_bound > 0 ? 1.0 / raw_bound : 1.0;
  for (const auto& [key, c] : blocks) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0) continue;
      pf.events.push_back({key.first, key.second, outcome_signs(k, key.first.size()), scale * c[k]});
    }
  }
  pf.shift = shift;
  pf.scale = scale;
  pf.bound = scale * raw_bound;
  return pf;
}

double evaluate(const ProbabilityFormWitness& pf, const Behavior& b) {
  if (pf.inputs_per_party != b.inputs())
    throw SignatureMismatch("probability-form witness " + pf.name + " does not match the behavior");
  double sum = 0;
  for (const ProbabilityEvent& e : pf.events) {
    const std::vector<double> m = b.marginal(e.parties, e.settings);
    std::size_t k = 0;
    for (int a : e.outcomes) k = (k << 1) | (a < 0 ? 1u : 0u);
    sum += e.coeff * m[k];
  }
  return sum;
}

Witness to_correlator_form(const ProbabilityFormWitness& pf) {
  if (!(pf.scale > 0)) throw DomainError("probability-form scale must be positive");
  std::map<BlockKey, double> acc;
  for (const ProbabilityEvent& e : pf.events) {
    const std::size_t width = e.parties.size();
    if (e.settings.size() != width || e.outcomes.size() != width)
      throw DomainError("malformed probability event");
    const double base = e.coeff / pf.scale / std::ldexp(1.0, static_cast<int>(width));
    for (std::size_t u = 0; u < (std::size_t{1} << width); ++u) {
      BlockKey key;
      double c = base;
      for (std::size_t i = 0; i < width; ++i) {
        if (!((u >> (width - 1 - i)) & 1u)) continue;
        key.first.push_back(e.parties[i]);
        key.second.push_back(e.settings[i]);
        c *= e.outcomes[i];
      }
      acc[key] += c;
    }
  }
  acc[BlockKey{}] -= pf.shift;

  Witness w;
  w.name = pf.name;
  w.inputs_per_party = pf.inputs_per_party;
  w.bound = pf.bound / pf.scale - pf.shift;
  for (const auto& [key, c] : acc) {
    if (c == 0) continue;
    CorrelatorTerm t;
    for (std::size_t i = 0; i < key.first.size(); ++i) t.factors.push_back({key.first[i], key.second[i], false});
    t.coeff = c;
    w.terms.push_back(std::move(t));
  }
  w.validate();
  return w;
}

}  // namespace ghzw
