#include <algorithm>
#include <cmath>
#include <random>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"

namespace ghzw {

namespace {

bool bit_minus(int outcome, int party) { return (outcome >> (3 - party)) & 1; }

DataTerm data_term(std::string label, const char* row, std::vector<PartyFlip> parties, double coeff,
                   std::optional<Condition> cond = std::nullopt) {
  return DataTerm{std::move(label), parse_label(row), std::move(parties), cond, coeff};
}

}  // namespace

CorrelatorEstimate correlator_from_counts(const CountRecord& rec, const std::vector<PartyFlip>& parties,
                                          const std::optional<Condition>& condition) {
  for (const PartyFlip& p : parties)
    if (p.party < 0 || p.party > 3) throw DomainError("party index out of range");
  if (condition) {
    if (condition->party < 0 || condition->party > 3) throw DomainError("condition party out of range");
    if (condition->outcome != 1 && condition->outcome != -1) throw DomainError("condition outcome must be +1 or -1");
    for (const PartyFlip& p : parties)
      if (p.party == condition->party) throw DomainError("condition party is also a correlator party");
  }
  std::int64_t plus = 0, minus = 0;
  for (int o = 0; o < 16; ++o) {
    if (condition && bit_minus(o, condition->party) != (condition->outcome < 0)) continue;
    bool neg = false;
    for (const PartyFlip& p : parties) neg ^= bit_minus(o, p.party) ^ p.flip;
    (neg ? minus : plus) += rec.counts[o];
  }
  const std::int64_t total = plus + minus;
  if (total == 0) throw DegenerateCondition("row " + rec.label.str() + " has no counts in the conditioned slice");
  return {static_cast<double>(plus - minus) / static_cast<double>(total), total};
}

std::vector<DataTerm> w4_data_terms() {
  enum { A, B, C, D };
  return {
      data_term("A0B0", "ZD+XX", {{A}, {B}}, 1),
      data_term("A0B1", "ZD-XX", {{A}, {B, true}}, -1),
      data_term("A0D0", "ZZZZ", {{A}, {D}}, 2),
      data_term("C0D0", "ZZZZ", {{C}, {D}}, 2),
      data_term("A1B0C1D1", "XD+XX", {{A}, {B}, {C}, {D}}, 1),
      data_term("A1B1C1D1", "XD-XX", {{A}, {B, true}, {C}, {D}}, 1),
  };
}

std::vector<DataTerm> w3_data_terms() {
  enum { A, B, C, D };
  const Condition plus{D, 0, 1};
  return {
      data_term("A0B0", "ZD+XX", {{A}, {B}}, 1, plus),
      data_term("B0C0", "XD+ZX", {{B}, {C}}, 1, plus),
      data_term("A0B1", "ZD-XX", {{A}, {B, true}}, -1, plus),
      data_term("B1C0", "XD-ZX", {{B, true}, {C}}, -1, plus),
      data_term("A0C0", "ZZZX", {{A}, {C}}, 4, plus),
      data_term("A1B0C1", "XD+XX", {{A}, {B}, {C}}, 2, plus),
      data_term("A1B1C1", "XD-XX", {{A}, {B, true}, {C}}, 2, plus),
  };
}

std::vector<TermValue> evaluate_data_terms(const ExperimentDataset& ds, const std::vector<DataTerm>& terms) {
  std::vector<TermValue> out;
  for (const DataTerm& t : terms) out.push_back({t, correlator_from_counts(ds.find(t.row), t.parties, t.condition)});
  return out;
}

namespace {

double sum_terms(const ExperimentDataset& ds, const std::vector<DataTerm>& terms) {
  double s = 0;
  for (const TermValue& v : evaluate_data_terms(ds, terms)) s += v.term.coeff * v.estimate.value;
  return s;
}

}  // namespace

double eval_w4_from_data(const ExperimentDataset& ds) {
  static const std::vector<DataTerm> terms = w4_data_terms();
  return sum_terms(ds, terms);
}

double eval_w3_from_data(const ExperimentDataset& ds) {
  static const std::vector<DataTerm> terms = w3_data_terms();
  return sum_terms(ds, terms);
}

MonteCarloResult monte_carlo_sigma(const ExperimentDataset& ds, const DatasetEvaluator& eval, int n_resamples,
                                   std::uint64_t seed, int threads) {
  if (n_resamples < 1000) throw DomainError("Monte Carlo needs at least 1000 resamples");
  std::vector<double> values(n_resamples);
  parallel_for(n_resamples, threads > 0 ? threads : default_threads(), [&](int i) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(i)));
    ExperimentDataset r = ds;
    for (CountRecord& rec : r.records)
      for (std::int64_t& n : rec.counts)
        if (n > 0) n = std::poisson_distribution<std::int64_t>(static_cast<double>(n))(rng);
    values[i] = eval(r);
  });
  MonteCarloResult res;
  res.n_resamples = n_resamples;
  for (double v : values) res.mean += v;
  res.mean /= n_resamples;
  double ss = 0;
  for (double v : values) ss += (v - res.mean) * (v - res.mean);
  res.sigma = std::sqrt(ss / (n_resamples - 1));
  return res;
}

StabilizerReport stabilizer_fidelity(const ExperimentDataset& ds) {
  const CountRecord& xxxx = ds.find(parse_label("XXXX"));
  const CountRecord& zzzz = ds.find(parse_label("ZZZZ"));
  StabilizerReport r;
  r.s1 = correlator_from_counts(xxxx, {{0}, {1}, {2}, {3}}).value;
  for (int k = 1; k < 4; ++k) r.pair[k - 1] = correlator_from_counts(zzzz, {{k - 1}, {k}}).value;
  r.z_projector = static_cast<double>(zzzz.counts[0] + zzzz.counts[15]) / static_cast<double>(zzzz.total());
  r.witness = 3 - 2 * ((r.s1 + 1) / 2 + r.z_projector);
  r.fidelity_bound = (1 - r.witness) / 2;
  r.hom_visibility = r.s1;
  return r;
}

}  // namespace ghzw
