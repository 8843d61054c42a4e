#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghzw/behavior.hpp"

namespace ghzw {

enum class Basis { Z, X, DPlus, DMinus };

/// "Z", "X", "D+", "D-"
std::string to_string(Basis b);
Basis parse_basis(std::string_view tag);
/// Angle of the basis in the Z-X plane (Z = 0).
double basis_angle(Basis b);

struct SettingLabel {
  std::array<Basis, 4> bases{};

  /// e.g. "ZD+XX"
  std::string str() const;
  bool operator==(const SettingLabel&) const = default;
};

SettingLabel parse_label(std::string_view compact);

/// Counts indexed by outcome bits, party A most significant, bit 0 = '+'.
/// Column order ++++, +++-, ..., ----.
struct CountRecord {
  SettingLabel label;
  std::array<std::int64_t, 16> counts{};
  double t_seconds = 0.0;

  std::int64_t total() const;
};

struct ExperimentDataset {
  std::vector<CountRecord> records;
  std::vector<std::string> provenance;  // '#' comment lines of the CSV

  /// Throws MissingRow naming the label.
  const CountRecord& find(const SettingLabel& label) const;
  const CountRecord* try_find(const SettingLabel& label) const;
  void validate() const;
};

ExperimentDataset parse_dataset_text(std::string_view text);
ExperimentDataset parse_dataset(const std::string& path);
std::string dataset_to_csv(const ExperimentDataset& ds);

struct PartyFlip {
  int party = 0;
  bool flip = false;
};

struct CorrelatorEstimate {
  double value = 0.0;
  std::int64_t effective_total = 0;
};

/// Frequency estimate of the product of the listed parties' outcomes over the
/// slice where `condition` holds; other parties are marginalized.
CorrelatorEstimate correlator_from_counts(const CountRecord& rec, const std::vector<PartyFlip>& parties,
                                          const std::optional<Condition>& condition = std::nullopt);

/// One witness term estimated from a dataset row.
struct DataTerm {
  std::string label;   // e.g. "A0B1"
  SettingLabel row;
  std::vector<PartyFlip> parties;
  std::optional<Condition> condition;
  double coeff = 1.0;
};

/// Term-to-row maps for the two witnesses. The W3 terms are conditioned on
/// Dave reading +1 in the X basis.
std::vector<DataTerm> w4_data_terms();
std::vector<DataTerm> w3_data_terms();

struct TermValue {
  DataTerm term;
  CorrelatorEstimate estimate;
};

std::vector<TermValue> evaluate_data_terms(const ExperimentDataset& ds, const std::vector<DataTerm>& terms);
double eval_w4_from_data(const ExperimentDataset& ds);
double eval_w3_from_data(const ExperimentDataset& ds);

using DatasetEvaluator = std::function<double(const ExperimentDataset&)>;

struct MonteCarloResult {
  double mean = 0.0;
  double sigma = 0.0;
  int n_resamples = 0;
};

/// Poisson resampling of every count (mean = observed count). Resample i uses
/// its own seed derived from (seed, i), so the result does not depend on the
/// thread count.
MonteCarloResult monte_carlo_sigma(const ExperimentDataset& ds, const DatasetEvaluator& eval, int n_resamples,
                                   std::uint64_t seed, int threads = 0);

struct StabilizerReport {
  double s1 = 0.0;                 // <XXXX>
  std::array<double, 3> pair{};    // <Z_{k-1} Z_k> from ZZZZ
  double z_projector = 0.0;        // P(ZZZZ outcomes all equal)
  double witness = 0.0;
  double fidelity_bound = 0.0;
  double hom_visibility = 0.0;
};

/// Two-setting GHZ4 witness W = 3 - 2[(S1 + 1)/2 + prod_k (S_k + 1)/2]; the
/// product of commuting projectors is estimated directly as the probability
/// that all Z outcomes agree.
StabilizerReport stabilizer_fidelity(const ExperimentDataset& ds);

/// Setting labels of the bundled count table, in file order.
std::vector<SettingLabel> table1_labels();

/// Multinomial sample of `shots` events per row; `row_behavior(label)` returns
/// the 16 outcome probabilities of that row.
ExperimentDataset synthetic_dataset(const std::function<std::array<double, 16>(const SettingLabel&)>& row_behavior,
                                    int shots, std::uint64_t seed,
                                    const std::vector<SettingLabel>& rows = table1_labels());

/// Outcome distribution of GHZ4 (or a noisy GHZ4) measured in the given bases.
std::array<double, 16> ghz4_row_distribution(const SettingLabel& label, double p = 1.0, double k = 0.0);

std::uint64_t splitmix64(std::uint64_t x);

/// Thread count from GHZW_THREADS, else hardware concurrency (at least 1).
int default_threads();

/// Runs f(i) for i in [0, n) on up to `threads` threads.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace ghzw
