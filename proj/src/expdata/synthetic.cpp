#include <algorithm>
#include <random>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"
#include "ghzw/qsim.hpp"

namespace ghzw {

std::array<double, 16> ghz4_row_distribution(const SettingLabel& label, double p, double k) {
  MeasurementStrategy s;
  for (Basis b : label.bases) s.push_back({DichotomicObservable{basis_angle(b)}});
  const Behavior beh = behavior_from_state(noisy_ghz(4, p, k), s);
  std::array<double, 16> out{};
  std::copy_n(beh.table().begin(), 16, out.begin());
  return out;
}

ExperimentDataset synthetic_dataset(const std::function<std::array<double, 16>(const SettingLabel&)>& row_behavior,
                                    int shots, std::uint64_t seed, const std::vector<SettingLabel>& rows) {
  if (shots <= 0) throw DomainError("synthetic dataset needs a positive shot count");
  ExperimentDataset ds;
  ds.provenance.push_back("synthetic, " + std::to_string(shots) + " shots per row, seed " + std::to_string(seed));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::array<double, 16> probs = row_behavior(rows[r]);
    std::mt19937_64 rng(splitmix64(seed + r));
    CountRecord rec;
    rec.label = rows[r];
    rec.t_seconds = 1.0;
    // Multinomial draw as a chain of conditional binomials.
    std::int64_t left = shots;
    double mass = 1.0;
    for (int o = 0; o < 16 && left > 0; ++o) {
      const double q = o == 15 || mass <= 0 ? 1.0 : std::clamp(probs[o] / mass, 0.0, 1.0);
      const std::int64_t n = std::binomial_distribution<std::int64_t>(left, q)(rng);
      rec.counts[o] = n;
      left -= n;
      mass -= probs[o];
    }
    ds.records.push_back(rec);
  }
  return ds;
}

}  // namespace ghzw
