// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"
#include "ghzw/inflation.hpp"
#include "ghzw/polytope.hpp"
#include "ghzw/qsim.hpp"
#include "ghzw/witness.hpp"
#include "support/oracles.hpp"

using namespace ghzw;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    notes.push_back((cond ? "" : "MISS ") + what);
  }
};

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void run(int id, const std::string& name, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  const double dt = seconds_since(t0);
  if (!c.ok) ++failures;
  std::printf("%s [%d] %s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, name.c_str(), dt);
  for (const std::string& n : c.notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
}

double max_over_vertices(const Witness& w) {
  double best = -1e300;
  for (const Behavior& v : local_deterministic_vertices(w.inputs_per_party)) best = std::max(best, evaluate(w, v));
  return best;
}

}  // namespace

int main() {
  run(1, "quantum values of W3 and W4", [](Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const double w3 = evaluate(build_w3(), behavior_from_state(ghz_state(3), w3_strategy()));
    const double w4 = evaluate(build_w4(), behavior_from_state(ghz_state(4), w4_strategy()));
    const double dt = seconds_since(t0);
    c.check(within(w3, 4 + 4 * kSqrt2, 1e-9), fmt("W3 = %.12f, expected 4+4sqrt2 = %.12f", w3, 4 + 4 * kSqrt2));
    c.check(within(w4, 4 + 2 * kSqrt2, 1e-9), fmt("W4 = %.12f, expected 4+2sqrt2 = %.12f", w4, 4 + 2 * kSqrt2));
    c.check(dt < 1.0, fmt("runtime %.3f s < 1 s", dt));
  });

  run(2, "deterministic bounds", [](Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const double m3 = max_over_vertices(build_w3());
    const double m4 = max_over_vertices(build_w4());
    const double dt = seconds_since(t0);
    c.check(m3 == 8.0, fmt("max W3 over 64 strategies = %.12g (expected 8)", m3));
    c.check(m4 == 6.0, fmt("max W4 over 256 strategies = %.12g (expected 6)", m4));
    c.check(local_deterministic_vertices({2, 2, 2, 2}).size() == 256, "256 four-party strategies");
    c.check(dt < 1.0, fmt("runtime %.3f s < 1 s", dt));
  });

  run(3, "noise thresholds", [](Criterion& c) {
    const Threshold w3w = threshold_mixed_noise(build_w3(), w3_strategy(), 3, 0.0);
    const Threshold w4w = threshold_mixed_noise(build_w4(), w4_strategy(), 4, 0.0);
    const Threshold w3m = threshold_mixed_noise(build_w3(), w3_strategy(), 3, 0.5);
    const Threshold w4m = threshold_mixed_noise(build_w4(), w4_strategy(), 4, 0.5);
    c.check(within(w3w.p, 0.828, 0.001), fmt("W3 white-noise visibility %.5f (0.828 +- 0.001)", w3w.p));
    c.check(within(w4w.p, 0.879, 0.001), fmt("W4 white-noise visibility %.5f (0.879 +- 0.001)", w4w.p));
    c.check(within(w3m.p, 0.784, 0.001), fmt("W3 k=0.5 p* %.5f (0.784 +- 0.001)", w3m.p));
    c.check(within(w4m.p, 0.829, 0.001), fmt("W4 k=0.5 p* %.5f (0.829 +- 0.001)", w4m.p));
    c.check(within(100 * w3m.fidelity, 79.75, 0.1), fmt("W3 k=0.5 f* %.3f%% (79.75 +- 0.1)", 100 * w3m.fidelity));
    c.check(within(100 * w4m.fidelity, 83.43, 0.1), fmt("W4 k=0.5 f* %.3f%% (83.43 +- 0.1)", 100 * w4m.fidelity));
  });

  run(4, "N-party family", [](Criterion& c) {
    for (int n = 3; n <= 6; ++n) {
      const double v = evaluate(build_n_party(n), behavior_from_state(ghz_state(n), n_party_strategy(n)));
      const double expect = 2 * kSqrt2 + 2 * (n - 1);
      c.check(within(v, expect, 1e-9), fmt("N=%.0f value %.12f, expected %.12f", n, v, expect));
    }
    const Witness w5 = build_n_party(5);
    const Threshold t0 = threshold_mixed_noise(w5, n_party_strategy(5), 5, 0.0);
    const Threshold t5 = threshold_mixed_noise(w5, n_party_strategy(5), 5, 0.5);
    c.check(within(t0.p, 0.923, 0.002), fmt("N=5 k=0 p* %.5f (0.923 +- 0.002)", t0.p));
    c.check(within(t0.fidelity, 0.926, 0.002), fmt("N=5 k=0 f* %.5f (0.926 +- 0.002)", t0.fidelity));
    c.check(within(t5.p, 0.869, 0.002), fmt("N=5 k=0.5 p* %.5f (0.869 +- 0.002)", t5.p));
    c.check(within(t5.fidelity, 0.873, 0.002), fmt("N=5 k=0.5 f* %.5f (0.873 +- 0.002)", t5.fidelity));
  });

  run(5, "nonsignalling extremes", [](Criterion& c) {
    const double ns_min = extremize_over_nonsignalling(build_w3(), Sense::Minimize).value;
    const double q = evaluate(build_w3(), behavior_from_state(ghz_state(3), w3_strategy()));
    // v q + (1 - v) ns_min = 8 at the worst-case visibility.
    const double vis = (8 - ns_min) / (q - ns_min);
    c.check(within(ns_min, -8.0, 1e-9), fmt("min W3 over NS = %.12f (expected -8)", ns_min));
    c.check(within(vis, 0.906, 0.001), fmt("worst-case visibility %.5f (0.906 +- 0.001)", vis));
  });

  run(6, "experimental counts reproduction", [](Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentDataset ds = parse_dataset(std::string(GHZW_DATA_DIR) + "/table1_counts.csv");
    const double w4 = eval_w4_from_data(ds), w3 = eval_w3_from_data(ds);
    const MonteCarloResult m4 = monte_carlo_sigma(ds, eval_w4_from_data, 10000, 1);
    const MonteCarloResult m3 = monte_carlo_sigma(ds, eval_w3_from_data, 10000, 2);
    const StabilizerReport st = stabilizer_fidelity(ds);
    const double dt = seconds_since(t0);
    c.check(within(w4, 6.7154, 0.01), fmt("W4 = %.5f (6.7154 +- 0.01)", w4));
    c.check(within(w3, 9.5150, 0.05), fmt("W3 = %.5f (9.5150 +- 0.05)", w3));
    c.check(within(m4.sigma, 0.0256, 0.25 * 0.0256), fmt("sigma W4 = %.5f (0.0256 +- 25%%)", m4.sigma));
    c.check(within(m3.sigma, 0.0576, 0.25 * 0.0576), fmt("sigma W3 = %.5f (0.0576 +- 25%%)", m3.sigma));
    const double s4 = (w4 - 6) / m4.sigma, s3 = (w3 - 8) / m3.sigma;
    c.check(s4 >= 25 && s3 >= 25, fmt("significance W4 %.1f sigma, W3 %.1f sigma (>= 25)", s4, s3));
    c.check(within(st.witness, -0.9482, 0.005), fmt("<W_GHZ4> = %.5f (-0.9482 +- 0.005)", st.witness));
    c.check(within(st.fidelity_bound, 0.9741, 0.003), fmt("fidelity bound %.5f (0.9741 +- 0.003)", st.fidelity_bound));
    c.check(within(st.hom_visibility, 0.9691, 0.0005), fmt("HOM visibility %.5f (0.9691 +- 0.0005)", st.hom_visibility));
    c.check(dt < 30.0, fmt("runtime %.2f s < 30 s (2 x 10^4 resamples)", dt));
  });

  run(7, "LP engine soundness", [](Criterion& c) {
    std::mt19937_64 rng(20240607);
    double worst_gap = 0;
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const LinearProgram lp = testing::random_lp(rng);
      const LPSolution s = solve_lp(lp);
      if (s.status != LPStatus::Optimal) {
        ++bad;
        continue;
      }
      const testing::LpCheck ck = testing::check_solution(lp, s);
      if (!ck.primal_ok || !ck.dual_ok) ++bad;
      worst_gap = std::max(worst_gap, ck.gap);
    }
    c.check(bad == 0 && worst_gap <= 1e-7,
            fmt("1000 fuzzed LPs: %.0f failed checks, worst duality gap %.2e (<= 1e-7)", bad, worst_gap));

    const std::vector<Behavior> chsh_local = local_deterministic_vertices({2, 2});
    double worst_oracle = 0;
    for (int v = 0; v < 8; ++v) {
      const Behavior pr = testing::pr_box(v);
      worst_oracle = std::max(worst_oracle, std::abs(polytope_visibility(pr, chsh_local) -
                                                     testing::chsh_mixing_oracle(pr, chsh_local)));
    }
    c.check(worst_oracle <= 1e-6, fmt("CHSH polytope visibility vs mixing oracle, 8 PR boxes: max diff %.2e", worst_oracle));

    const Scenario s3 = Scenario::make({2, 2, 2});
    const InflationConstraintSystem cs = build_constraint_system(ring_inflation(s3, 2), s3);
    InflationSolver solver(cs);
    const std::vector<Behavior> verts = local_deterministic_vertices({2, 2, 2});
    std::vector<Behavior> targets = verts;
    std::uniform_int_distribution<int> pick(0, 63), size(2, 8);
    std::exponential_distribution<double> weight(1.0);
    for (int i = 0; i < 100; ++i) {
      const int k = size(rng);
      std::vector<double> table(verts[0].table().size(), 0.0);
      double total = 0;
      for (int j = 0; j < k; ++j) {
        const double wgt = weight(rng);
        const auto& t = verts[pick(rng)].table();
        for (std::size_t e = 0; e < t.size(); ++e) table[e] += wgt * t[e];
        total += wgt;
      }
      for (double& x : table) x /= total;
      targets.emplace_back(verts[0].inputs(), table);
    }
    int infeasible = 0, cert_bad = 0;
    double worst_tau = 0;
    for (const Behavior& b : targets) {
      const VisibilityResult r = solver.visibility(b);
      if (r.tau > 1.0 + 1e-7) ++infeasible;
      worst_tau = std::max(worst_tau, r.tau);
      const CertificateReport rep = verify_certificate(cs, r.certificate, b);
      if (!rep.ok || std::abs(rep.value - r.tau) > 1e-6) ++cert_bad;
    }
    c.check(infeasible == 0, fmt("hexagon inflation: %.0f of 164 local behaviors infeasible (max tau %.9f)", infeasible,
                                 worst_tau));

    const Behavior ghz_zx = behavior_from_state(ghz_state(3), MeasurementStrategy(3, {{0.0}, {std::numbers::pi / 2}}));
    const Behavior ghz_w3 = behavior_from_state(ghz_state(3), w3_strategy());
    for (const auto& [label, b] : {std::pair<std::string, const Behavior*>{"Z/X", &ghz_zx}, {"W3", &ghz_w3}}) {
      const VisibilityResult r = solver.visibility(*b);
      const CertificateReport rep = verify_certificate(cs, r.certificate, *b);
      if (!rep.ok) ++cert_bad;
      c.notes.push_back("GHZ3 (" + label + " settings) under the hexagon: " +
                        fmt("tau = %.9f, visibility %.9f", r.tau, r.visibility) +
                        (r.tau <= 1.0 + 1e-7 ? ", FEASIBLE" : ", INFEASIBLE"));
    }
    c.check(cert_bad == 0, fmt("dual certificates failing verification: %.0f of 166", cert_bad));
  });

  run(8, "synthetic end-to-end", [](Criterion& c) {
    const ExperimentDataset ds =
        synthetic_dataset([](const SettingLabel& l) { return ghz4_row_distribution(l); }, 1'000'000, 42);
    const double w4 = eval_w4_from_data(ds), w3 = eval_w3_from_data(ds);
    c.check(within(w4, 4 + 2 * kSqrt2, 0.01), fmt("W4 from 10^6 shots/row = %.5f (4+2sqrt2 = %.5f +- 0.01)", w4,
                                                  4 + 2 * kSqrt2));
    c.check(within(w3, 4 + 4 * kSqrt2, 0.01), fmt("W3 from 10^6 shots/row = %.5f (4+4sqrt2 = %.5f +- 0.01)", w3,
                                                  4 + 4 * kSqrt2));
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
