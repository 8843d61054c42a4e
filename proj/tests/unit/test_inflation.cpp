#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ghzw/errors.hpp"
#include "ghzw/inflation.hpp"
#include "ghzw/inflation_json.hpp"
#include "ghzw/polytope.hpp"
#include "ghzw/qsim.hpp"

using namespace ghzw;

namespace {

Behavior pr_box() {
  std::vector<double> t(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) t[(x * 2 + y) * 4 + a * 2 + b] = 0.5;
  return Behavior({2, 2}, t);
}

MeasurementStrategy zx_strategy(int n) {
  return MeasurementStrategy(n, {{0.0}, {std::numbers::pi / 2}});
}

struct System {
  Scenario s;
  InflationConstraintSystem cs;
  System(int n, int order)
      : s(Scenario::make(std::vector<int>(n, 2))), cs(build_constraint_system(ring_inflation(s, order), s)) {}
};

const System& bell_ring() {
  static const System sys(2, 2);
  return sys;
}

const System& hexagon() {
  static const System sys(3, 2);
  return sys;
}

InflationSolver& hexagon_solver() {
  static InflationSolver solver(hexagon().cs);
  return solver;
}

// Residuals of the primal constraints, computed directly from the matrices.
struct PrimalCheck {
  double min_slack = 0;   // min over rows of (M1 x - P)
  double max_m2 = 0;      // max |M2 x|
  double min_x = 0;
  double cost = 0;
};

PrimalCheck check_primal(const InflationConstraintSystem& cs, const std::vector<double>& x, const Behavior& p) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const std::vector<double> obs = observed_vector(cs, p);
  const Eigen::VectorXd m1 = cs.M1 * xv, m2 = cs.M2 * xv;
  PrimalCheck pc;
  pc.min_slack = 1e9;
  for (Eigen::Index i = 0; i < m1.size(); ++i) pc.min_slack = std::min(pc.min_slack, m1(i) - obs[i]);
  pc.max_m2 = m2.size() ? m2.cwiseAbs().maxCoeff() : 0.0;
  pc.min_x = xv.minCoeff();
  for (std::size_t j = 0; j < x.size(); ++j) pc.cost += cs.c[j] * x[j];
  return pc;
}

}  // namespace

TEST_CASE("ring inflation shape") {
  const Scenario s3 = Scenario::make({2, 2, 2});
  const InflationGraph g3 = ring_inflation(s3, 2);
  CHECK(g3.party_copies.size() == 6);
  CHECK(g3.source_copies.size() == 6);
  CHECK(g3.edges.size() == 12);
  CHECK(validate_nonfanout(g3).ok);

  const InflationGraph g4 = ring_inflation(Scenario::make({2, 2, 2, 2}), 2);
  CHECK(g4.party_copies.size() == 8);
  CHECK(g4.source_copies.size() == 8);
  CHECK(validate_nonfanout(g4).ok);

  CHECK_THROWS_AS(ring_inflation(s3, 1), InvalidArity);
  CHECK(automorphisms(g3).size() >= 1);
  CHECK(injectable_sets(g3).size() == 12);
}

TEST_CASE("nonfanout diagnostics") {
  const Scenario s3 = Scenario::make({2, 2, 2});
  InflationGraph g = ring_inflation(s3, 2);
  // Point the first edge of source copy 0 at the other copy of the same role.
  const int party = g.edges[0].second;
  const int other = party % 2 == 0 ? party + 1 : party - 1;
  g.edges.push_back({0, other});
  const NonfanoutReport rep = validate_nonfanout(g);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.diagnostics.empty());
  CHECK(rep.diagnostics.front().find("source copy 0") != std::string::npos);
  CHECK_THROWS_AS(build_constraint_system(g, s3), StructuralError);

  InflationGraph starved = ring_inflation(s3, 2);
  starved.edges.pop_back();
  CHECK_FALSE(validate_nonfanout(starved).ok);

  CHECK_THROWS_AS(build_constraint_system(std::vector<InflationGraph>{}, s3), StructuralError);
}

TEST_CASE("hexagon constraint system") {
  const InflationConstraintSystem& cs = hexagon().cs;
  CHECK(cs.n_columns == 4096);
  CHECK(cs.M1.cols() == 4096);
  CHECK(cs.M2.cols() == 4096);
  CHECK(cs.M1.rows() == static_cast<Eigen::Index>(cs.events.size()));

  // c is the normalization functional.
  double cu = 0;
  for (double v : cs.c) cu += v / 64.0;
  CHECK(cu == doctest::Approx(1.0).epsilon(1e-12));

  // The uniform table satisfies every nonsignalling and tie row.
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(4096, 1.0 / 64);
  CHECK((cs.M2 * u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bell ring: PR box visibility on both routes") {
  const InflationConstraintSystem& cs = bell_ring().cs;
  const Behavior pr = pr_box();

  const VisibilityResult r = InflationSolver(cs).visibility(pr);
  CHECK(r.visibility == doctest::Approx(0.75).epsilon(1e-7));
  InflationOptions direct;
  direct.route = SolveRoute::Direct;
  const VisibilityResult d = InflationSolver(cs, direct).visibility(pr);
  CHECK(d.visibility == doctest::Approx(0.75).epsilon(1e-7));

  // An independent solve of the exported program.
  const LPSolution plain = solve_lp(visibility_program(cs, pr));
  REQUIRE(plain.status == LPStatus::Optimal);
  CHECK(plain.objective == doctest::Approx(r.tau).epsilon(1e-8));

  for (const VisibilityResult* res : {&r, &d}) {
    const CertificateReport rep = verify_certificate(cs, res->certificate, pr);
    CHECK(rep.ok);
    CHECK(rep.value == doctest::Approx(res->tau).epsilon(1e-7));
    CHECK(std::abs(res->visibility - 1.0 / rep.value) <= 1e-6);
    const PrimalCheck pc = check_primal(cs, res->x, pr);
    CHECK(pc.min_slack >= -1e-8);
    CHECK(pc.max_m2 <= 1e-8);
    CHECK(pc.min_x >= -1e-10);
    CHECK(pc.cost == doctest::Approx(res->tau).epsilon(1e-8));
  }

  // The certificate is a Bell-type inequality violated by the PR box.
  const ProbabilityFormWitness w = certificate_witness(cs, r.certificate);
  CHECK(evaluate(w, pr) > w.bound + 0.1);
  for (const Behavior& v : local_deterministic_vertices({2, 2})) CHECK(evaluate(w, v) <= w.bound + 1e-7);

  CHECK(InflationSolver(cs).gmf_lower_bound(pr) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(InflationSolver(cs).gmf_lower_bound(Behavior::uniform({2, 2})) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(InflationSolver(cs, direct).gmf_lower_bound(pr) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("visibility along the PR/white-noise segment") {
  const InflationConstraintSystem& cs = bell_ring().cs;
  InflationSolver solver(cs);
  const Behavior pr = pr_box(), u = Behavior::uniform({2, 2});
  double prev = 2;
  for (int i = 0; i <= 10; ++i) {
    const double lam = i / 10.0;  // weight of the PR box
    const Behavior b = mixture(pr, u, lam);
    const double v = solver.visibility(b).visibility;
    // Nonincreasing in the PR weight; the CHSH facet gives tau = (2 + 2 lam) / 3
    // once it exceeds 1, so the segment leaves the local set at lam = 1/2.
    CHECK(v <= prev + 1e-9);
    CHECK(1.0 / v == doctest::Approx(std::max(1.0, (2 + 2 * lam) / 3)).epsilon(1e-7));
    prev = v;
    CHECK(solver.feasible(b) == (lam <= 0.5 + 1e-9));
  }
}

TEST_CASE("tampered certificates are rejected with the index") {
  const InflationConstraintSystem& cs = bell_ring().cs;
  const Behavior pr = pr_box();
  DualCertificate cert = InflationSolver(cs).visibility(pr).certificate;
  std::size_t i = 0;
  while (i < cert.y1.size() && cert.y1[i] <= 1e-6) ++i;
  REQUIRE(i < cert.y1.size());
  cert.y1[i] = -cert.y1[i];
  const CertificateReport rep = verify_certificate(cs, cert, pr);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.failures.empty());
  CHECK(rep.failures.front().find("y1[" + std::to_string(i) + "]") != std::string::npos);

  DualCertificate scaled = InflationSolver(cs).visibility(pr).certificate;
  for (double& y : scaled.y1) y *= 2;
  CHECK_FALSE(verify_certificate(cs, scaled, pr).ok);

  DualCertificate short_cert = scaled;
  short_cert.y2.pop_back();
  CHECK_FALSE(verify_certificate(cs, short_cert, pr).ok);
}

TEST_CASE("json round trips") {
  const InflationGraph g = ring_inflation(Scenario::make({2, 2, 2}), 2);
  const InflationGraph back = graph_from_json(graph_to_json(g));
  REQUIRE(back.party_copies.size() == g.party_copies.size());
  CHECK(back.edges == g.edges);
  for (std::size_t i = 0; i < g.source_copies.size(); ++i) CHECK(back.source_copies[i].scope == g.source_copies[i].scope);
  CHECK_THROWS_AS(graph_from_json("{\"party_copies\": 3}"), ParseError);

  const DualCertificate cert = InflationSolver(bell_ring().cs).visibility(pr_box()).certificate;
  const DualCertificate cb = certificate_from_json(certificate_to_json(cert));
  CHECK(cb.y1 == cert.y1);
  CHECK(cb.y2 == cert.y2);
  CHECK(verify_certificate(bell_ring().cs, cb, pr_box()).ok);
}

TEST_CASE("size caps") {
  const Scenario s4 = Scenario::make({2, 2, 2, 2});
  CHECK_THROWS_AS(build_constraint_system(ring_inflation(s4, 2), s4), SizeCapExceeded);
  const Scenario s3 = Scenario::make({2, 2, 2});
  CHECK_THROWS_AS(build_constraint_system(ring_inflation(s3, 3), s3), SizeCapExceeded);
  InflationOptions direct;
  direct.route = SolveRoute::Direct;
  CHECK_THROWS_AS(InflationSolver(hexagon().cs, direct).visibility(Behavior::uniform({2, 2, 2})), SizeCapExceeded);
}

TEST_CASE("hexagon: local behaviors are feasible with verified certificates") {
  const InflationConstraintSystem& cs = hexagon().cs;
  InflationSolver& solver = hexagon_solver();
  const std::vector<Behavior> verts = local_deterministic_vertices({2, 2, 2});
  std::vector<const Behavior*> picks;
  for (std::size_t i = 0; i < verts.size(); i += 9) picks.push_back(&verts[i]);
  const Behavior u = Behavior::uniform({2, 2, 2});
  picks.push_back(&u);
  for (const Behavior* b : picks) {
    const VisibilityResult r = solver.visibility(*b);
    CHECK(r.tau <= 1.0 + 1e-7);
    const CertificateReport rep = verify_certificate(cs, r.certificate, *b);
    CHECK(rep.ok);
    CHECK(std::abs(r.visibility - 1.0 / rep.value) <= 1e-6);
  }
}

TEST_CASE("hexagon: GHZ3 and automorphism closure") {
  const InflationConstraintSystem& cs = hexagon().cs;
  InflationSolver& solver = hexagon_solver();
  const Behavior ghz = behavior_from_state(ghz_state(3), zx_strategy(3));
  const VisibilityResult r = solver.visibility(ghz);
  const CertificateReport rep = verify_certificate(cs, r.certificate, ghz);
  CHECK(rep.ok);
  CHECK(std::abs(r.visibility - 1.0 / rep.value) <= 1e-6);
  // The triangle-free hexagon does not separate GHZ3 from LOSR models.
  CHECK(r.tau == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(solver.gmf_lower_bound(ghz) == doctest::Approx(0.0).epsilon(1e-7));

  const PrimalCheck base = check_primal(cs, r.x, ghz);
  CHECK(base.min_slack >= -1e-8);
  CHECK(base.max_m2 <= 1e-8);
  for (const std::vector<int>& perm : automorphisms(cs.graphs[0])) {
    const std::vector<double> y = permute_solution(cs, 0, perm, r.x);
    const PrimalCheck pc = check_primal(cs, y, ghz);
    CHECK(pc.min_slack >= -1e-8);
    CHECK(pc.max_m2 <= 1e-8);
    CHECK(pc.cost == doctest::Approx(base.cost).epsilon(1e-10));
  }
}
