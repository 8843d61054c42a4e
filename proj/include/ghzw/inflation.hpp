#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ghzw/behavior.hpp"
#include "ghzw/lp.hpp"
#include "ghzw/witness.hpp"

namespace ghzw {

/// N dichotomic parties, one source per (N-1)-subset of parties, plus
/// implicit global shared randomness.
struct Scenario {
  int n_parties = 0;
  std::vector<int> inputs;
  int outputs = 2;
  /// Ascending party lists, lexicographic order.
  std::vector<std::vector<int>> source_scopes;

  static Scenario make(std::vector<int> inputs);
  void validate() const;
};

struct PartyCopy {
  int role = 0;
  int copy = 0;
};

struct SourceCopy {
  int role = 0;  // index into Scenario::source_scopes
  int copy = 0;
  std::vector<int> scope;  // party roles the source feeds
};

struct InflationGraph {
  std::vector<PartyCopy> party_copies;
  std::vector<SourceCopy> source_copies;
  /// (source copy index, party copy index)
  std::vector<std::pair<int, int>> edges;
};

/// `order` copies of every party and source; source copy i of scope S feeds
/// copy (i + off(p) - off(first of S)) mod order of each p in S, where off(p)
/// counts the parties missing from S that precede p. Reducing mod 1 gives
/// back the original network.
InflationGraph ring_inflation(const Scenario& s, int order);

struct NonfanoutReport {
  bool ok = true;
  std::vector<std::string> diagnostics;
};

NonfanoutReport validate_nonfanout(const InflationGraph& g);

/// Party-copy permutations (role preserving) that map the wiring onto itself.
/// perm[i] is the image of party copy i. Always contains the identity.
std::vector<std::vector<int>> automorphisms(const InflationGraph& g);

/// Copy sets with distinct roles whose pairwise shared sources coincide.
/// Each set lists party-copy indices in ascending role order.
std::vector<std::vector<int>> injectable_sets(const InflationGraph& g);

/// One M1 row: the observed event P_R(a|x) on role set R.
struct ObservedEvent {
  std::vector<int> roles;
  std::vector<int> settings;
  std::vector<int> outcomes;  // +1 / -1
  int graph = 0;
  std::vector<int> copies;  // canonical injectable copy set, ordered as roles
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BuildOptions {
  /// Cap on the nonzeros of M1 and M2 together.
  long max_nonzeros = 1'000'000;
  /// Cap on the number of symmetry classes of correlator coordinates.
  int max_classes = 4000;
};

/// Constraint system of LP_sat / LP_opt over the inflation distribution(s).
///
/// Column layout: for each graph, the full table of its party copies in the
/// Behavior convention (settings mixed radix, copy 0 most significant;
/// outcome bits, copy 0 most significant).
///
/// M2 holds nonsignalling rows first, then rows z_t - z_rep tying correlator
/// coordinates that must agree (wiring automorphisms, equal-signature copy
/// sets across and within graphs).
struct InflationConstraintSystem {
  Scenario scenario;
  std::vector<InflationGraph> graphs;
  std::vector<int> graph_offset;       // first column of each graph
  std::vector<int> graph_z_offset;     // first correlator coordinate of each graph
  std::vector<std::vector<int>> copy_inputs;  // per graph, per copy
  int n_columns = 0;
  int n_correlators = 0;

  SparseMatrix M1;
  SparseMatrix M2;
  std::vector<double> c;
  std::vector<ObservedEvent> events;

  /// Nonsignalling row u_k (x) e_rest: sum over the copy's outcome at
  /// setting 0 minus the same at setting k, with every other copy's setting
  /// and outcome fixed (setting/outcome indices include the copy at 0).
  struct NsRow {
    int graph, copy, setting, k, outcome;
  };
  std::vector<NsRow> ns_rows;

  // Correlator-space data used by the reduced solver.
  std::vector<int> class_of;               // per correlator coordinate
  std::vector<int> class_rep;              // per class
  std::vector<std::pair<int, int>> ties;   // (coordinate, representative), row order of the tie part of M2
  int n_classes = 0;
  int empty_class = 0;

  long nonzeros() const { return M1.nonZeros() + M2.nonZeros(); }
};

InflationConstraintSystem build_constraint_system(const std::vector<InflationGraph>& graphs, const Scenario& s,
                                                  const BuildOptions& opts = {});
InflationConstraintSystem build_constraint_system(const InflationGraph& g, const Scenario& s,
                                                  const BuildOptions& opts = {});

/// P restricted to the M1 rows.
std::vector<double> observed_vector(const InflationConstraintSystem& cs, const Behavior& p);

struct DualCertificate {
  std::vector<double> y1;  // one per M1 row
  /// 2 * rows(M2): multipliers of M2 x >= 0 followed by those of -M2 x >= 0.
  std::vector<double> y2;
  double value = 0.0;      // y1 . P
};

struct CertificateReport {
  bool ok = true;
  double value = 0.0;
  double max_violation = 0.0;  // of M1'y1 + M2'y2 <= c
  std::vector<std::string> failures;
};

enum class SolveRoute {
  Reduced,  // dual LP over correlator symmetry classes
  Direct,   // the primal over the full table
};

struct InflationOptions {
  SolverOptions lp;
  SolveRoute route = SolveRoute::Reduced;
  double feasibility_tol = 1e-7;
};

/// min c.x subject to M1 x >= P, M2 x = 0, x >= 0.
struct VisibilityResult {
  double tau = 0.0;
  double visibility = 0.0;  // 1 / tau
  std::vector<double> x;
  DualCertificate certificate;
  long iterations = 0;
};

/// Reusable solver; keeps the last optimal basis as a warm start for further
/// behaviors on the same system.
class InflationSolver {
 public:
  explicit InflationSolver(const InflationConstraintSystem& cs, InflationOptions opts = {});

  VisibilityResult visibility(const Behavior& p);
  bool feasible(const Behavior& p);
  /// 1 - max(c.x | M1 x <= P, M2 x = 0, x >= 0).
  double gmf_lower_bound(const Behavior& p);

 private:
  VisibilityResult solve_reduced(const std::vector<double>& obs);
  VisibilityResult solve_direct(const std::vector<double>& obs);

  const InflationConstraintSystem& cs_;
  InflationOptions opts_;
  // Reduced dual LP columns (class space): deduplicated x events, then M1 rows.
  std::vector<std::vector<Coefficient>> w_cols_;
  std::vector<int> w_event_;
  std::vector<std::vector<Coefficient>> m1_cols_;
  std::vector<int> warm_tau_, warm_gmf_;
};

bool lp_sat_feasible(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts = {});
double visibility_general(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts = {});
DualCertificate dual_certificate(const InflationConstraintSystem& cs, const Behavior& p,
                                 const InflationOptions& opts = {});
double gmf_lower_bound(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts = {});

/// Pure arithmetic re-check of y >= 0 and M1'y1 + M2'y2 <= c.
CertificateReport verify_certificate(const InflationConstraintSystem& cs, const DualCertificate& cert,
                                     const Behavior& p);
CertificateReport verify_certificate(const SparseMatrix& M1, const SparseMatrix& M2, const std::vector<double>& c,
                                     const DualCertificate& cert, const std::vector<double>& observed);

/// y1 as a probability-form witness y1 . P <= 1.
ProbabilityFormWitness certificate_witness(const InflationConstraintSystem& cs, const DualCertificate& cert);

/// Applies a party-copy permutation of graph `graph` to an inflation vector.
std::vector<double> permute_solution(const InflationConstraintSystem& cs, int graph, const std::vector<int>& perm,
                                     const std::vector<double>& x);

/// The LP min c.x, M1 x >= P, M2 x = 0, x >= 0 in the polytope text format.
LinearProgram visibility_program(const InflationConstraintSystem& cs, const Behavior& p);

}  // namespace ghzw
