#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

namespace ghzw {

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct Coefficient {
  int index = 0;
  double value = 0.0;
};

struct Constraint {
  std::vector<Coefficient> coeffs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Constraint> rows;
  /// Empty means 0 for every variable.
  std::vector<double> lower;
  /// Empty means +inf for every variable.
  std::vector<double> upper;

  int n_vars() const { return static_cast<int>(objective.size()); }
  double lower_bound(int j) const { return lower.empty() ? 0.0 : lower[j]; }
  double upper_bound(int j) const { return upper.empty() ? kInf : upper[j]; }
  /// Throws LpError on width mismatches, out-of-range indices or
  /// non-finite coefficients.
  void validate() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LPStatus s);

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;
  /// Per row: derivative of the optimal objective with respect to its rhs.
  std::vector<double> dual;
  /// c_j - sum_i dual_i a_ij.
  std::vector<double> reduced_cost;
  long iterations = 0;
  /// Final basis in the solver's internal column numbering; may be passed
  /// back as a warm start for a program with identical constraints.
  std::vector<int> basis;
};

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 64;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_stall = 64;
  long max_iterations = 0;  // 0: scaled with problem size
  const std::vector<int>* warm_basis = nullptr;
};

LPSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts = {});

/// Plain-text dump; numbers use the shortest round-trip decimal form, so
/// read_lp(write_lp(lp)) reproduces every coefficient exactly.
void write_lp(std::ostream& out, const LinearProgram& lp);
LinearProgram read_lp(std::istream& in);

}  // namespace ghzw
