// Two-phase revised simplex on a dense basis inverse.
//
// The input program is rewritten as min c'x, Ax = b, x >= 0, b >= 0 by
// shifting/mirroring/splitting variables, adding slacks and negating rows.
// Pricing is Dantzig with lowest-index ties; the ratio test is a two-pass
// Harris test. A run of degenerate pivots switches to Bland's rule until the
// next nondegenerate step.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ghzw/errors.hpp"
#include "ghzw/lp.hpp"

namespace ghzw {

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const int n = n_vars();
  for (double c : objective)
    if (!std::isfinite(c)) throw LpError("non-finite objective coefficient");
  if (!lower.empty() && static_cast<int>(lower.size()) != n) throw LpError("lower bounds have the wrong width");
  if (!upper.empty() && static_cast<int>(upper.size()) != n) throw LpError("upper bounds have the wrong width");
  for (int j = 0; j < n; ++j) {
    if (lower_bound(j) == kInf || std::isnan(lower_bound(j))) throw LpError("invalid lower bound");
    if (upper_bound(j) == -kInf || std::isnan(upper_bound(j))) throw LpError("invalid upper bound");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i].rhs)) throw LpError("row " + std::to_string(i) + " has a non-finite rhs");
    for (const Coefficient& a : rows[i].coeffs) {
      if (a.index < 0 || a.index >= n)
        throw LpError("row " + std::to_string(i) + " references column " + std::to_string(a.index));
      if (!std::isfinite(a.value)) throw LpError("row " + std::to_string(i) + " has a non-finite coefficient");
    }
  }
}

namespace {

using SparseColumn = std::vector<std::pair<int, double>>;

struct VarMap {
  enum Kind { Shift, Mirror, Free } kind = Shift;
  int col = -1;
  int col2 = -1;
  double offset = 0.0;
};

struct StandardForm {
  int m = 0;
  int n_real = 0;  // structural and slack columns; artificials follow
  std::vector<SparseColumn> cols;
  std::vector<double> b;
  std::vector<double> cost;
  std::vector<int> initial;  // per row: +1 slack column usable as a basis column, or -1
  std::vector<int> row_of;
  std::vector<double> row_sign;
  std::vector<VarMap> vars;
  double sense = 1.0;
};

StandardForm standardize(const LinearProgram& lp) {
  StandardForm sf;
  sf.sense = lp.sense == Sense::Minimize ? 1.0 : -1.0;
  const int n = lp.n_vars();

  struct RowBuild {
    std::vector<std::pair<int, double>> entries;
    double rhs = 0;
    Relation rel = Relation::Equal;
  };
  std::vector<RowBuild> rows;
  int ncol = 0;
  sf.vars.resize(n);
  std::vector<double> cost;
  for (int j = 0; j < n; ++j) {
    const double l = lp.lower_bound(j), u = lp.upper_bound(j), c = lp.objective[j];
    VarMap& v = sf.vars[j];
    if (std::isfinite(l)) {
      v = {VarMap::Shift, ncol++, -1, l};
      cost.push_back(sf.sense * c);
      if (std::isfinite(u)) rows.push_back({{{v.col, 1.0}}, u - l, Relation::LessEqual});
    } else if (std::isfinite(u)) {
      v = {VarMap::Mirror, ncol++, -1, u};
      cost.push_back(-sf.sense * c);
    } else {
      v = {VarMap::Free, ncol, ncol + 1, 0.0};
      ncol += 2;
      cost.push_back(sf.sense * c);
      cost.push_back(-sf.sense * c);
    }
  }

  const std::size_t n_bound_rows = rows.size();
  for (const Constraint& r : lp.rows) {
    RowBuild rb;
    rb.rel = r.relation;
    rb.rhs = r.rhs;
    for (const Coefficient& a : r.coeffs) {
      const VarMap& v = sf.vars[a.index];
      switch (v.kind) {
        case VarMap::Shift:
          rb.entries.push_back({v.col, a.value});
          rb.rhs -= a.value * v.offset;
          break;
        case VarMap::Mirror:
          rb.entries.push_back({v.col, -a.value});
          rb.rhs -= a.value * v.offset;
          break;
        case VarMap::Free:
          rb.entries.push_back({v.col, a.value});
          rb.entries.push_back({v.col2, -a.value});
          break;
      }
    }
    rows.push_back(std::move(rb));
  }

  sf.m = static_cast<int>(rows.size());
  // Original row i sits after the bound rows.
  sf.row_of.resize(lp.rows.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) sf.row_of[i] = static_cast<int>(n_bound_rows + i);
  sf.row_sign.assign(sf.m, 1.0);
  sf.initial.assign(sf.m, -1);
  sf.b.resize(sf.m);

  std::vector<SparseColumn> cols(ncol);
  for (int r = 0; r < sf.m; ++r) {
    RowBuild& rb = rows[r];
    const double sign = rb.rhs < 0 ? -1.0 : 1.0;
    sf.row_sign[r] = sign;
    sf.b[r] = sign * rb.rhs;
    std::sort(rb.entries.begin(), rb.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < rb.entries.size();) {
      const int col = rb.entries[k].first;
      double v = 0;
      for (; k < rb.entries.size() && rb.entries[k].first == col; ++k) v += rb.entries[k].second;
      if (v != 0) cols[col].push_back({r, sign * v});
    }
    if (rb.rel != Relation::Equal) {
      const double s = (rb.rel == Relation::LessEqual ? 1.0 : -1.0) * sign;
      cols.push_back({{r, s}});
      cost.push_back(0.0);
      if (s > 0) sf.initial[r] = static_cast<int>(cols.size()) - 1;
    }
  }
  sf.n_real = static_cast<int>(cols.size());
  for (int r = 0; r < sf.m; ++r) {
    cols.push_back({{r, 1.0}});
    cost.push_back(0.0);
  }
  sf.cols = std::move(cols);
  sf.cost = std::move(cost);
  return sf;
}

enum class RunResult { Optimal, Unbounded };

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardForm& sf, const SolverOptions& opts) : sf_(sf), opts_(opts) {
    m_ = sf.m;
    ncols_ = static_cast<int>(sf.cols.size());
    pos_.assign(ncols_, -1);
    b_ = Eigen::Map<const Eigen::VectorXd>(sf.b.data(), m_);
    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations : 50L * (m_ + ncols_) + 10000;
    inv_norm_.resize(ncols_);
    for (int j = 0; j < ncols_; ++j) {
      double s = 1;
      for (const auto& [r, v] : sf.cols[j]) s += v * v;
      inv_norm_[j] = 1 / std::sqrt(s);
    }
  }

  bool is_artificial(int j) const { return j >= sf_.n_real; }

  // Returns false if the basis is singular.
  bool set_basis(const std::vector<int>& basis) {
    if (static_cast<int>(basis.size()) != m_) return false;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int i = 0; i < m_; ++i) {
      if (basis[i] < 0 || basis[i] >= ncols_ || pos_[basis[i]] >= 0) return false;
      pos_[basis[i]] = i;
    }
    basis_ = basis;
    return refactor(false);
  }

  void identity_start(const std::vector<int>& basis) {
    basis_ = basis;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int i = 0; i < m_; ++i) pos_[basis_[i]] = i;
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = b_;
    since_refactor_ = 0;
  }

  RunResult run(const std::vector<double>& cost) {
    // Bland's rule runs in bounded episodes after a degenerate stall; each
    // episode doubles the stall allowance before the next one.
    int stall = 0, stall_limit = opts_.degenerate_stall;
    long bland_left = 0;
    bool verified = false;
    Eigen::VectorXd cb(m_), pi(m_), u(m_);
    for (;;) {
      if (iterations_ >= max_iter_) throw LpError("simplex iteration limit reached");
      if (since_refactor_ >= opts_.refactor_interval) refactor(true);
      const bool bland = bland_left > 0;

      for (int i = 0; i < m_; ++i) cb(i) = cost[basis_[i]];
      pi.noalias() = binv_.transpose() * cb;

      int q = -1;
      double best = 0;
      for (int j = 0; j < sf_.n_real; ++j) {
        if (pos_[j] >= 0) continue;
        double d = cost[j];
        for (const auto& [r, v] : sf_.cols[j]) d -= pi(r) * v;
        if (bland) {
          if (d < -opts_.optimality_tol) {
            q = j;
            break;
          }
        } else if (d < -opts_.optimality_tol && d * inv_norm_[j] < best) {
          best = d * inv_norm_[j];
          q = j;
        }
      }
      if (q < 0) {
        if (!verified && since_refactor_ > 0) {
          refactor(true);
          verified = true;
          continue;
        }
        return RunResult::Optimal;
      }
      verified = false;

      u.setZero();
      for (const auto& [r, v] : sf_.cols[q]) u.noalias() += v * binv_.col(r);

      const int r = ratio_test(u, bland);
      if (r < 0) return RunResult::Unbounded;
      const double theta = std::max(xb_(r) / u(r), 0.0);
      pivot(q, r, u, theta);
      if (bland_left > 0) --bland_left;
      if (theta <= 1e-12) {
        if (++stall > stall_limit && bland_left == 0) {
          bland_left = 2L * m_;
          stall = 0;
          stall_limit *= 2;
        }
      } else {
        stall = 0;
        bland_left = 0;
      }
    }
  }

  // Pivots basic artificials out where a real column can replace them.
  void drive_out_artificials() {
    Eigen::VectorXd u(m_);
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      int q = -1;
      double best = 1e-7;
      for (int j = 0; j < sf_.n_real; ++j) {
        if (pos_[j] >= 0) continue;
        double a = 0;
        for (const auto& [r, v] : sf_.cols[j]) a += binv_(i, r) * v;
        if (std::abs(a) > best) {
          best = std::abs(a);
          q = j;
        }
      }
      if (q < 0) continue;
      u.setZero();
      for (const auto& [r, v] : sf_.cols[q]) u.noalias() += v * binv_.col(r);
      pivot(q, i, u, xb_(i) / u(i));
    }
  }

  bool refactor(bool must_succeed) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (const auto& [r, v] : sf_.cols[basis_[i]]) B(r, i) = v;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    if (!(lu.rcond() > 1e-13)) {
      if (must_succeed) throw DegenerateBasis("simplex basis became numerically singular");
      return false;
    }
    binv_ = lu.inverse();
    xb_.noalias() = binv_ * b_;
    for (int i = 0; i < m_; ++i)
      if (xb_(i) < 0 && xb_(i) > -opts_.feasibility_tol) xb_(i) = 0;
    since_refactor_ = 0;
    return true;
  }

  double infeasibility() const {
    double s = 0;
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basis_[i])) s += std::abs(xb_(i));
    return s;
  }

  double min_basic_value() const { return m_ ? xb_.minCoeff() : 0.0; }

  std::vector<double> values() const {
    std::vector<double> x(ncols_, 0.0);
    for (int i = 0; i < m_; ++i) x[basis_[i]] = xb_(i);
    return x;
  }

  Eigen::VectorXd duals(const std::vector<double>& cost) const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost[basis_[i]];
    return binv_.transpose() * cb;
  }

  void pin_artificials() { pin_artificials_ = true; }
  const std::vector<int>& basis() const { return basis_; }
  long iterations() const { return iterations_; }

 private:
  int ratio_test(const Eigen::VectorXd& u, bool bland) const {
    const double tol = opts_.pivot_tol;
    // After phase 1 a basic artificial must stay at zero: it leaves first if
    // it would move.
    if (pin_artificials_)
      for (int i = 0; i < m_; ++i)
        if (is_artificial(basis_[i]) && std::abs(u(i)) > tol) return i;

    if (bland) {
      int r = -1;
      double best = kInf;
      for (int i = 0; i < m_; ++i) {
        if (u(i) <= tol) continue;
        const double ratio = std::max(xb_(i), 0.0) / u(i);
        if (r < 0 || ratio < best - 1e-12) {
          best = ratio;
          r = i;
        } else if (ratio <= best + 1e-12 && basis_[i] < basis_[r]) {
          best = std::min(best, ratio);
          r = i;
        }
      }
      return r;
    }

    double bound = kInf;
    for (int i = 0; i < m_; ++i)
      if (u(i) > tol) bound = std::min(bound, (std::max(xb_(i), 0.0) + opts_.feasibility_tol) / u(i));
    if (bound == kInf) return -1;
    int r = -1;
    double best_pivot = 0;
    for (int i = 0; i < m_; ++i) {
      if (u(i) <= tol) continue;
      if (std::max(xb_(i), 0.0) / u(i) <= bound && u(i) > best_pivot) {
        best_pivot = u(i);
        r = i;
      }
    }
    return r;
  }

  void pivot(int q, int r, const Eigen::VectorXd& u, double theta) {
    xb_.noalias() -= theta * u;
    xb_(r) = theta;
    for (int i = 0; i < m_; ++i)
      if (xb_(i) < 0 && xb_(i) > -opts_.feasibility_tol) xb_(i) = 0;

    const Eigen::RowVectorXd prow = binv_.row(r) / u(r);
    binv_.noalias() -= u * prow;
    binv_.row(r) = prow;

    pos_[basis_[r]] = -1;
    basis_[r] = q;
    pos_[q] = r;
    ++iterations_;
    ++since_refactor_;
  }

  const StandardForm& sf_;
  const SolverOptions& opts_;
  int m_ = 0, ncols_ = 0;
  long max_iter_ = 0;
  long iterations_ = 0;
  int since_refactor_ = 0;
  bool pin_artificials_ = false;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<double> inv_norm_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_, b_;
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts) {
  lp.validate();
  const StandardForm sf = standardize(lp);
  RevisedSimplex simplex(sf, opts);
  LPSolution sol;

  bool warm = false;
  if (opts.warm_basis && simplex.set_basis(*opts.warm_basis)) {
    warm = simplex.min_basic_value() >= -opts.feasibility_tol && simplex.infeasibility() <= opts.feasibility_tol;
  }
  if (!warm) {
    std::vector<int> basis(sf.m);
    for (int r = 0; r < sf.m; ++r) basis[r] = sf.initial[r] >= 0 ? sf.initial[r] : sf.n_real + r;
    simplex.identity_start(basis);
    std::vector<double> phase1(sf.cols.size(), 0.0);
    bool any_artificial = false;
    for (int r = 0; r < sf.m; ++r)
      if (sf.initial[r] < 0) {
        phase1[sf.n_real + r] = 1.0;
        any_artificial = true;
      }
    if (any_artificial) {
      simplex.run(phase1);
      double bmax = 1.0;
      for (double v : sf.b) bmax = std::max(bmax, std::abs(v));
      if (simplex.infeasibility() > 10 * opts.feasibility_tol * bmax) {
        sol.status = LPStatus::Infeasible;
        sol.iterations = simplex.iterations();
        return sol;
      }
      simplex.drive_out_artificials();
    }
  }

  simplex.pin_artificials();
  if (simplex.run(sf.cost) == RunResult::Unbounded) {
    sol.status = LPStatus::Unbounded;
    sol.iterations = simplex.iterations();
    return sol;
  }
  simplex.refactor(true);

  const std::vector<double> xs = simplex.values();
  const Eigen::VectorXd pi = simplex.duals(sf.cost);
  const int n = lp.n_vars();
  sol.status = LPStatus::Optimal;
  sol.primal.resize(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& v = sf.vars[j];
    switch (v.kind) {
      case VarMap::Shift: sol.primal[j] = v.offset + xs[v.col]; break;
      case VarMap::Mirror: sol.primal[j] = v.offset - xs[v.col]; break;
      case VarMap::Free: sol.primal[j] = xs[v.col] - xs[v.col2]; break;
    }
  }
  sol.objective = 0;
  for (int j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.primal[j];
  sol.dual.resize(lp.rows.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const int r = sf.row_of[i];
    sol.dual[i] = sf.sense * sf.row_sign[r] * pi(r);
  }
  sol.reduced_cost = lp.objective;
  for (std::size_t i = 0; i < lp.rows.size(); ++i)
    for (const Coefficient& a : lp.rows[i].coeffs) sol.reduced_cost[a.index] -= sol.dual[i] * a.value;
  sol.iterations = simplex.iterations();
  sol.basis = simplex.basis();
  return sol;
}

}  // namespace ghzw
