// LP_opt over an inflation constraint system.
//
// The reduced route never materializes the nonsignalling rows. A
// nonsignalling table is x = T z with z its full-correlator coordinates, and
// the tie rows of M2 identify z coordinates class by class. The dual
//
//   max  P . y1   s.t.  sum_e w_e T_e + sum_i y1_i (M1 T)_i = e_empty,  w, y1 >= 0
//
// is then an LP with one row per class. Its row duals are the class values
// of z, and a certificate over the original M1/M2 is rebuilt exactly: tie
// multipliers from the per-coordinate residual, nonsignalling multipliers by
// peeling the residual off one copy at a time.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ghzw/errors.hpp"
#include "ghzw/inflation.hpp"
#include "layout.hpp"

namespace ghzw {

namespace {

using detail::GraphLayout;

std::vector<GraphLayout> layouts_of(const InflationConstraintSystem& cs) {
  std::vector<GraphLayout> out;
  for (const InflationGraph& g : cs.graphs) out.emplace_back(g, cs.scenario);
  return out;
}

int graph_of_column(const InflationConstraintSystem& cs, int col) {
  int gi = static_cast<int>(cs.graph_offset.size()) - 1;
  while (cs.graph_offset[gi] > col) --gi;
  return gi;
}

// Correlator coordinate of subset `mask` (bit K-1-j for copy j) read at the
// settings x.
long subset_coordinate(const GraphLayout& L, const std::vector<int>& x, long mask) {
  long t = 0;
  for (int j = 0; j < L.K; ++j) {
    const bool in = (mask >> (L.K - 1 - j)) & 1;
    t = t * (L.m[j] + 1) + (in ? x[j] + 1 : 0);
  }
  return t;
}

template <class F>
void for_each_T_entry(const InflationConstraintSystem& cs, const std::vector<GraphLayout>& layouts, int col, F&& f) {
  const int gi = graph_of_column(cs, col);
  const GraphLayout& L = layouts[gi];
  const long local = col - cs.graph_offset[gi];
  const long sidx = local / L.n_outcomes, o = local % L.n_outcomes;
  const std::vector<int> x = L.decode_setting(sidx);
  const double scale = std::ldexp(1.0, -L.K);
  for (long mask = 0; mask < L.n_outcomes; ++mask) {
    const double v = (__builtin_popcountl(o & mask) & 1) ? -scale : scale;
    f(cs.graph_z_offset[gi] + static_cast<int>(subset_coordinate(L, x, mask)), v);
  }
}

template <class F>
void for_each_M1T_entry(const InflationConstraintSystem& cs, const std::vector<GraphLayout>& layouts, int row, F&& f) {
  const ObservedEvent& ev = cs.events[row];
  const GraphLayout& L = layouts[ev.graph];
  const int width = static_cast<int>(ev.roles.size());
  const double scale = std::ldexp(1.0, -width);
  std::vector<int> v(L.K, 0);
  for (long u = 0; u < (1L << width); ++u) {
    double val = scale;
    std::fill(v.begin(), v.end(), 0);
    for (int i = 0; i < width; ++i) {
      if (!((u >> (width - 1 - i)) & 1)) continue;
      v[ev.copies[i]] = ev.settings[i] + 1;
      val *= ev.outcomes[i];
    }
    f(cs.graph_z_offset[ev.graph] + static_cast<int>(L.encode_z(v)), val);
  }
}

std::vector<Coefficient> merged(std::map<int, double>& acc) {
  std::vector<Coefficient> out;
  for (const auto& [k, v] : acc)
    if (v != 0) out.push_back({k, v});
  return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Nonsignalling multipliers whose M2 image equals g, which must be
// orthogonal to every nonsignalling table.
std::vector<double> peel_nonsignalling(const InflationConstraintSystem& cs, const std::vector<GraphLayout>& layouts,
                                       const Eigen::VectorXd& g) {
  std::vector<std::vector<std::vector<double>>> parts(layouts.size());
  for (std::size_t gi = 0; gi < layouts.size(); ++gi) {
    const GraphLayout& L = layouts[gi];
    const long size = L.n_settings * L.n_outcomes;
    std::vector<double> h(g.data() + cs.graph_offset[gi], g.data() + cs.graph_offset[gi] + size);
    parts[gi].resize(L.K);
    for (int j = 0; j < L.K; ++j) {
      std::vector<double> t(size, 0.0);
      const long bit = 1L << (L.K - 1 - j);
      std::vector<double> mu(L.m[j]);
      std::vector<long> sk(L.m[j]);
      for (long sidx = 0; sidx < L.n_settings; ++sidx) {
        std::vector<int> x = L.decode_setting(sidx);
        if (x[j] != 0) continue;
        for (int k = 0; k < L.m[j]; ++k) {
          x[j] = k;
          sk[k] = L.encode_setting(x);
        }
        for (long o = 0; o < L.n_outcomes; ++o) {
          if (o & bit) continue;
          double mean = 0;
          for (int k = 0; k < L.m[j]; ++k) {
            mu[k] = 0.5 * (h[sk[k] * L.n_outcomes + o] + h[sk[k] * L.n_outcomes + (o | bit)]);
            mean += mu[k];
          }
          mean /= L.m[j];
          for (int k = 0; k < L.m[j]; ++k) {
            t[sk[k] * L.n_outcomes + o] = mu[k] - mean;
            t[sk[k] * L.n_outcomes + (o | bit)] = mu[k] - mean;
          }
        }
      }
      for (long i = 0; i < size; ++i) h[i] -= t[i];
      parts[gi][j] = std::move(t);
    }
  }
  std::vector<double> y(cs.ns_rows.size());
  for (std::size_t r = 0; r < cs.ns_rows.size(); ++r) {
    const auto& ns = cs.ns_rows[r];
    const GraphLayout& L = layouts[ns.graph];
    std::vector<int> x = L.decode_setting(ns.setting);
    x[ns.copy] = ns.k;
    y[r] = -parts[ns.graph][ns.copy][L.encode_setting(x) * L.n_outcomes + ns.outcome];
  }
  return y;
}

DualCertificate split_certificate(const std::vector<double>& y1, const std::vector<double>& y2_signed,
                                  const std::vector<double>& obs) {
  DualCertificate cert;
  cert.y1 = y1;
  const std::size_t r = y2_signed.size();
  cert.y2.assign(2 * r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    cert.y2[i] = std::max(y2_signed[i], 0.0);
    cert.y2[r + i] = std::max(-y2_signed[i], 0.0);
  }
  for (std::size_t i = 0; i < y1.size(); ++i) cert.value += y1[i] * obs[i];
  return cert;
}

}  // namespace

InflationSolver::InflationSolver(const InflationConstraintSystem& cs, InflationOptions opts)
    : cs_(cs), opts_(opts) {
  if (opts_.route != SolveRoute::Reduced) return;
  const auto layouts = layouts_of(cs);
  std::map<std::vector<std::pair<int, double>>, int> seen;
  for (int col = 0; col < cs.n_columns; ++col) {
    std::map<int, double> acc;
    for_each_T_entry(cs, layouts, col, [&](int t, double v) { acc[cs.class_of[t]] += v; });
    std::vector<Coefficient> c = merged(acc);
    std::vector<std::pair<int, double>> key;
    for (const Coefficient& e : c) key.push_back({e.index, e.value});
    if (!seen.emplace(std::move(key), col).second) continue;
    w_cols_.push_back(std::move(c));
    w_event_.push_back(col);
  }
  for (int row = 0; row < static_cast<int>(cs.events.size()); ++row) {
    std::map<int, double> acc;
    for_each_M1T_entry(cs, layouts, row, [&](int t, double v) { acc[cs.class_of[t]] += v; });
    m1_cols_.push_back(merged(acc));
  }
}

VisibilityResult InflationSolver::visibility(const Behavior& p) {
  const std::vector<double> obs = observed_vector(cs_, p);
  return opts_.route == SolveRoute::Reduced ? solve_reduced(obs) : solve_direct(obs);
}

bool InflationSolver::feasible(const Behavior& p) { return visibility(p).tau <= 1.0 + opts_.feasibility_tol; }

VisibilityResult InflationSolver::solve_reduced(const std::vector<double>& obs) {
  const int nw = static_cast<int>(w_cols_.size());
  const int ne = static_cast<int>(m1_cols_.size());
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.objective.assign(nw + ne, 0.0);
  for (int i = 0; i < ne; ++i) lp.objective[nw + i] = obs[i];
  lp.rows.assign(cs_.n_classes, Constraint{{}, Relation::Equal, 0.0});
  lp.rows[cs_.empty_class].rhs = 1.0;
  for (int j = 0; j < nw; ++j)
    for (const Coefficient& e : w_cols_[j]) lp.rows[e.index].coeffs.push_back({j, e.value});
  for (int i = 0; i < ne; ++i)
    for (const Coefficient& e : m1_cols_[i]) lp.rows[e.index].coeffs.push_back({nw + i, e.value});

  SolverOptions so = opts_.lp;
  if (!warm_tau_.empty()) so.warm_basis = &warm_tau_;
  const LPSolution sol = solve_lp(lp, so);
  if (sol.status != LPStatus::Optimal)
    throw LpError(std::string("reduced inflation LP ended ") + to_string(sol.status));
  warm_tau_ = sol.basis;

  const auto layouts = layouts_of(cs_);
  VisibilityResult res;
  res.tau = sol.objective;
  res.visibility = 1.0 / res.tau;
  res.iterations = sol.iterations;

  // Primal table from the class values.
  res.x.assign(cs_.n_columns, 0.0);
  for (int col = 0; col < cs_.n_columns; ++col)
    for_each_T_entry(cs_, layouts, col, [&](int t, double v) { res.x[col] += v * sol.dual[cs_.class_of[t]]; });

  std::vector<double> y1(sol.primal.begin() + nw, sol.primal.end());
  for (double& v : y1) v = std::max(v, 0.0);
  std::vector<double> w(cs_.n_columns, 0.0);
  for (int j = 0; j < nw; ++j) w[w_event_[j]] = std::max(sol.primal[j], 0.0);

  // Residual per correlator coordinate; ties absorb it class by class.
  std::vector<double> r(cs_.n_correlators, 0.0);
  r[0] += 1.0;
  for (int col = 0; col < cs_.n_columns; ++col)
    if (w[col] != 0) for_each_T_entry(cs_, layouts, col, [&](int t, double v) { r[t] -= w[col] * v; });
  for (int i = 0; i < ne; ++i)
    if (y1[i] != 0) for_each_M1T_entry(cs_, layouts, i, [&](int t, double v) { r[t] -= y1[i] * v; });

  const int n_ns = static_cast<int>(cs_.ns_rows.size());
  std::vector<double> y2(cs_.M2.rows(), 0.0);
  for (std::size_t k = 0; k < cs_.ties.size(); ++k) y2[n_ns + k] = r[cs_.ties[k].first];

  Eigen::VectorXd g = to_eigen(cs_.c) - cs_.M1.transpose() * to_eigen(y1) - cs_.M2.transpose() * to_eigen(y2) -
                      to_eigen(w);
  const std::vector<double> y_ns = peel_nonsignalling(cs_, layouts, g);
  std::copy(y_ns.begin(), y_ns.end(), y2.begin());
  res.certificate = split_certificate(y1, y2, obs);
  return res;
}

VisibilityResult InflationSolver::solve_direct(const std::vector<double>& obs) {
  const LinearProgram lp = [&] {
    LinearProgram lp;
    lp.objective = cs_.c;
    for (int i = 0; i < cs_.M1.rows(); ++i) {
      Constraint c{{}, Relation::GreaterEqual, obs[i]};
      for (SparseMatrix::InnerIterator it(cs_.M1, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
      lp.rows.push_back(std::move(c));
    }
    for (int i = 0; i < cs_.M2.rows(); ++i) {
      Constraint c{{}, Relation::Equal, 0.0};
      for (SparseMatrix::InnerIterator it(cs_.M2, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
      lp.rows.push_back(std::move(c));
    }
    return lp;
  }();
  if (lp.rows.size() > 3000) throw SizeCapExceeded("direct route is limited to 3000 rows; use the reduced route");
  SolverOptions so = opts_.lp;
  if (!warm_tau_.empty()) so.warm_basis = &warm_tau_;
  const LPSolution sol = solve_lp(lp, so);
  if (sol.status != LPStatus::Optimal)
    throw LpError(std::string("inflation LP ended ") + to_string(sol.status));
  warm_tau_ = sol.basis;
  VisibilityResult res;
  res.tau = sol.objective;
  res.visibility = 1.0 / res.tau;
  res.iterations = sol.iterations;
  res.x = sol.primal;
  const std::size_t n1 = cs_.M1.rows();
  std::vector<double> y1(sol.dual.begin(), sol.dual.begin() + n1);
  for (double& v : y1) v = std::max(v, 0.0);
  std::vector<double> y2(sol.dual.begin() + n1, sol.dual.end());
  res.certificate = split_certificate(y1, y2, obs);
  return res;
}

double InflationSolver::gmf_lower_bound(const Behavior& p) {
  const std::vector<double> obs = observed_vector(cs_, p);
  LPSolution sol;
  if (opts_.route == SolveRoute::Reduced) {
    const int nw = static_cast<int>(w_cols_.size());
    const int ne = static_cast<int>(m1_cols_.size());
    LinearProgram lp;
    lp.sense = Sense::Minimize;
    lp.objective.assign(nw + ne, 0.0);
    for (int i = 0; i < ne; ++i) lp.objective[nw + i] = obs[i];
    lp.rows.assign(cs_.n_classes, Constraint{{}, Relation::Equal, 0.0});
    lp.rows[cs_.empty_class].rhs = 1.0;
    for (int j = 0; j < nw; ++j)
      for (const Coefficient& e : w_cols_[j]) lp.rows[e.index].coeffs.push_back({j, -e.value});
    for (int i = 0; i < ne; ++i)
      for (const Coefficient& e : m1_cols_[i]) lp.rows[e.index].coeffs.push_back({nw + i, e.value});
    SolverOptions so = opts_.lp;
    if (!warm_gmf_.empty()) so.warm_basis = &warm_gmf_;
    sol = solve_lp(lp, so);
    if (sol.status == LPStatus::Optimal) warm_gmf_ = sol.basis;
  } else {
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    lp.objective = cs_.c;
    for (int i = 0; i < cs_.M1.rows(); ++i) {
      Constraint c{{}, Relation::LessEqual, obs[i]};
      for (SparseMatrix::InnerIterator it(cs_.M1, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
      lp.rows.push_back(std::move(c));
    }
    for (int i = 0; i < cs_.M2.rows(); ++i) {
      Constraint c{{}, Relation::Equal, 0.0};
      for (SparseMatrix::InnerIterator it(cs_.M2, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
      lp.rows.push_back(std::move(c));
    }
    if (lp.rows.size() > 3000) throw SizeCapExceeded("direct route is limited to 3000 rows; use the reduced route");
    sol = solve_lp(lp, opts_.lp);
  }
  if (sol.status != LPStatus::Optimal) throw LpError(std::string("GMF LP ended ") + to_string(sol.status));
  return std::clamp(1.0 - sol.objective, 0.0, 1.0);
}

bool lp_sat_feasible(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts) {
  return InflationSolver(cs, opts).feasible(p);
}

double visibility_general(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts) {
  return InflationSolver(cs, opts).visibility(p).visibility;
}

DualCertificate dual_certificate(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts) {
  return InflationSolver(cs, opts).visibility(p).certificate;
}

double gmf_lower_bound(const InflationConstraintSystem& cs, const Behavior& p, const InflationOptions& opts) {
  return InflationSolver(cs, opts).gmf_lower_bound(p);
}

CertificateReport verify_certificate(const SparseMatrix& M1, const SparseMatrix& M2, const std::vector<double>& c,
                                     const DualCertificate& cert, const std::vector<double>& observed) {
  CertificateReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    if (rep.failures.size() < 20) rep.failures.push_back(std::move(msg));
  };
  if (static_cast<Eigen::Index>(cert.y1.size()) != M1.rows() ||
      static_cast<Eigen::Index>(cert.y2.size()) != 2 * M2.rows() ||
      static_cast<Eigen::Index>(c.size()) != M1.cols() || observed.size() != cert.y1.size()) {
    fail("certificate dimensions do not match the constraint system");
    return rep;
  }
  for (std::size_t i = 0; i < cert.y1.size(); ++i)
    if (cert.y1[i] < -1e-10) fail("y1[" + std::to_string(i) + "] = " + std::to_string(cert.y1[i]) + " is negative");
  for (std::size_t i = 0; i < cert.y2.size(); ++i)
    if (cert.y2[i] < -1e-10) fail("y2[" + std::to_string(i) + "] = " + std::to_string(cert.y2[i]) + " is negative");

  const Eigen::Index r = M2.rows();
  Eigen::VectorXd y2 = Eigen::Map<const Eigen::VectorXd>(cert.y2.data(), r) -
                       Eigen::Map<const Eigen::VectorXd>(cert.y2.data() + r, r);
  const Eigen::VectorXd lhs = M1.transpose() * to_eigen(cert.y1) + M2.transpose() * y2;
  for (Eigen::Index j = 0; j < lhs.size(); ++j) {
    const double excess = lhs(j) - c[j];
    rep.max_violation = std::max(rep.max_violation, excess);
    if (excess > 1e-8)
      fail("column " + std::to_string(j) + ": M1'y1 + M2'y2 exceeds c by " + std::to_string(excess));
  }
  for (std::size_t i = 0; i < cert.y1.size(); ++i) rep.value += cert.y1[i] * observed[i];
  return rep;
}

CertificateReport verify_certificate(const InflationConstraintSystem& cs, const DualCertificate& cert,
                                     const Behavior& p) {
  return verify_certificate(cs.M1, cs.M2, cs.c, cert, observed_vector(cs, p));
}

ProbabilityFormWitness certificate_witness(const InflationConstraintSystem& cs, const DualCertificate& cert) {
  if (cert.y1.size() != cs.events.size()) throw SignatureMismatch("certificate does not match the system");
  ProbabilityFormWitness pf;
  pf.name = "inflation certificate";
  pf.inputs_per_party = cs.scenario.inputs;
  pf.bound = 1.0;
  for (std::size_t i = 0; i < cert.y1.size(); ++i) {
    if (cert.y1[i] <= 0) continue;
    const ObservedEvent& ev = cs.events[i];
    pf.events.push_back({ev.roles, ev.settings, ev.outcomes, cert.y1[i]});
  }
  return pf;
}

std::vector<double> permute_solution(const InflationConstraintSystem& cs, int graph, const std::vector<int>& perm,
                                     const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != cs.n_columns) throw SignatureMismatch("table size mismatch");
  const GraphLayout L(cs.graphs.at(graph), cs.scenario);
  if (static_cast<int>(perm.size()) != L.K) throw SignatureMismatch("permutation size mismatch");
  std::vector<double> out = x;
  const int off = cs.graph_offset[graph];
  for (long sidx = 0; sidx < L.n_settings; ++sidx) {
    const std::vector<int> xs = L.decode_setting(sidx);
    std::vector<int> ys(L.K);
    for (int j = 0; j < L.K; ++j) ys[perm[j]] = xs[j];
    const long s2 = L.encode_setting(ys);
    for (long o = 0; o < L.n_outcomes; ++o) {
      long o2 = 0;
      for (int j = 0; j < L.K; ++j)
        if ((o >> (L.K - 1 - j)) & 1) o2 |= 1L << (L.K - 1 - perm[j]);
      out[off + s2 * L.n_outcomes + o2] = x[off + sidx * L.n_outcomes + o];
    }
  }
  return out;
}

LinearProgram visibility_program(const InflationConstraintSystem& cs, const Behavior& p) {
  const std::vector<double> obs = observed_vector(cs, p);
  LinearProgram lp;
  lp.objective = cs.c;
  for (int i = 0; i < cs.M1.rows(); ++i) {
    Constraint c{{}, Relation::GreaterEqual, obs[i]};
    for (SparseMatrix::InnerIterator it(cs.M1, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
    lp.rows.push_back(std::move(c));
  }
  for (int i = 0; i < cs.M2.rows(); ++i) {
    Constraint c{{}, Relation::Equal, 0.0};
    for (SparseMatrix::InnerIterator it(cs.M2, i); it; ++it) c.coeffs.push_back({static_cast<int>(it.col()), it.value()});
    lp.rows.push_back(std::move(c));
  }
  return lp;
}

}  // namespace ghzw
