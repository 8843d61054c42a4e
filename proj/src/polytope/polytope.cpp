#include "ghzw/polytope.hpp"

#include <algorithm>
#include <string>

#include "ghzw/errors.hpp"

namespace ghzw {

std::vector<Behavior> local_deterministic_vertices(const std::vector<int>& inputs, int outputs) {
  if (outputs != 2) throw InvalidArity("only dichotomic outputs are supported");
  if (inputs.empty()) throw InvalidArity("need at least one party");
  double count = 1;
  for (int m : inputs) {
    if (m < 1 || m > 20) throw InvalidArity("inputs per party must lie in 1..20");
    count *= static_cast<double>(1u << m);
  }
  if (count > 1e6) throw SizeCapExceeded("more than 1e6 deterministic vertices");

  const std::size_t n = inputs.size();
  std::vector<Behavior> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<unsigned> f(n, 0);
  std::vector<std::vector<int>> outs(n);
  for (std::size_t p = 0; p < n; ++p) outs[p].resize(inputs[p]);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(count); ++idx) {
    std::size_t rem = idx;
    for (std::size_t p = n; p-- > 0;) {
      const std::size_t radix = std::size_t{1} << inputs[p];
      f[p] = static_cast<unsigned>(rem % radix);
      rem /= radix;
      for (int x = 0; x < inputs[p]; ++x) outs[p][x] = ((f[p] >> x) & 1u) ? -1 : 1;
    }
    out.push_back(Behavior::deterministic(inputs, outs));
  }
  return out;
}

namespace {

// Rows fixing every setting block to sum to one and every single-party
// marginal to be independent of that party's setting.
void add_nonsignalling_rows(LinearProgram& lp, const Behavior& shape, int offset) {
  const int n = shape.n_parties();
  const std::size_t no = shape.n_outcomes();
  for (std::size_t s = 0; s < shape.n_settings(); ++s) {
    Constraint c{{}, Relation::Equal, 1.0};
    for (std::size_t o = 0; o < no; ++o) c.coeffs.push_back({offset + static_cast<int>(s * no + o), 1.0});
    lp.rows.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << (n - 1 - j);
    for (std::size_t s = 0; s < shape.n_settings(); ++s) {
      std::vector<int> x = shape.setting_tuple(s);
      if (x[j] != 0) continue;
      for (int k = 1; k < shape.inputs()[j]; ++k) {
        x[j] = k;
        const std::size_t s2 = shape.setting_index(x);
        for (std::size_t o = 0; o < no; ++o) {
          if (o & bit) continue;
          Constraint c{{}, Relation::Equal, 0.0};
          c.coeffs = {{offset + static_cast<int>(s * no + o), 1.0},
                      {offset + static_cast<int>(s * no + (o | bit)), 1.0},
                      {offset + static_cast<int>(s2 * no + o), -1.0},
                      {offset + static_cast<int>(s2 * no + (o | bit)), -1.0}};
          lp.rows.push_back(std::move(c));
        }
      }
    }
  }
}

Behavior behavior_from_solution(const std::vector<int>& inputs, const std::vector<double>& x, std::size_t offset,
                                std::size_t size, std::size_t no) {
  std::vector<double> t(x.begin() + offset, x.begin() + offset + size);
  for (double& v : t) v = std::max(v, 0.0);
  for (std::size_t s = 0; s < size / no; ++s) {
    double sum = 0;
    for (std::size_t o = 0; o < no; ++o) sum += t[s * no + o];
    for (std::size_t o = 0; o < no; ++o) t[s * no + o] /= sum;
  }
  return Behavior(inputs, std::move(t));
}

}  // namespace

Extremum extremize_over_nonsignalling(const Witness& w, Sense sense, const SolverOptions& opts) {
  if (w.n_parties() > 4) throw InvalidArity("nonsignalling extremization is limited to 4 parties");
  const Behavior shape = Behavior::uniform(w.inputs_per_party);
  LinearProgram lp;
  lp.sense = sense;
  lp.objective = table_coefficients(w);
  add_nonsignalling_rows(lp, shape, 0);
  const LPSolution sol = solve_lp(lp, opts);
  if (sol.status != LPStatus::Optimal)
    throw LpError(std::string("nonsignalling LP ended ") + to_string(sol.status));
  return {sol.objective, behavior_from_solution(w.inputs_per_party, sol.primal, 0, lp.objective.size(),
                                                shape.n_outcomes())};
}

double polytope_visibility(const Behavior& target, const std::vector<Behavior>& vertices, const SolverOptions& opts) {
  if (vertices.empty()) throw InvalidArity("vertex list is empty");
  for (const Behavior& v : vertices)
    if (v.inputs() != target.inputs()) throw SignatureMismatch("vertex signature differs from the target");
  const std::size_t events = target.table().size();
  LinearProgram lp;
  lp.objective.assign(vertices.size(), 1.0);
  for (std::size_t e = 0; e < events; ++e) {
    Constraint c{{}, Relation::GreaterEqual, target.table()[e]};
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].table()[e] != 0) c.coeffs.push_back({static_cast<int>(i), vertices[i].table()[e]});
    lp.rows.push_back(std::move(c));
  }
  const LPSolution sol = solve_lp(lp, opts);
  if (sol.status == LPStatus::Infeasible) return 0.0;
  if (sol.status != LPStatus::Optimal) throw LpError("visibility LP is unbounded");
  return std::min(1.0, 1.0 / sol.objective);
}

double extremize_over_hull(const Witness& w, const std::vector<Behavior>& vertices, Sense sense,
                           const SolverOptions& opts) {
  if (vertices.empty()) throw InvalidArity("vertex list is empty");
  const std::vector<double> coeffs = table_coefficients(w);
  const int size = static_cast<int>(coeffs.size());
  const int nv = static_cast<int>(vertices.size());
  // Variables: the behavior table, then one convex weight per vertex.
  LinearProgram lp;
  lp.sense = sense;
  lp.objective = coeffs;
  lp.objective.resize(size + nv, 0.0);
  for (int e = 0; e < size; ++e) {
    Constraint c{{{e, 1.0}}, Relation::Equal, 0.0};
    for (int i = 0; i < nv; ++i) {
      if (vertices[i].inputs() != w.inputs_per_party) throw SignatureMismatch("vertex signature differs from witness");
      if (vertices[i].table()[e] != 0) c.coeffs.push_back({size + i, -vertices[i].table()[e]});
    }
    lp.rows.push_back(std::move(c));
  }
  Constraint norm{{}, Relation::Equal, 1.0};
  for (int i = 0; i < nv; ++i) norm.coeffs.push_back({size + i, 1.0});
  lp.rows.push_back(std::move(norm));
  const LPSolution sol = solve_lp(lp, opts);
  if (sol.status != LPStatus::Optimal) throw LpError(std::string("hull LP ended ") + to_string(sol.status));
  return sol.objective;
}

}  // namespace ghzw
