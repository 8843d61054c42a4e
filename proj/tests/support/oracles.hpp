#pragma once

// Reference checks shared by the unit and acceptance tests. Nothing here
// calls into the solver; everything is recomputed from the raw data.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ghzw/behavior.hpp"
#include "ghzw/lp.hpp"

namespace ghzw::testing {

struct LpCheck {
  bool primal_ok = true;
  bool dual_ok = true;
  double gap = 0;
};

// Optimality check from scratch: primal feasibility, dual sign and
// reduced-cost feasibility, and the primal-dual objective gap.
inline LpCheck check_solution(const LinearProgram& lp, const LPSolution& sol) {
  LpCheck ck;
  const int n = lp.n_vars();
  const bool mx = lp.sense == Sense::Maximize;
  double primal = 0;
  for (int j = 0; j < n; ++j) {
    primal += lp.objective[j] * sol.primal[j];
    if (sol.primal[j] < lp.lower_bound(j) - 1e-8 || sol.primal[j] > lp.upper_bound(j) + 1e-8) ck.primal_ok = false;
  }
  std::vector<double> d = lp.objective;
  double dual = 0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const Constraint& r = lp.rows[i];
    double lhs = 0;
    for (const Coefficient& a : r.coeffs) {
      lhs += a.value * sol.primal[a.index];
      d[a.index] -= sol.dual[i] * a.value;
    }
    const double y = sol.dual[i];
    switch (r.relation) {
      case Relation::LessEqual:
        if (lhs > r.rhs + 1e-8) ck.primal_ok = false;
        if (mx ? y < -1e-8 : y > 1e-8) ck.dual_ok = false;
        break;
      case Relation::GreaterEqual:
        if (lhs < r.rhs - 1e-8) ck.primal_ok = false;
        if (mx ? y > 1e-8 : y < -1e-8) ck.dual_ok = false;
        break;
      case Relation::Equal:
        if (std::abs(lhs - r.rhs) > 1e-8) ck.primal_ok = false;
        break;
    }
    dual += y * r.rhs;
  }
  for (int j = 0; j < n; ++j) {
    // For a minimization a positive reduced cost pushes x_j to its lower bound.
    const double dj = mx ? -d[j] : d[j];
    if (std::abs(dj) <= 1e-9) continue;
    const double toward = dj > 0 ? lp.lower_bound(j) : lp.upper_bound(j);
    if (std::isinf(toward)) {
      ck.dual_ok = false;
      continue;
    }
    dual += d[j] * toward;
  }
  ck.gap = std::abs(primal - dual);
  return ck;
}

// Feasible by construction (rows are built around a random point x0) and
// bounded by explicit box rows on unbounded variables.
inline LinearProgram random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(1, 12), kind(0, 9), rel(0, 2);
  std::uniform_real_distribution<double> u(-1, 1), pos(0, 1);
  LinearProgram lp;
  lp.sense = rng() & 1 ? Sense::Maximize : Sense::Minimize;
  const int n = nd(rng), m = nd(rng);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kInf);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    lp.objective.push_back(std::round(u(rng) * 8) / 4);
    const int k = kind(rng);
    if (k < 6) {
      x0[j] = 3 * pos(rng);
    } else if (k < 8) {
      lp.lower[j] = -2 * pos(rng);
      lp.upper[j] = 2 * pos(rng);
      x0[j] = lp.lower[j] + (lp.upper[j] - lp.lower[j]) * pos(rng);
    } else if (k < 9) {
      lp.lower[j] = -kInf;
      lp.upper[j] = 1 + pos(rng);
      x0[j] = lp.upper[j] - 2 * pos(rng);
    } else {
      lp.lower[j] = -kInf;
      x0[j] = 2 * u(rng);
    }
  }
  for (int i = 0; i < m; ++i) {
    Constraint c;
    double lhs = 0;
    for (int j = 0; j < n; ++j) {
      if (pos(rng) < 0.4) continue;
      // Coarse coefficients make degenerate vertices common.
      const double a = std::round(u(rng) * 4) / 2;
      if (a == 0) continue;
      c.coeffs.push_back({j, a});
      lhs += a * x0[j];
    }
    const int r = rel(rng);
    c.relation = r == 0 ? Relation::LessEqual : r == 1 ? Relation::GreaterEqual : Relation::Equal;
    const double slack = pos(rng) < 0.3 ? 0.0 : pos(rng);
    c.rhs = r == 0 ? lhs + slack : r == 1 ? lhs - slack : lhs;
    lp.rows.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isinf(lp.upper[j])) lp.rows.push_back({{{j, 1.0}}, Relation::LessEqual, 10.0});
    if (std::isinf(lp.lower[j])) lp.rows.push_back({{{j, 1.0}}, Relation::GreaterEqual, -10.0});
  }
  return lp;
}

// a xor b = ((x ^ bit0) & (y ^ bit1)) ^ bit2.
inline Behavior pr_box(int variant = 0) {
  std::vector<double> t(16, 0.0);
  const int ax = variant & 1, by = (variant >> 1) & 1, flip = (variant >> 2) & 1;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (((x ^ ax) & (y ^ by)) ^ flip)) t[(x * 2 + y) * 4 + a * 2 + b] = 0.5;
  return Behavior({2, 2}, t);
}

// One of the eight CHSH expressions: bits 0-1 pick the negated term, bit 2
// the overall sign.
inline double chsh_variant(const Behavior& b, int v) {
  auto e = [&](int x, int y) {
    double s = 0;
    for (int o = 0; o < 4; ++o) s += (((o >> 1) ^ o) & 1 ? -1.0 : 1.0) * b.prob(x * 2 + y, o);
    return s;
  };
  const int minus = v & 3;
  const double sign = v & 4 ? -1.0 : 1.0;
  double s = 0;
  for (int t = 0; t < 4; ++t) s += (t == minus ? -1.0 : 1.0) * e(t >> 1, t & 1);
  return sign * s;
}

// Largest v with v*target + (1-v)*noise local, for nonsignalling target and
// noise: locality is then equivalent to all eight CHSH expressions being at
// most 2, each linear in v, so the feasible set is an interval.
inline double chsh_mixing_visibility(const Behavior& target, const Behavior& noise) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 8; ++i) {
    const double ft = chsh_variant(target, i), fn = chsh_variant(noise, i);
    if (ft > fn) hi = std::min(hi, (2 - fn) / (ft - fn));
    else if (ft < fn) lo = std::max(lo, (fn - 2) / (fn - ft));
    else if (fn > 2 + 1e-12) return 0.0;
  }
  return lo <= hi ? hi : 0.0;
}

// Brute force over noise drawn from pairwise mixtures (grid of `steps`) of the
// 24 nonsignalling vertices and the uniform behavior.
inline double chsh_mixing_oracle(const Behavior& target, const std::vector<Behavior>& local_vertices,
                                 int steps = 20) {
  std::vector<Behavior> noise = local_vertices;
  for (int v = 0; v < 8; ++v) noise.push_back(pr_box(v));
  noise.push_back(Behavior::uniform({2, 2}));
  double best = 0;
  for (std::size_t i = 0; i < noise.size(); ++i)
    for (std::size_t j = i; j < noise.size(); ++j)
      for (int g = 0; g <= steps; ++g)
        best = std::max(best, chsh_mixing_visibility(target, mixture(noise[i], noise[j], g / double(steps))));
  return best;
}

}  // namespace ghzw::testing
