#pragma once

#include <vector>

#include "ghzw/behavior.hpp"
#include "ghzw/lp.hpp"
#include "ghzw/witness.hpp"

namespace ghzw {

/// Every deterministic behavior; at most 1e6 of them.
std::vector<Behavior> local_deterministic_vertices(const std::vector<int>& inputs, int outputs = 2);

struct Extremum {
  double value = 0.0;
  Behavior behavior;  // an optimal nonsignalling behavior
};

/// Optimum of a linear witness over the nonsignalling polytope (full behavior
/// table, normalization and nonsignalling equalities).
Extremum extremize_over_nonsignalling(const Witness& w, Sense sense, const SolverOptions& opts = {});

/// Largest v such that v * target + (1 - v) * noise lies in the convex hull of
/// the vertices for some normalized noise; 1 when the target is already inside.
double polytope_visibility(const Behavior& target, const std::vector<Behavior>& vertices,
                           const SolverOptions& opts = {});

/// max (or min) of the witness over the convex hull of the vertices, solved
/// as an LP over convex weights.
double extremize_over_hull(const Witness& w, const std::vector<Behavior>& vertices, Sense sense,
                           const SolverOptions& opts = {});

}  // namespace ghzw
