#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "ghzw/errors.hpp"
#include "ghzw/inflation.hpp"

namespace ghzw {

Scenario Scenario::make(std::vector<int> inputs) {
  Scenario s;
  s.n_parties = static_cast<int>(inputs.size());
  s.inputs = std::move(inputs);
  if (s.n_parties < 2) throw InvalidArity("scenario needs at least 2 parties");
  // (N-1)-subsets in lexicographic order: drop the parties from last to first.
  for (int missing = s.n_parties - 1; missing >= 0; --missing) {
    std::vector<int> scope;
    for (int p = 0; p < s.n_parties; ++p)
      if (p != missing) scope.push_back(p);
    s.source_scopes.push_back(std::move(scope));
  }
  s.validate();
  return s;
}

void Scenario::validate() const {
  if (n_parties < 2 || static_cast<int>(inputs.size()) != n_parties)
    throw InvalidArity("scenario party count and inputs disagree");
  if (outputs != 2) throw InvalidArity("only dichotomic outputs are supported");
  for (int m : inputs)
    if (m < 1) throw InvalidArity("every party needs at least one input");
  for (const auto& scope : source_scopes) {
    if (static_cast<int>(scope.size()) != n_parties - 1) throw InvalidArity("sources must have arity N-1");
    for (int p : scope)
      if (p < 0 || p >= n_parties) throw InvalidArity("source scope references an unknown party");
  }
}

InflationGraph ring_inflation(const Scenario& s, int order) {
  s.validate();
  if (order < 2) throw InvalidArity("inflation order must be at least 2, got " + std::to_string(order));
  InflationGraph g;
  for (int role = 0; role < s.n_parties; ++role)
    for (int c = 0; c < order; ++c) g.party_copies.push_back({role, c});
  for (int r = 0; r < static_cast<int>(s.source_scopes.size()); ++r) {
    const std::vector<int>& scope = s.source_scopes[r];
    auto offset = [&](int p) {
      int off = 0;
      for (int q = 0; q < p; ++q)
        if (std::find(scope.begin(), scope.end(), q) == scope.end()) ++off;
      return off;
    };
    for (int i = 0; i < order; ++i) {
      const int src = static_cast<int>(g.source_copies.size());
      g.source_copies.push_back({r, i, scope});
      for (int p : scope) {
        const int copy = ((i + offset(p) - offset(scope.front())) % order + order) % order;
        g.edges.push_back({src, p * order + copy});
      }
    }
  }
  return g;
}

NonfanoutReport validate_nonfanout(const InflationGraph& g) {
  NonfanoutReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.diagnostics.push_back(std::move(msg));
  };
  const int np = static_cast<int>(g.party_copies.size());
  const int ns = static_cast<int>(g.source_copies.size());
  auto src_name = [&](int s) {
    return "source copy " + std::to_string(s) + " (role " + std::to_string(g.source_copies[s].role) + ", copy " +
           std::to_string(g.source_copies[s].copy) + ")";
  };
  auto party_name = [&](int p) {
    return "party copy " + std::to_string(p) + " (role " + std::to_string(g.party_copies[p].role) + ", copy " +
           std::to_string(g.party_copies[p].copy) + ")";
  };

  std::vector<std::map<int, int>> fed(ns);          // source -> role -> party copy
  std::vector<std::map<int, int>> received(np);     // party -> source role -> count
  for (const auto& [s, p] : g.edges) {
    if (s < 0 || s >= ns || p < 0 || p >= np) {
      fail("edge (" + std::to_string(s) + ", " + std::to_string(p) + ") references a missing node");
      continue;
    }
    const int role = g.party_copies[p].role;
    const auto& scope = g.source_copies[s].scope;
    if (std::find(scope.begin(), scope.end(), role) == scope.end()) {
      fail(src_name(s) + " feeds " + party_name(p) + " outside its scope");
      continue;
    }
    auto [it, inserted] = fed[s].emplace(role, p);
    if (!inserted && it->second != p)
      fail(src_name(s) + " feeds two copies of role " + std::to_string(role) + ": " + party_name(it->second) +
           " and " + party_name(p));
    ++received[p][g.source_copies[s].role];
  }

  std::map<int, std::vector<int>> role_scope;
  for (const SourceCopy& sc : g.source_copies) role_scope.emplace(sc.role, sc.scope);
  for (int p = 0; p < np; ++p) {
    const int role = g.party_copies[p].role;
    for (const auto& [srole, scope] : role_scope) {
      if (std::find(scope.begin(), scope.end(), role) == scope.end()) continue;
      const int n = received[p].count(srole) ? received[p][srole] : 0;
      if (n != 1)
        fail(party_name(p) + " receives " + std::to_string(n) + " copies of source role " + std::to_string(srole));
    }
  }
  return rep;
}

namespace {

// feed[p][source role] = source copy index feeding party copy p, or -1.
std::vector<std::map<int, int>> feeding(const InflationGraph& g) {
  std::vector<std::map<int, int>> feed(g.party_copies.size());
  for (const auto& [s, p] : g.edges) feed[p][g.source_copies[s].role] = s;
  return feed;
}

}  // namespace

std::vector<std::vector<int>> automorphisms(const InflationGraph& g) {
  const int np = static_cast<int>(g.party_copies.size());
  std::map<int, std::vector<int>> by_role;
  for (int p = 0; p < np; ++p) by_role[g.party_copies[p].role].push_back(p);

  double combos = 1;
  for (auto& [role, members] : by_role)
    for (std::size_t k = 2; k <= members.size(); ++k) combos *= static_cast<double>(k);
  if (combos > 1e6) throw SizeCapExceeded("too many candidate copy permutations");

  std::vector<std::vector<int>> targets(g.source_copies.size());
  for (const auto& [s, p] : g.edges) targets[s].push_back(p);
  std::multiset<std::pair<int, std::vector<int>>> wiring;
  for (std::size_t s = 0; s < targets.size(); ++s) {
    std::sort(targets[s].begin(), targets[s].end());
    wiring.insert({g.source_copies[s].role, targets[s]});
  }

  std::vector<std::vector<int>> role_perm;  // current permutation of each role's members
  std::vector<std::vector<int>> members;
  for (auto& [role, m] : by_role) {
    members.push_back(m);
    role_perm.push_back(m);
  }

  std::vector<std::vector<int>> out;
  std::vector<int> perm(np);
  for (;;) {
    for (std::size_t r = 0; r < members.size(); ++r)
      for (std::size_t i = 0; i < members[r].size(); ++i) perm[members[r][i]] = role_perm[r][i];
    std::multiset<std::pair<int, std::vector<int>>> image;
    for (std::size_t s = 0; s < targets.size(); ++s) {
      std::vector<int> t;
      for (int p : targets[s]) t.push_back(perm[p]);
      std::sort(t.begin(), t.end());
      image.insert({g.source_copies[s].role, std::move(t)});
    }
    if (image == wiring) out.push_back(perm);

    std::size_t r = 0;
    for (; r < role_perm.size(); ++r) {
      if (std::next_permutation(role_perm[r].begin(), role_perm[r].end())) break;
    }
    if (r == role_perm.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<int>> injectable_sets(const InflationGraph& g) {
  const int np = static_cast<int>(g.party_copies.size());
  const auto feed = feeding(g);
  std::map<int, std::vector<int>> by_role;
  for (int p = 0; p < np; ++p) by_role[g.party_copies[p].role].push_back(p);
  std::vector<std::vector<int>> choices;
  for (auto& [role, m] : by_role) choices.push_back(m);

  auto compatible = [&](int u, int v) {
    for (const auto& [srole, s] : feed[u]) {
      auto it = feed[v].find(srole);
      if (it != feed[v].end() && it->second != s) return false;
    }
    return true;
  };

  std::vector<std::vector<int>> out;
  std::vector<int> current;
  // Depth-first over roles; each role contributes one copy or none.
  auto rec = [&](auto&& self, std::size_t r) -> void {
    if (r == choices.size()) {
      if (!current.empty()) out.push_back(current);
      return;
    }
    self(self, r + 1);
    for (int p : choices[r]) {
      bool ok = true;
      for (int q : current) ok = ok && compatible(p, q);
      if (!ok) continue;
      current.push_back(p);
      self(self, r + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace ghzw
