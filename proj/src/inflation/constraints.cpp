#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "ghzw/errors.hpp"
#include "ghzw/inflation.hpp"
#include "layout.hpp"

namespace ghzw {

namespace detail {

GraphLayout::GraphLayout(const InflationGraph& g, const Scenario& s) {
  K = static_cast<int>(g.party_copies.size());
  if (K > 16) throw SizeCapExceeded("inflation graphs are limited to 16 party copies");
  for (const PartyCopy& pc : g.party_copies) {
    roles.push_back(pc.role);
    m.push_back(s.inputs[pc.role]);
  }
  n_settings = 1;
  n_z = 1;
  for (int mj : m) {
    n_settings *= mj;
    n_z *= mj + 1;
  }
  n_outcomes = 1L << K;
}

std::vector<int> GraphLayout::decode_setting(long s) const {
  std::vector<int> x(K);
  for (int j = K; j-- > 0;) {
    x[j] = static_cast<int>(s % m[j]);
    s /= m[j];
  }
  return x;
}

long GraphLayout::encode_setting(const std::vector<int>& x) const {
  long s = 0;
  for (int j = 0; j < K; ++j) s = s * m[j] + x[j];
  return s;
}

std::vector<int> GraphLayout::decode_z(long t) const {
  std::vector<int> v(K);
  for (int j = K; j-- > 0;) {
    v[j] = static_cast<int>(t % (m[j] + 1));
    t /= m[j] + 1;
  }
  return v;
}

long GraphLayout::encode_z(const std::vector<int>& v) const {
  long t = 0;
  for (int j = 0; j < K; ++j) t = t * (m[j] + 1) + v[j];
  return t;
}

}  // namespace detail

namespace {

using detail::GraphLayout;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void check_graph(const InflationGraph& g, const Scenario& s, std::size_t index) {
  const std::string which = "inflation graph " + std::to_string(index) + ": ";
  const NonfanoutReport rep = validate_nonfanout(g);
  if (!rep.ok) throw StructuralError(which + rep.diagnostics.front());
  for (const PartyCopy& pc : g.party_copies)
    if (pc.role < 0 || pc.role >= s.n_parties) throw StructuralError(which + "party role out of range");
  for (const SourceCopy& sc : g.source_copies) {
    if (sc.role < 0 || sc.role >= static_cast<int>(s.source_scopes.size()))
      throw StructuralError(which + "source role out of range");
    if (sc.scope != s.source_scopes[sc.role])
      throw StructuralError(which + "source copy scope differs from the scenario's source " +
                            std::to_string(sc.role));
  }
}

// Signature of a correlator coordinate whose support has distinct roles:
// the (role, setting) list in role order plus, for every pair and every
// source role they both connect to, whether they share the source copy.
// Returns an empty vector when roles repeat.
std::vector<int> signature(const GraphLayout& L, const std::vector<int>& t,
                           const std::vector<std::map<int, int>>& feed, const Scenario& s) {
  std::vector<int> support;
  for (int j = 0; j < L.K; ++j)
    if (t[j] > 0) support.push_back(j);
  std::sort(support.begin(), support.end(), [&](int a, int b) { return L.roles[a] < L.roles[b]; });
  for (std::size_t i = 1; i < support.size(); ++i)
    if (L.roles[support[i]] == L.roles[support[i - 1]]) return {};
  std::vector<int> key{static_cast<int>(support.size())};
  for (int j : support) {
    key.push_back(L.roles[j]);
    key.push_back(t[j]);
  }
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      const int ra = L.roles[support[a]], rb = L.roles[support[b]];
      for (int r = 0; r < static_cast<int>(s.source_scopes.size()); ++r) {
        const auto& scope = s.source_scopes[r];
        if (std::find(scope.begin(), scope.end(), ra) == scope.end()) continue;
        if (std::find(scope.begin(), scope.end(), rb) == scope.end()) continue;
        auto ia = feed[support[a]].find(r), ib = feed[support[b]].find(r);
        key.push_back(ia != feed[support[a]].end() && ib != feed[support[b]].end() && ia->second == ib->second);
      }
    }
  return key;
}

}  // namespace

InflationConstraintSystem build_constraint_system(const std::vector<InflationGraph>& graphs, const Scenario& s,
                                                  const BuildOptions& opts) {
  s.validate();
  if (graphs.empty()) throw StructuralError("no inflation graph given");
  InflationConstraintSystem cs;
  cs.scenario = s;
  cs.graphs = graphs;

  std::vector<GraphLayout> layouts;
  double total_cols = 0, total_z = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    check_graph(graphs[gi], s, gi);
    layouts.emplace_back(graphs[gi], s);
    total_cols += static_cast<double>(layouts.back().n_settings) * layouts.back().n_outcomes;
    total_z += static_cast<double>(layouts.back().n_z);
  }
  if (total_cols > 2e7) throw SizeCapExceeded("inflation table has more than 2e7 entries");

  int col = 0, zo = 0;
  for (const GraphLayout& L : layouts) {
    cs.graph_offset.push_back(col);
    cs.graph_z_offset.push_back(zo);
    cs.copy_inputs.push_back(L.m);
    col += static_cast<int>(L.n_settings * L.n_outcomes);
    zo += static_cast<int>(L.n_z);
  }
  cs.n_columns = col;
  cs.n_correlators = zo;

  // Nonzero budget, checked before anything large is allocated.
  double ns_nnz = 0, tie_row_nnz = 0;
  for (const GraphLayout& L : layouts) {
    for (int j = 0; j < L.K; ++j)
      ns_nnz += 4.0 * (L.m[j] - 1) * (static_cast<double>(L.n_settings) / L.m[j]) * (L.n_outcomes / 2);
    tie_row_nnz = std::max(tie_row_nnz, 2.0 * L.n_outcomes);
  }
  if (ns_nnz > opts.max_nonzeros)
    throw SizeCapExceeded("nonsignalling rows alone need " + std::to_string(static_cast<long>(ns_nnz)) +
                          " nonzeros, cap is " + std::to_string(opts.max_nonzeros));

  // Correlator coordinates that must agree.
  UnionFind uf(zo);
  std::map<std::vector<int>, int> first_with_key;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const GraphLayout& L = layouts[gi];
    const int base = cs.graph_z_offset[gi];
    std::vector<std::map<int, int>> feed(L.K);
    for (const auto& [src, p] : graphs[gi].edges) feed[p][graphs[gi].source_copies[src].role] = src;

    const auto autos = automorphisms(graphs[gi]);
    for (long t = 0; t < L.n_z; ++t) {
      const std::vector<int> v = L.decode_z(t);
      for (const auto& perm : autos) {
        std::vector<int> w(L.K);
        for (int j = 0; j < L.K; ++j) w[perm[j]] = v[j];
        uf.unite(base + static_cast<int>(t), base + static_cast<int>(L.encode_z(w)));
      }
      std::vector<int> key = signature(L, v, feed, s);
      if (key.empty()) continue;
      auto [it, inserted] = first_with_key.emplace(std::move(key), base + static_cast<int>(t));
      if (!inserted) uf.unite(it->second, base + static_cast<int>(t));
    }
  }
  cs.class_of.assign(zo, -1);
  std::vector<int> class_of_root(zo, -1);
  for (int t = 0; t < zo; ++t) {
    const int root = uf.find(t);
    if (class_of_root[root] < 0) {
      class_of_root[root] = static_cast<int>(cs.class_rep.size());
      cs.class_rep.push_back(t);
    }
    cs.class_of[t] = class_of_root[root];
    if (cs.class_rep[cs.class_of[t]] != t) cs.ties.push_back({t, cs.class_rep[cs.class_of[t]]});
  }
  cs.n_classes = static_cast<int>(cs.class_rep.size());
  cs.empty_class = cs.class_of[0];
  if (cs.n_classes > opts.max_classes)
    throw SizeCapExceeded(std::to_string(cs.n_classes) + " correlator classes exceed the cap of " +
                          std::to_string(opts.max_classes));
  const double tie_nnz = tie_row_nnz * static_cast<double>(cs.ties.size());
  if (ns_nnz + tie_nnz > opts.max_nonzeros)
    throw SizeCapExceeded("constraint system needs about " + std::to_string(static_cast<long>(ns_nnz + tie_nnz)) +
                          " nonzeros, cap is " + std::to_string(opts.max_nonzeros));

  // Observed events on the maximal injectable role sets.
  std::map<std::vector<int>, std::pair<int, std::vector<int>>> best;  // roles -> (graph, copies)
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (const auto& set : injectable_sets(graphs[gi])) {
      std::vector<int> roles, copies;
      for (int p : set) {
        roles.push_back(graphs[gi].party_copies[p].role);
        copies.push_back(graphs[gi].party_copies[p].copy);
      }
      auto it = best.find(roles);
      if (it == best.end()) {
        best.emplace(roles, std::make_pair(static_cast<int>(gi), set));
        continue;
      }
      if (it->second.first != static_cast<int>(gi)) continue;
      std::vector<int> old;
      for (int p : it->second.second) old.push_back(graphs[gi].party_copies[p].copy);
      if (copies < old) it->second.second = set;
    }
  }
  std::vector<std::vector<int>> maximal;
  for (const auto& [roles, where] : best) {
    bool contained = false;
    for (const auto& [other, w2] : best)
      if (other.size() > roles.size() && std::includes(other.begin(), other.end(), roles.begin(), roles.end()))
        contained = true;
    if (!contained) maximal.push_back(roles);
  }
  if (maximal.empty()) throw StructuralError("no injectable set found");

  std::vector<Eigen::Triplet<double>> m1;
  for (const auto& roles : maximal) {
    const auto& [gi, set] = best.at(roles);
    const GraphLayout& L = layouts[gi];
    const int width = static_cast<int>(roles.size());
    long n_x = 1;
    for (int r : roles) n_x *= s.inputs[r];
    for (long xr = 0; xr < n_x; ++xr) {
      std::vector<int> xs(width);
      long rem = xr;
      for (int i = width; i-- > 0;) {
        xs[i] = static_cast<int>(rem % s.inputs[roles[i]]);
        rem /= s.inputs[roles[i]];
      }
      std::vector<int> setting(L.K, 0);
      for (int i = 0; i < width; ++i) setting[set[i]] = xs[i];
      const long sidx = L.encode_setting(setting);
      for (long a = 0; a < (1L << width); ++a) {
        ObservedEvent ev;
        ev.roles = roles;
        ev.settings = xs;
        ev.graph = gi;
        ev.copies = set;
        for (int i = 0; i < width; ++i) ev.outcomes.push_back(((a >> (width - 1 - i)) & 1) ? -1 : 1);
        const int row = static_cast<int>(cs.events.size());
        for (long o = 0; o < L.n_outcomes; ++o) {
          bool match = true;
          for (int i = 0; i < width && match; ++i)
            match = (((o >> (L.K - 1 - set[i])) & 1) == ((a >> (width - 1 - i)) & 1));
          if (match) m1.emplace_back(row, cs.graph_offset[gi] + static_cast<int>(sidx * L.n_outcomes + o), 1.0);
        }
        cs.events.push_back(std::move(ev));
      }
    }
  }
  cs.M1.resize(static_cast<int>(cs.events.size()), cs.n_columns);
  cs.M1.setFromTriplets(m1.begin(), m1.end());

  cs.c.assign(cs.n_columns, 0.0);
  for (long o = 0; o < layouts[0].n_outcomes; ++o) cs.c[o] = 1.0;

  std::vector<Eigen::Triplet<double>> m2;
  int row = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const GraphLayout& L = layouts[gi];
    const int off = cs.graph_offset[gi];
    for (int j = 0; j < L.K; ++j) {
      const long bit = 1L << (L.K - 1 - j);
      for (long sidx = 0; sidx < L.n_settings; ++sidx) {
        std::vector<int> x = L.decode_setting(sidx);
        if (x[j] != 0) continue;
        for (int k = 1; k < L.m[j]; ++k) {
          x[j] = k;
          const long sk = L.encode_setting(x);
          for (long o = 0; o < L.n_outcomes; ++o) {
            if (o & bit) continue;
            m2.emplace_back(row, off + static_cast<int>(sidx * L.n_outcomes + o), 1.0);
            m2.emplace_back(row, off + static_cast<int>(sidx * L.n_outcomes + (o | bit)), 1.0);
            m2.emplace_back(row, off + static_cast<int>(sk * L.n_outcomes + o), -1.0);
            m2.emplace_back(row, off + static_cast<int>(sk * L.n_outcomes + (o | bit)), -1.0);
            cs.ns_rows.push_back({static_cast<int>(gi), j, static_cast<int>(sidx), k, static_cast<int>(o)});
            ++row;
          }
        }
      }
    }
  }

  auto graph_of_z = [&](int t) {
    int gi = static_cast<int>(graphs.size()) - 1;
    while (cs.graph_z_offset[gi] > t) --gi;
    return gi;
  };
  // Row reading the correlator coordinate t off the table.
  auto add_correlator = [&](int r, int t, double sign) {
    const int gi = graph_of_z(t);
    const GraphLayout& L = layouts[gi];
    const std::vector<int> v = L.decode_z(t - cs.graph_z_offset[gi]);
    std::vector<int> x(L.K);
    long mask = 0;
    for (int j = 0; j < L.K; ++j) {
      x[j] = v[j] > 0 ? v[j] - 1 : 0;
      if (v[j] > 0) mask |= 1L << (L.K - 1 - j);
    }
    const long sidx = L.encode_setting(x);
    for (long o = 0; o < L.n_outcomes; ++o) {
      const double val = (__builtin_popcountl(o & mask) & 1) ? -sign : sign;
      m2.emplace_back(r, cs.graph_offset[gi] + static_cast<int>(sidx * L.n_outcomes + o), val);
    }
  };
  for (const auto& [t, rep] : cs.ties) {
    add_correlator(row, t, 1.0);
    add_correlator(row, rep, -1.0);
    ++row;
  }
  cs.M2.resize(row, cs.n_columns);
  cs.M2.setFromTriplets(m2.begin(), m2.end());
  cs.M2.prune(0.0);
  return cs;
}

InflationConstraintSystem build_constraint_system(const InflationGraph& g, const Scenario& s,
                                                  const BuildOptions& opts) {
  return build_constraint_system(std::vector<InflationGraph>{g}, s, opts);
}

std::vector<double> observed_vector(const InflationConstraintSystem& cs, const Behavior& p) {
  if (p.inputs() != cs.scenario.inputs) throw SignatureMismatch("behavior does not match the inflation scenario");
  std::vector<double> out;
  out.reserve(cs.events.size());
  for (const ObservedEvent& ev : cs.events) {
    const std::vector<double> m = p.marginal(ev.roles, ev.settings);
    std::size_t k = 0;
    for (int a : ev.outcomes) k = (k << 1) | (a < 0 ? 1u : 0u);
    out.push_back(m[k]);
  }
  return out;
}

}  // namespace ghzw
