#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mfedge/degree_profile.hpp"
#include "mfedge/rng.hpp"

namespace mfedge {

// Undirected simple graph; immutable after construction, safe to share
// read-only across concurrent simulation replications.
struct Graph {
  int n_users = 0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor ids per user
  std::vector<int> degrees;                 // degrees[u] == adjacency[u].size()

  int degree(int u) const { return degrees[u]; }
  std::size_t edge_count() const {
    std::size_t stubs = 0;
    for (int d : degrees) stubs += static_cast<std::size_t>(d);
    return stubs / 2;
  }
};

namespace detail {

// Pair stubs uniformly at random, then delete self-loops and duplicate
// edges.  Degrees may undershoot their targets; they never overshoot.
inline Graph pair_stubs(const std::vector<int>& target_degrees, Rng& rng) {
  const int n = static_cast<int>(target_degrees.size());
  std::vector<int> stubs;
  for (int u = 0; u < n; ++u)
    for (int j = 0; j < target_degrees[u]; ++j) stubs.push_back(u);
  std::shuffle(stubs.begin(), stubs.end(), rng);

  std::vector<std::pair<int, int>> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    int u = stubs[i], v = stubs[i + 1];
    if (u == v) continue;  // self-loop: cut off
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());  // duplicates: cut off

  Graph g;
  g.n_users = n;
  g.adjacency.assign(n, {});
  for (auto [u, v] : edges) {
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  g.degrees.resize(n);
  for (int u = 0; u < n; ++u) {
    std::sort(g.adjacency[u].begin(), g.adjacency[u].end());
    g.degrees[u] = static_cast<int>(g.adjacency[u].size());
  }
  return g;
}

// If the stub total is odd, bump one uniformly chosen user by one degree.
inline void make_even(std::vector<int>& degrees, Rng& rng) {
  long long total = 0;
  for (int d : degrees) total += d;
  if (total % 2 != 0) degrees[index_draw(rng, degrees.size())] += 1;
}

}  // namespace detail

// Configuration-model graph: degrees sampled iid from the profile, stubs
// paired uniformly, self-loops and multi-edges pruned.
inline Graph build_configuration_graph(int n_users, const DegreeProfile& profile, Rng& rng) {
  if (n_users < 2) throw std::invalid_argument("build_configuration_graph: n_users must be >= 2");
  std::discrete_distribution<int> pick(profile.pmf().begin(), profile.pmf().end());
  std::vector<int> degrees(n_users);
  for (int u = 0; u < n_users; ++u) degrees[u] = profile.support()[pick(rng)];
  detail::make_even(degrees, rng);
  return detail::pair_stubs(degrees, rng);
}

inline Graph build_configuration_graph(int n_users, const DegreeProfile& profile,
                                       std::uint64_t seed) {
  Rng rng(seed);
  return build_configuration_graph(n_users, profile, rng);
}

// Poisson realized degree per user, mean = expected degree.
inline std::vector<int> sample_realized_degrees(const std::vector<int>& expected_degrees,
                                                Rng& rng) {
  std::vector<int> realized(expected_degrees.size());
  for (std::size_t u = 0; u < expected_degrees.size(); ++u) {
    if (expected_degrees[u] < 1)
      throw std::invalid_argument("sample_realized_degrees: expected degrees must be >= 1");
    realized[u] = poisson_draw(rng, expected_degrees[u]);
  }
  return realized;
}

inline std::vector<int> sample_realized_degrees(const std::vector<int>& expected_degrees,
                                                std::uint64_t seed) {
  Rng rng(seed);
  return sample_realized_degrees(expected_degrees, rng);
}

// Time-varying graph: expected degrees are fixed for the model's lifetime,
// the realized graph is rebuilt on every regeneration event.
struct DynamicGraphModel {
  std::vector<int> expected_degrees;
  double regeneration_rate = 1.0;
  Graph current;
};

inline Graph regenerate_dynamic_graph(DynamicGraphModel& model, Rng& rng) {
  std::vector<int> realized = sample_realized_degrees(model.expected_degrees, rng);
  detail::make_even(realized, rng);
  model.current = detail::pair_stubs(realized, rng);
  return model.current;
}

inline Graph regenerate_dynamic_graph(DynamicGraphModel& model, std::uint64_t seed) {
  Rng rng(seed);
  return regenerate_dynamic_graph(model, rng);
}

inline DynamicGraphModel make_dynamic_graph_model(int n_users, const DegreeProfile& profile,
                                                  double regeneration_rate, Rng& rng) {
  if (n_users < 2) throw std::invalid_argument("make_dynamic_graph_model: n_users must be >= 2");
  DynamicGraphModel model;
  model.regeneration_rate = regeneration_rate;
  std::discrete_distribution<int> pick(profile.pmf().begin(), profile.pmf().end());
  model.expected_degrees.resize(n_users);
  for (int u = 0; u < n_users; ++u) model.expected_degrees[u] = profile.support()[pick(rng)];
  regenerate_dynamic_graph(model, rng);
  return model;
}

// Row-normalized tally of neighbor degrees: for every ordered edge (u, v)
// the pair (deg u, deg v) is counted.  Empty map when the graph has no edges.
inline std::map<int, std::map<int, double>> empirical_conditional_degree_pmf(const Graph& g) {
  if (g.n_users == 0) throw std::invalid_argument("empirical_conditional_degree_pmf: empty graph");
  std::map<int, std::map<int, double>> table;
  std::map<int, double> row_totals;
  for (int u = 0; u < g.n_users; ++u)
    for (int v : g.adjacency[u]) {
      table[g.degrees[u]][g.degrees[v]] += 1.0;
      row_totals[g.degrees[u]] += 1.0;
    }
  for (auto& [k, row] : table)
    for (auto& [kp, count] : row) count /= row_totals[k];
  return table;
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (int u = 0; u < g.n_users; ++u)
    for (int v : g.adjacency[u])
      if (u < v) out << u << ' ' << v << '\n';
}

// Diagnostic: number of connected components (isolated users count as one each).
inline int component_count(const Graph& g) {
  std::vector<char> seen(g.n_users, 0);
  std::vector<int> stack;
  int components = 0;
  for (int start = 0; start < g.n_users; ++start) {
    if (seen[start]) continue;
    ++components;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : g.adjacency[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
  }
  return components;
}

}  // namespace mfedge
