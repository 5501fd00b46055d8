#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <thread>
#include <tuple>
#include <vector>

#include "hosc/error.hpp"
#include "hosc/sign_label.hpp"

namespace hosc {

struct Edge {
  std::size_t a = 0;  // node index, a < b
  std::size_t b = 0;
  unsigned weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted graph over occupied hyperoctants. Nodes are sorted ('+' < '-')
/// and unique; edges are stored once per unordered pair, sorted by (a, b).
struct ReducedGraph {
  std::vector<SignLabel> nodes;
  std::vector<Edge> edges;
  std::optional<unsigned> d0;

  std::size_t dim() const noexcept { return nodes.empty() ? 0 : nodes.front().dim(); }

  std::optional<std::size_t> index_of(const SignLabel& label) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), label);
    if (it == nodes.end() || *it != label) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  /// adjacency[i] = (weight, neighbor) sorted ascending; neighbor index order
  /// matches label order because nodes are sorted.
  std::vector<std::vector<std::pair<unsigned, std::size_t>>> adjacency() const {
    std::vector<std::vector<std::pair<unsigned, std::size_t>>> adj(nodes.size());
    for (const auto& e : edges) {
      adj[e.a].emplace_back(e.weight, e.b);
      adj[e.b].emplace_back(e.weight, e.a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
  }

  friend bool operator==(const ReducedGraph&, const ReducedGraph&) = default;
};

/// True iff z lies on some shortest path between a and b in the hypercube
/// graph, i.e. z agrees with a and b wherever they agree.
inline bool on_geodesic(const SignLabel& a, const SignLabel& b, const SignLabel& z) {
  detail::require_same_dim(a, b);
  detail::require_same_dim(a, z);
  auto wa = a.words();
  auto wb = b.words();
  auto wz = z.words();
  for (std::size_t w = 0; w < wa.size(); ++w)
    if ((~(wa[w] ^ wb[w]) & (wz[w] ^ wa[w])) != 0) return false;
  return true;
}

namespace detail {

inline bool connected(std::size_t n, std::span<const Edge> edges) {
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : edges) {
    const auto ra = find(e.a);
    const auto rb = find(e.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

/// Edges whose first endpoint is in [begin, end). A pair at distance >= 2 is
/// joined unless some other node is an interior point of one of its geodesics.
inline std::vector<Edge> reduced_edges_for_rows(std::span<const SignLabel> nodes, std::size_t begin, std::size_t end) {
  std::vector<Edge> out;
  const std::size_t words = nodes.empty() ? 0 : nodes.front().words().size();
  for (std::size_t i = begin; i < end; ++i) {
    auto wi = nodes[i].words();
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const unsigned w = levenshtein(nodes[i], nodes[j]);
      bool blocked = false;
      if (w >= 2) {
        auto wj = nodes[j].words();
        for (std::size_t z = 0; z < nodes.size() && !blocked; ++z) {
          if (z == i || z == j) continue;
          auto wz = nodes[z].words();
          bool on = true;
          for (std::size_t k = 0; k < words && on; ++k) on = (~(wi[k] ^ wj[k]) & (wz[k] ^ wi[k])) == 0;
          blocked = on;
        }
      }
      if (!blocked) out.push_back({i, j, w});
    }
  }
  return out;
}

}  // namespace detail

/// Builds the reduced graph over the given labels. The hypercube itself is
/// never materialized: each candidate pair is tested against every other
/// occupied label. O(n^3 D / 64) worst case; rows are split across `threads`.
inline ReducedGraph build_reduced_graph(std::span<const SignLabel> labels, unsigned threads = 1) {
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "no labels");
  const std::size_t d = labels.front().dim();
  for (const auto& l : labels)
    if (l.dim() != d) throw Error(ErrorKind::DimensionMismatch, "labels differ in length");

  ReducedGraph g;
  g.nodes.assign(labels.begin(), labels.end());
  std::sort(g.nodes.begin(), g.nodes.end());
  if (std::adjacent_find(g.nodes.begin(), g.nodes.end()) != g.nodes.end())
    throw Error(ErrorKind::DuplicateLabels, "labels must be unique");

  const std::size_t n = g.nodes.size();
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    g.edges = detail::reduced_edges_for_rows(g.nodes, 0, n);
  } else {
    // Row i costs about (n - i) pair tests; balance blocks by that.
    std::vector<std::size_t> bounds{0};
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n && bounds.size() < threads; ++i) {
      acc += static_cast<double>(n - i);
      if (acc >= total * static_cast<double>(bounds.size()) / threads) bounds.push_back(i + 1);
    }
    bounds.push_back(n);
    std::vector<std::vector<Edge>> parts(bounds.size() - 1);
    {
      std::vector<std::jthread> workers;
      for (std::size_t t = 0; t + 1 < bounds.size(); ++t)
        workers.emplace_back([&, t] { parts[t] = detail::reduced_edges_for_rows(g.nodes, bounds[t], bounds[t + 1]); });
    }
    for (auto& p : parts) g.edges.insert(g.edges.end(), p.begin(), p.end());
  }

  if (!detail::connected(n, g.edges))
    throw Error(ErrorKind::InvariantViolation, "reduced graph is not connected");
  return g;
}

/// Drops edges heavier than d0. Nodes are kept, so the result may be
/// disconnected.
inline ReducedGraph threshold_graph(const ReducedGraph& g, unsigned d0) {
  if (d0 == 0) throw Error(ErrorKind::InvalidParams, "d0 must be at least 1");
  ReducedGraph out;
  out.nodes = g.nodes;
  out.d0 = d0;
  for (const auto& e : g.edges)
    if (e.weight <= d0) out.edges.push_back(e);
  return out;
}

/// Smallest integer strictly greater than the mean edge weight. An edgeless
/// graph yields D when `permissive`, otherwise throws EmptyGraph.
inline unsigned default_d0(const ReducedGraph& g, bool permissive = false) {
  if (g.edges.empty()) {
    if (permissive) return static_cast<unsigned>(std::max<std::size_t>(1, g.dim()));
    throw Error(ErrorKind::EmptyGraph, "default d0 needs at least one edge");
  }
  std::uint64_t sum = 0;
  for (const auto& e : g.edges) sum += e.weight;
  // floor(sum / m) + 1 is the least integer > sum / m, computed exactly.
  return static_cast<unsigned>(sum / g.edges.size() + 1);
}

namespace detail {

inline std::size_t argmin_row_sum(std::span<const SignLabel> nodes, std::span<const std::size_t> members) {
  std::size_t best = members.front();
  std::uint64_t best_sum = UINT64_MAX;
  for (std::size_t a : members) {
    std::uint64_t s = 0;
    for (std::size_t b : members) s += levenshtein(nodes[a], nodes[b]);
    // members are ascending, so '<' keeps the smallest label on ties
    if (s < best_sum) {
      best_sum = s;
      best = a;
    }
  }
  return best;
}

}  // namespace detail

/// Node minimizing the summed Levenshtein distance to all nodes; ties go to
/// the smallest label.
inline SignLabel start_node(const ReducedGraph& g) {
  if (g.nodes.empty()) throw Error(ErrorKind::EmptyGraph, "graph has no nodes");
  std::vector<std::size_t> all(g.nodes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return g.nodes[detail::argmin_row_sum(g.nodes, all)];
}

/// Breadth-first enumeration of node indices plus, for each position, the
/// index of the connected component (0 = the start's component).
struct Walk {
  std::vector<std::size_t> order;
  std::vector<std::size_t> component;
};

/// BFS from `start`, expanding neighbors by ascending (weight, label). Nodes
/// not reachable from `start` are appended component by component: larger
/// components first, then by smallest label; each is walked from its own
/// start node.
inline Walk bfs_walk(const ReducedGraph& g, const SignLabel& start) {
  const auto start_index = g.index_of(start);
  if (!start_index) throw Error(ErrorKind::UnknownStart, "start label " + start.str() + " is not a node");

  const std::size_t n = g.nodes.size();
  const auto adj = g.adjacency();

  // Component discovery (labels ascending inside each component).
  std::vector<std::size_t> comp_of(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp_of[s] != SIZE_MAX) continue;
    comps.emplace_back();
    std::vector<std::size_t> stack{s};
    comp_of[s] = comps.size() - 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (const auto& [w, u] : adj[v])
        if (comp_of[u] == SIZE_MAX) {
          comp_of[u] = comps.size() - 1;
          stack.push_back(u);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }

  std::vector<std::size_t> rest;
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (c != comp_of[*start_index]) rest.push_back(c);
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t x, std::size_t y) {
    if (comps[x].size() != comps[y].size()) return comps[x].size() > comps[y].size();
    return comps[x].front() < comps[y].front();
  });

  Walk walk;
  walk.order.reserve(n);
  walk.component.reserve(n);
  std::vector<bool> seen(n, false);
  auto bfs = [&](std::size_t root, std::size_t tag) {
    std::queue<std::size_t> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      walk.order.push_back(v);
      walk.component.push_back(tag);
      for (const auto& [w, u] : adj[v])
        if (!seen[u]) {
          seen[u] = true;
          q.push(u);
        }
    }
  };

  bfs(*start_index, 0);
  for (std::size_t k = 0; k < rest.size(); ++k)
    bfs(detail::argmin_row_sum(g.nodes, comps[rest[k]]), k + 1);
  return walk;
}

inline std::vector<SignLabel> bfs_order(const ReducedGraph& g, const SignLabel& start) {
  const Walk walk = bfs_walk(g, start);
  std::vector<SignLabel> out;
  out.reserve(walk.order.size());
  for (auto i : walk.order) out.push_back(g.nodes[i]);
  return out;
}

/// Text export: "#node <label>" lines, then "<label> <label> <weight>" per edge.
inline void write_edge_list(std::ostream& os, const ReducedGraph& g) {
  os << "# format_version 1\n";
  if (g.d0) os << "# d0 " << *g.d0 << '\n';
  for (const auto& node : g.nodes) os << "#node " << node.str() << '\n';
  for (const auto& e : g.edges) os << g.nodes[e.a].str() << ' ' << g.nodes[e.b].str() << ' ' << e.weight << '\n';
}

}  // namespace hosc
