#pragma once

// Deterministic shortest paths, the all-pairs PathTable, and the additive
// spanner verifier.

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlspanner/graph.hpp"

namespace mlspanner {

inline constexpr Distance kUnreachable = std::numeric_limits<Distance>::max();
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

using VertexPair = std::pair<Vertex, Vertex>;

/// Shortest-path tree from one source. Among equal-distance relaxations the
/// predecessor with the smaller vertex id wins; with positive weights every
/// candidate predecessor is settled before its successor, so the result does
/// not depend on heap order.
struct ShortestPathTree {
  Vertex source = 0;
  std::vector<Distance> dist;
  std::vector<Vertex> pred;
  std::vector<EdgeId> pred_edge;
};

/// Dijkstra from `source`, optionally restricted to the edges in `allowed`.
inline ShortestPathTree dijkstra(const WeightedGraph& g, Vertex source, const EdgeSet* allowed = nullptr) {
  const std::size_t n = g.num_vertices();
  ShortestPathTree t{source, std::vector<Distance>(n, kUnreachable), std::vector<Vertex>(n, kNoVertex),
                     std::vector<EdgeId>(n, 0)};
  std::vector<char> settled(n, 0);
  using Item = std::pair<Distance, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[source] = 0;
  heap.push({0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    for (const auto& nb : g.neighbors(v)) {
      if (allowed && !allowed->contains(nb.id)) continue;
      const Distance nd = d + nb.w;
      if (nd < t.dist[nb.to]) {
        t.dist[nb.to] = nd;
        t.pred[nb.to] = v;
        t.pred_edge[nb.to] = nb.id;
        heap.push({nd, nb.to});
      } else if (nd == t.dist[nb.to] && !settled[nb.to] && v < t.pred[nb.to]) {
        t.pred[nb.to] = v;
        t.pred_edge[nb.to] = nb.id;
      }
    }
  }
  return t;
}

/// Distances only, reusing caller buffers. Used on hot paths (verification,
/// path buying) where trees are not needed.
class DistanceScratch {
 public:
  const std::vector<Distance>& run(const WeightedGraph& g, Vertex source, const EdgeSet* allowed) {
    const std::size_t n = g.num_vertices();
    dist_.assign(n, kUnreachable);
    dist_[source] = 0;
    heap_.clear();
    heap_.push_back({0, source});
    auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp);
      auto [d, v] = heap_.back();
      heap_.pop_back();
      if (d > dist_[v]) continue;
      for (const auto& nb : g.neighbors(v)) {
        if (allowed && !allowed->contains(nb.id)) continue;
        const Distance nd = d + nb.w;
        if (nd < dist_[nb.to]) {
          dist_[nb.to] = nd;
          heap_.push_back({nd, nb.to});
          std::push_heap(heap_.begin(), heap_.end(), cmp);
        }
      }
    }
    return dist_;
  }

 private:
  using Item = std::pair<Distance, Vertex>;
  std::vector<Distance> dist_;
  std::vector<Item> heap_;
};

/// All-pairs distances, canonical paths and per-pair max edge weight W(u,v).
///
/// The canonical path of an unordered pair {u,v} is the tree path computed
/// from source min(u,v); the path for (v,u) is its reverse.
class PathTable {
 public:
  PathTable() = default;

  explicit PathTable(const WeightedGraph& g) : n_(g.num_vertices()) {
    dist_.assign(n_ * n_, kUnreachable);
    pred_.assign(n_ * n_, kNoVertex);
    pred_edge_.assign(n_ * n_, 0);
    maxw_.assign(n_ * n_, 0);
    for (Vertex s = 0; s < n_; ++s) {
      auto tree = dijkstra(g, s);
      // Settle order by distance gives parents before children.
      std::vector<Vertex> order(n_);
      for (Vertex v = 0; v < n_; ++v) order[v] = v;
      std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return std::pair(tree.dist[a], a) < std::pair(tree.dist[b], b);
      });
      const std::size_t row = static_cast<std::size_t>(s) * n_;
      for (Vertex v : order) {
        dist_[row + v] = tree.dist[v];
        pred_[row + v] = tree.pred[v];
        pred_edge_[row + v] = tree.pred_edge[v];
        if (tree.pred[v] != kNoVertex)
          maxw_[row + v] = std::max(maxw_[row + tree.pred[v]], g.edge(tree.pred_edge[v]).w);
      }
    }
  }

  std::size_t num_vertices() const { return n_; }

  Distance dist(Vertex u, Vertex v) const { return dist_[idx(u, v)]; }
  bool connected(Vertex u, Vertex v) const { return dist(u, v) != kUnreachable; }

  /// W(u,v): heaviest edge on the canonical u-v path (0 when u == v).
  Weight pair_max_weight(Vertex u, Vertex v) const {
    return u <= v ? maxw_[idx(u, v)] : maxw_[idx(v, u)];
  }

  /// Predecessor of `v` in the shortest-path tree rooted at `source`.
  Vertex tree_pred(Vertex source, Vertex v) const { return pred_[idx(source, v)]; }
  EdgeId tree_pred_edge(Vertex source, Vertex v) const { return pred_edge_[idx(source, v)]; }

  /// Vertex sequence source..v in the tree rooted at `source`.
  std::vector<Vertex> tree_path(Vertex source, Vertex v) const {
    std::vector<Vertex> path;
    if (!connected(source, v)) return path;
    for (Vertex x = v; x != kNoVertex; x = tree_pred(source, x)) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// Edge ids of the tree path source..v, in order from source.
  std::vector<EdgeId> tree_path_edges(Vertex source, Vertex v) const {
    std::vector<EdgeId> edges;
    if (!connected(source, v)) return edges;
    for (Vertex x = v; x != source; x = tree_pred(source, x)) edges.push_back(tree_pred_edge(source, x));
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

  std::vector<Vertex> canonical_path(Vertex u, Vertex v) const {
    if (u <= v) return tree_path(u, v);
    auto p = tree_path(v, u);
    std::reverse(p.begin(), p.end());
    return p;
  }

  std::vector<EdgeId> canonical_path_edges(Vertex u, Vertex v) const {
    if (u <= v) return tree_path_edges(u, v);
    auto p = tree_path_edges(v, u);
    std::reverse(p.begin(), p.end());
    return p;
  }

  friend bool operator==(const PathTable&, const PathTable&) = default;

 private:
  std::size_t idx(Vertex u, Vertex v) const { return static_cast<std::size_t>(u) * n_ + v; }

  std::size_t n_ = 0;
  std::vector<Distance> dist_;
  std::vector<Vertex> pred_;
  std::vector<EdgeId> pred_edge_;
  std::vector<Weight> maxw_;
};

inline PathTable build_path_table(const WeightedGraph& g) { return PathTable(g); }

/// Additive error allowance: c * W_max (global) or c * W(u,v) (local).
struct ErrorBudget {
  enum class Mode { Global, Local };
  Mode mode = Mode::Global;
  int c = 2;

  static ErrorBudget global(int c) { return {Mode::Global, c}; }
  static ErrorBudget local(int c) { return {Mode::Local, c}; }

  Distance allowance(const WeightedGraph& g, const PathTable& pt, Vertex u, Vertex v) const {
    const Weight scale = mode == Mode::Global ? g.max_weight() : pt.pair_max_weight(u, v);
    return static_cast<Distance>(c) * scale;
  }

  std::string label() const { return (mode == Mode::Global ? "global:" : "local:") + std::to_string(c); }

  friend bool operator==(const ErrorBudget&, const ErrorBudget&) = default;
};

/// Inverse of ErrorBudget::label: "global:<c>" or "local:<c>", c >= 0.
inline ErrorBudget parse_budget(std::string_view s) {
  const auto colon = s.find(':');
  const auto mode = s.substr(0, colon);
  if (colon == std::string_view::npos || (mode != "global" && mode != "local"))
    throw std::invalid_argument("budget must look like global:<c> or local:<c>");
  const auto digits = s.substr(colon + 1);
  if (digits.empty() || digits.size() > 6 || digits.find_first_not_of("0123456789") != std::string_view::npos)
    throw std::invalid_argument("budget constant must be a non-negative integer");
  const int c = std::stoi(std::string(digits));
  return mode == "global" ? ErrorBudget::global(c) : ErrorBudget::local(c);
}

/// Unordered pairs {a,b}, a < b, of the given vertices in ascending
/// lexicographic order.
inline std::vector<VertexPair> all_pairs(std::vector<Vertex> vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::vector<VertexPair> out;
  if (vs.size() >= 2) out.reserve(vs.size() * (vs.size() - 1) / 2);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) out.emplace_back(vs[i], vs[j]);
  return out;
}

/// Pairs whose distance in (V, h) exceeds dist_G + allowance. Unreachable
/// pairs in h always violate. Empty result means h is a valid spanner for
/// `pairs`.
inline std::vector<VertexPair> verify_spanner(const WeightedGraph& g, const EdgeSet& h,
                                              const std::vector<VertexPair>& pairs,
                                              const ErrorBudget& budget, const PathTable& pt) {
  if (h.universe() != g.num_edges())
    throw std::invalid_argument("edge set does not belong to this graph");
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });

  std::vector<char> bad(pairs.size(), 0);
  DistanceScratch scratch;
  const std::vector<Distance>* dh = nullptr;
  Vertex current = kNoVertex;
  for (std::size_t i : order) {
    auto [u, v] = pairs[i];
    if (u != current) {
      dh = &scratch.run(g, u, &h);
      current = u;
    }
    const Distance got = (*dh)[v];
    if (got == kUnreachable) {
      bad[i] = 1;
      continue;
    }
    const Distance base = pt.dist(u, v);
    if (base == kUnreachable) continue;  // no requirement on pairs disconnected in G
    if (got > base + budget.allowance(g, pt, u, v)) bad[i] = 1;
  }
  std::vector<VertexPair> violations;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (bad[i]) violations.push_back(pairs[i]);
  return violations;
}

/// Min over v of the max hop (unweighted) distance from v.
inline std::size_t hop_radius(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw std::invalid_argument("hop_radius of an empty graph");
  if (!g.connected()) throw DisconnectedError("hop_radius requires a connected graph");
  std::size_t best = n;
  std::vector<std::size_t> hops(n);
  std::vector<Vertex> queue(n);
  for (Vertex s = 0; s < n; ++s) {
    std::fill(hops.begin(), hops.end(), n);
    std::size_t head = 0, tail = 0;
    hops[s] = 0;
    queue[tail++] = s;
    std::size_t ecc = 0;
    while (head < tail) {
      Vertex v = queue[head++];
      ecc = std::max(ecc, hops[v]);
      for (const auto& nb : g.neighbors(v)) {
        if (hops[nb.to] == n) {
          hops[nb.to] = hops[v] + 1;
          queue[tail++] = nb.to;
        }
      }
    }
    best = std::min(best, ecc);
  }
  return best;
}

/// Edges of the canonical shortest-path tree rooted at `root`.
inline EdgeSet shortest_path_tree(const WeightedGraph& g, const PathTable& pt, Vertex root) {
  EdgeSet tree(g.num_edges());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (v == root) continue;
    if (!pt.connected(root, v)) throw DisconnectedError("shortest_path_tree requires a connected graph");
    tree.insert(pt.tree_pred_edge(root, v));
  }
  return tree;
}

inline EdgeSet shortest_path_tree(const WeightedGraph& g, Vertex root) {
  auto t = dijkstra(g, root);
  EdgeSet tree(g.num_edges());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (v == root) continue;
    if (t.dist[v] == kUnreachable) throw DisconnectedError("shortest_path_tree requires a connected graph");
    tree.insert(t.pred_edge[v]);
  }
  return tree;
}

}  // namespace mlspanner
