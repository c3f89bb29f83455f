#pragma once

// Subsetwise +2W spanner: a clustering phase followed by path buying over
// the canonical shortest paths between terminal pairs.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlspanner/graph.hpp"
#include "mlspanner/shortest_paths.hpp"

namespace mlspanner {

/// Disjoint clusters, each made of `threshold` neighbors of its center
/// (the center itself is not a member), and the cluster subgraph G_C.
struct Clustering {
  std::size_t threshold = 0;
  std::vector<std::vector<Vertex>> clusters;
  std::vector<Vertex> centers;
  std::vector<int> cluster_of;  // -1 when unclustered
  EdgeSet subgraph;
};

/// Smallest t with t*t >= x.
constexpr std::uint64_t ceil_sqrt(std::uint64_t x) {
  std::uint64_t t = 0;
  while (t * t < x) ++t;
  return t;
}

/// Threshold ceil(sqrt(|S| * W)) equals ceil(n^beta) for
/// beta = log_n sqrt(|S| W); computed exactly in integers.
inline Clustering build_clustering(const WeightedGraph& g, std::size_t terminal_count) {
  const std::size_t n = g.num_vertices();
  Clustering cl;
  cl.threshold = std::max<std::uint64_t>(
      1, ceil_sqrt(static_cast<std::uint64_t>(terminal_count) * static_cast<std::uint64_t>(g.max_weight())));
  cl.cluster_of.assign(n, -1);
  cl.subgraph = EdgeSet(g.num_edges());

  std::vector<std::size_t> free_neighbors(n);
  for (Vertex v = 0; v < n; ++v) free_neighbors[v] = g.degree(v);

  for (;;) {
    Vertex center = kNoVertex;
    for (Vertex v = 0; v < n; ++v)
      if (free_neighbors[v] >= cl.threshold) {
        center = v;
        break;
      }
    if (center == kNoVertex) break;

    const int id = static_cast<int>(cl.clusters.size());
    std::vector<Vertex> members;
    for (const auto& nb : g.neighbors(center)) {  // ascending neighbor id
      if (members.size() == cl.threshold) break;
      if (cl.cluster_of[nb.to] != -1) continue;
      members.push_back(nb.to);
      cl.subgraph.insert(nb.id);
    }
    for (Vertex x : members) {
      cl.cluster_of[x] = id;
      for (const auto& nb : g.neighbors(x)) {
        --free_neighbors[nb.to];
        if (cl.cluster_of[nb.to] == id) cl.subgraph.insert(nb.id);
      }
    }
    cl.clusters.push_back(std::move(members));
    cl.centers.push_back(center);
  }

  for (Vertex v = 0; v < n; ++v)
    if (cl.cluster_of[v] == -1)
      for (const auto& nb : g.neighbors(v)) cl.subgraph.insert(nb.id);
  return cl;
}

namespace detail {

/// Value contribution of endpoint `from_front ? path.front() : path.back()`,
/// given that endpoint's distances in the current spanner.
inline std::size_t endpoint_value(const WeightedGraph& g, const std::vector<Vertex>& path,
                                  const std::vector<EdgeId>& path_edges, bool from_front,
                                  const Clustering& cl, const std::vector<Distance>& dist_current) {
  const std::size_t len = path.size();
  std::vector<std::pair<int, Distance>> seen;  // (cluster, along-path distance), first hit
  Distance along = 0;
  for (std::size_t step = 0; step < len; ++step) {
    const std::size_t i = from_front ? step : len - 1 - step;
    if (step > 0) {
      const std::size_t edge_index = from_front ? i - 1 : i;
      along += g.edge(path_edges[edge_index]).w;
    }
    const int c = cl.cluster_of[path[i]];
    if (c < 0) continue;
    bool known = false;
    for (const auto& [sc, _] : seen) known = known || sc == c;
    if (!known) seen.emplace_back(c, along);
  }
  std::size_t value = 0;
  for (const auto& [c, d_path] : seen) {
    Distance d_current = kUnreachable;
    for (Vertex w : cl.clusters[static_cast<std::size_t>(c)]) d_current = std::min(d_current, dist_current[w]);
    if (d_path < d_current) ++value;
  }
  return value;
}

inline bool path_touches_cluster(const std::vector<Vertex>& path, const Clustering& cl) {
  for (Vertex v : path)
    if (cl.cluster_of[v] >= 0) return true;
  return false;
}

}  // namespace detail

/// Number of clusters C meeting `path` with dist_path(x, C) < dist_current(x, C),
/// where x is the path endpoint `x` and distances in (V, current) to the
/// nearest member of C (unreachable counts as infinite).
inline std::size_t path_value(const WeightedGraph& g, const std::vector<Vertex>& path, Vertex x,
                              const Clustering& cl, const EdgeSet& current) {
  if (path.empty()) return 0;
  if (x != path.front() && x != path.back()) throw std::invalid_argument("x must be a path endpoint");
  std::vector<EdgeId> edges;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto id = g.find_edge(path[i], path[i + 1]);
    if (!id) throw std::invalid_argument("path uses a non-edge");
    edges.push_back(*id);
  }
  DistanceScratch scratch;
  const auto& dist = scratch.run(g, x, &current);
  return detail::endpoint_value(g, path, edges, x == path.front(), cl, dist);
}

struct BuyRecord {
  Vertex u;
  Vertex v;
  std::size_t cost;
  std::size_t value;
  bool bought;
};

struct SubsetwiseResult {
  EdgeSet edges;
  Clustering clustering;
  std::vector<BuyRecord> audit;
};

/// +2W subsetwise spanner over `terminals`. Pairs are processed in ascending
/// lexicographic order; a path is bought iff cost <= (2W+1) * value.
inline SubsetwiseResult subsetwise_2w_run(const WeightedGraph& g, const std::vector<Vertex>& terminals,
                                          const PathTable& pt) {
  if (!g.connected()) throw DisconnectedError("subsetwise spanner requires a connected graph");
  const auto pairs = all_pairs(terminals);
  if (pairs.empty()) throw std::invalid_argument("subsetwise spanner needs at least two terminals");

  SubsetwiseResult res;
  std::vector<Vertex> distinct = terminals;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  res.clustering = build_clustering(g, distinct.size());
  res.edges = res.clustering.subgraph;
  EdgeSet& h = res.edges;
  const auto inflation = static_cast<std::size_t>(2 * g.max_weight() + 1);

  // Spanner distances per source vertex, invalidated whenever h grows.
  std::uint64_t version = 0;
  std::vector<std::uint64_t> stamp(g.num_vertices(), UINT64_MAX);
  std::vector<std::vector<Distance>> cache(g.num_vertices());
  DistanceScratch scratch;
  auto dist_from = [&](Vertex x) -> const std::vector<Distance>& {
    if (stamp[x] != version) {
      cache[x] = scratch.run(g, x, &h);
      stamp[x] = version;
    }
    return cache[x];
  };

  res.audit.reserve(pairs.size());
  for (auto [u, v] : pairs) {
    const auto path = pt.canonical_path(u, v);
    const auto path_edges = pt.canonical_path_edges(u, v);
    std::size_t cost = 0;
    for (EdgeId id : path_edges) cost += h.contains(id) ? 0 : 1;

    std::size_t value = 0;
    if (detail::path_touches_cluster(path, res.clustering)) {
      value += detail::endpoint_value(g, path, path_edges, true, res.clustering, dist_from(u));
      value += detail::endpoint_value(g, path, path_edges, false, res.clustering, dist_from(v));
    }
    const bool buy = cost <= inflation * value;
    if (buy) {
      std::size_t added = 0;
      for (EdgeId id : path_edges) added += h.insert(id) ? 1 : 0;
      if (added) ++version;
    }
    res.audit.push_back({u, v, cost, value, buy});
  }
  return res;
}

inline EdgeSet subsetwise_2w(const WeightedGraph& g, const std::vector<Vertex>& terminals, const PathTable& pt) {
  return subsetwise_2w_run(g, terminals, pt).edges;
}

}  // namespace mlspanner
