#pragma once

// Undirected, simple, integer-weighted graphs and edge subsets over them.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlspanner {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;
using Weight = std::int32_t;
using Distance = std::int64_t;

/// Thrown when a construction requires a connected graph (or a connected pair)
/// and does not get one.
class DisconnectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph input: self-loops, parallel edges, bad ids or weights.
class GraphFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  Vertex u;
  Vertex v;
  Weight w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Vertex to;
  Weight w;
  EdgeId id;
};

/// Immutable weighted graph. Edges are stored with `u < v` in ascending
/// lexicographic order, so an EdgeId is the rank of the edge in that order.
/// Adjacency lists are sorted by neighbor id.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto& e : edges_) {
      if (e.u == e.v) throw GraphFormatError("self-loop at vertex " + std::to_string(e.u));
      if (e.u >= n_ || e.v >= n_) throw GraphFormatError("edge endpoint out of range");
      if (e.w < 1) throw GraphFormatError("edge weight must be >= 1");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
        throw GraphFormatError("parallel edge " + std::to_string(edges_[i].u) + "-" +
                               std::to_string(edges_[i].v));
    }

    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      adjacency_[fill[e.u]++] = {e.v, e.w, id};
      adjacency_[fill[e.v]++] = {e.u, e.w, id};
      max_weight_ = std::max(max_weight_, e.w);
    }
    for (std::size_t v = 0; v < n_; ++v) {
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
    }
  }

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_[id]; }

  /// Largest edge weight (W); 0 for an edgeless graph.
  Weight max_weight() const { return max_weight_; }

  std::span<const Neighbor> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const {
    if (a >= n_ || b >= n_) return std::nullopt;
    auto adj = neighbors(a);
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Neighbor& nb, Vertex x) { return nb.to < x; });
    if (it == adj.end() || it->to != b) return std::nullopt;
    return it->id;
  }

  bool connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (const auto& nb : neighbors(v)) {
        if (!seen[nb.to]) {
          seen[nb.to] = 1;
          ++reached;
          stack.push_back(nb.to);
        }
      }
    }
    return reached == n_;
  }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  Weight max_weight_ = 0;
};

/// A subset of a graph's edges, addressed by EdgeId.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t universe) : member_(universe, 0) {}

  static EdgeSet all(const WeightedGraph& g) {
    EdgeSet s(g.num_edges());
    for (EdgeId id = 0; id < g.num_edges(); ++id) s.insert(id);
    return s;
  }

  std::size_t universe() const { return member_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(EdgeId id) const { return member_[id] != 0; }

  bool insert(EdgeId id) {
    if (member_[id]) return false;
    member_[id] = 1;
    ++count_;
    return true;
  }

  bool erase(EdgeId id) {
    if (!member_[id]) return false;
    member_[id] = 0;
    --count_;
    return true;
  }

  /// Returns the number of newly added edges.
  std::size_t insert_all(const EdgeSet& other) {
    std::size_t added = 0;
    for (EdgeId id = 0; id < other.universe(); ++id)
      if (other.member_[id] && insert(id)) ++added;
    return added;
  }

  bool is_subset_of(const EdgeSet& other) const {
    for (EdgeId id = 0; id < universe(); ++id)
      if (member_[id] && !other.contains(id)) return false;
    return true;
  }

  std::vector<EdgeId> ids() const {
    std::vector<EdgeId> out;
    out.reserve(count_);
    for (EdgeId id = 0; id < universe(); ++id)
      if (member_[id]) out.push_back(id);
    return out;
  }

  friend bool operator==(const EdgeSet& a, const EdgeSet& b) { return a.member_ == b.member_; }

 private:
  std::vector<char> member_;
  std::size_t count_ = 0;
};

/// The subgraph (V, h) as a standalone graph on the same vertex set.
inline WeightedGraph subgraph(const WeightedGraph& g, const EdgeSet& h) {
  std::vector<Edge> edges;
  edges.reserve(h.size());
  for (EdgeId id : h.ids()) edges.push_back(g.edge(id));
  return WeightedGraph(g.num_vertices(), std::move(edges));
}

// Text format: "n m" then m lines "u v w", u < v, ascending (u, v).

inline void write_graph(std::ostream& os, const WeightedGraph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& e : g.edges()) os << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

/// Writes the subgraph selected by `h` in the graph text format.
inline void write_edge_set(std::ostream& os, const WeightedGraph& g, const EdgeSet& h) {
  os << g.num_vertices() << ' ' << h.size() << '\n';
  for (EdgeId id : h.ids()) {
    const auto& e = g.edge(id);
    os << e.u << ' ' << e.v << ' ' << e.w << '\n';
  }
}

inline std::string graph_to_string(const WeightedGraph& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

inline WeightedGraph read_graph(std::istream& is) {
  long long n = -1, m = -1;
  if (!(is >> n >> m) || n < 0 || m < 0) throw GraphFormatError("bad graph header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    long long u, v, w;
    if (!(is >> u >> v >> w)) throw GraphFormatError("truncated edge list");
    if (u < 0 || v < 0 || u >= n || v >= n) throw GraphFormatError("edge endpoint out of range");
    if (w < 1 || w > INT32_MAX) throw GraphFormatError("edge weight out of range");
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), static_cast<Weight>(w)});
  }
  return WeightedGraph(static_cast<std::size_t>(n), std::move(edges));
}

/// Reads a subgraph file and maps its edges onto `g`. Every edge must exist
/// in `g` with the same weight.
inline EdgeSet read_edge_set(std::istream& is, const WeightedGraph& g) {
  WeightedGraph h = read_graph(is);
  if (h.num_vertices() != g.num_vertices()) throw GraphFormatError("vertex count mismatch");
  EdgeSet out(g.num_edges());
  for (const auto& e : h.edges()) {
    auto id = g.find_edge(e.u, e.v);
    if (!id || g.edge(*id).w != e.w)
      throw GraphFormatError("edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                             " is not in the host graph");
    out.insert(*id);
  }
  return out;
}

}  // namespace mlspanner
