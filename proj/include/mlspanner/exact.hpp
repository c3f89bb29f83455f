#pragma once

// Exact minimum-sparsity (multi-level) additive spanners by exhaustive
// search, for instances small enough to enumerate.
//
// Ties are broken toward the lexicographically smallest edge-rate vector
// (r_0, r_1, ..., r_{m-1}) in EdgeId order, so edges late in the order are
// preferred over early ones.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlspanner/graph.hpp"
#include "mlspanner/multilevel.hpp"
#include "mlspanner/shortest_paths.hpp"

namespace mlspanner {

class SizeCapExceeded : public std::runtime_error {
 public:
  SizeCapExceeded(std::size_t edges, std::size_t levels, std::string why)
      : std::runtime_error("exact solver refused instance with " + std::to_string(edges) + " edges, " +
                           std::to_string(levels) + " levels: " + why),
        edges_(edges),
        levels_(levels) {}

  std::size_t edges() const { return edges_; }
  std::size_t levels() const { return levels_; }

 private:
  std::size_t edges_;
  std::size_t levels_;
};

struct ExactCaps {
  std::size_t max_edges_single = 20;
  std::size_t max_edges_multi = 14;
  double max_work = 1e8;  // bound on (l+1)^m
};

namespace detail {

/// Spanner checks on edge subsets given as bitmasks (bit e = EdgeId e).
class MaskVerifier {
 public:
  MaskVerifier(const WeightedGraph& g, const PathTable& pt, const std::vector<Vertex>& terminals,
               const ErrorBudget& budget)
      : g_(g), pairs_(all_pairs(terminals)) {
    if (g.num_edges() > 63) throw std::invalid_argument("mask verifier supports at most 63 edges");
    for (auto [u, v] : pairs_) {
      if (!pt.connected(u, v))
        throw DisconnectedError("terminal pair " + std::to_string(u) + "," + std::to_string(v) + " is disconnected");
      limit_.push_back(pt.dist(u, v) + budget.allowance(g, pt, u, v));
    }
    incident_.assign(g.num_vertices(), 0);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      incident_[g.edge(e).u] |= bit(e);
      incident_[g.edge(e).v] |= bit(e);
    }
    for (auto [u, v] : pairs_) {
      need_.push_back(u);
      need_.push_back(v);
    }
    std::sort(need_.begin(), need_.end());
    need_.erase(std::unique(need_.begin(), need_.end()), need_.end());
    dist_.resize(g.num_vertices());
  }

  static std::uint64_t bit(EdgeId e) { return std::uint64_t{1} << e; }

  bool has_pairs() const { return !pairs_.empty(); }

  bool valid(std::uint64_t mask) {
    // Every terminal that appears in a pair needs an incident edge.
    for (Vertex v : need_)
      if ((incident_[v] & mask) == 0) return false;
    Vertex current = kNoVertex;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      auto [u, v] = pairs_[i];
      if (u != current) {
        run(u, mask, limit_max_from(i));
        current = u;
      }
      if (dist_[v] > limit_[i]) return false;
    }
    return true;
  }

 private:
  Distance limit_max_from(std::size_t i) const {
    Distance lim = 0;
    for (std::size_t j = i; j < pairs_.size() && pairs_[j].first == pairs_[i].first; ++j)
      lim = std::max(lim, limit_[j]);
    return lim;
  }

  // Dijkstra on the masked subgraph, pruned at `bound`. Graphs here are tiny,
  // so an O(n^2) scan beats a heap.
  void run(Vertex s, std::uint64_t mask, Distance bound) {
    const std::size_t n = g_.num_vertices();
    std::fill(dist_.begin(), dist_.end(), kUnreachable);
    done_.assign(n, 0);
    dist_[s] = 0;
    for (;;) {
      Vertex best = kNoVertex;
      for (Vertex v = 0; v < n; ++v)
        if (!done_[v] && dist_[v] != kUnreachable && (best == kNoVertex || dist_[v] < dist_[best])) best = v;
      if (best == kNoVertex || dist_[best] > bound) return;
      done_[best] = 1;
      for (const auto& nb : g_.neighbors(best)) {
        if (!(mask & bit(nb.id))) continue;
        const Distance nd = dist_[best] + nb.w;
        if (nd < dist_[nb.to]) dist_[nb.to] = nd;
      }
    }
  }

  const WeightedGraph& g_;
  std::vector<VertexPair> pairs_;
  std::vector<Distance> limit_;
  std::vector<std::uint64_t> incident_;
  std::vector<Vertex> need_;
  std::vector<Distance> dist_;
  std::vector<char> done_;
};

/// Next larger integer with the same popcount (Gosper's hack).
inline std::uint64_t next_same_popcount(std::uint64_t x) {
  const std::uint64_t c = x & (~x + 1);
  const std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

}  // namespace detail

/// Minimum-size subset of E(g) that is a spanner over `terminals`.
/// Subsets are tried by increasing size; within a size, in increasing
/// lexicographic order of the 0/1 membership vector (EdgeId order), so the
/// first valid subset is the answer.
inline EdgeSet exact_single_level(const WeightedGraph& g, const std::vector<Vertex>& terminals,
                                  const ErrorBudget& budget, const PathTable& pt, const ExactCaps& caps = {}) {
  const std::size_t m = g.num_edges();
  if (m > caps.max_edges_single) throw SizeCapExceeded(m, 1, "edge cap " + std::to_string(caps.max_edges_single));
  if (std::pow(2.0, static_cast<double>(m)) > caps.max_work) throw SizeCapExceeded(m, 1, "work budget");

  detail::MaskVerifier verifier(g, pt, terminals, budget);
  if (!verifier.has_pairs()) return EdgeSet(m);

  // Bit j of the enumeration word stands for edge m-1-j, which makes numeric
  // order equal to lexicographic order of the membership vector.
  auto to_edges = [m](std::uint64_t word) {
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (word >> j & 1) mask |= std::uint64_t{1} << (m - 1 - j);
    return mask;
  };
  const std::uint64_t limit = m == 64 ? 0 : std::uint64_t{1} << m;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::uint64_t word = (std::uint64_t{1} << k) - 1; word < limit; word = detail::next_same_popcount(word)) {
      const std::uint64_t mask = to_edges(word);
      if (verifier.valid(mask)) {
        EdgeSet out(m);
        for (EdgeId e = 0; e < m; ++e)
          if (mask >> e & 1) out.insert(e);
        return out;
      }
      if (word == limit - 1) break;
    }
  }
  throw std::logic_error("no valid subset found; the full edge set should always be valid");
}

namespace detail {

/// Minimum sparsity over nested chains Y_l ⊆ ... ⊆ Y_1 with level-k validity,
/// subject to required/forbidden edges per level. Returns INF when infeasible.
inline std::size_t chain_optimum(const std::vector<std::vector<char>>& valid, std::size_t m,
                                 const std::vector<std::uint64_t>& required,
                                 const std::vector<std::uint64_t>& forbidden) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;
  const std::size_t ell = valid.size();
  const std::size_t full = std::size_t{1} << m;
  std::vector<std::size_t> below(full, kInf);  // min over submasks of the level above
  std::vector<std::size_t> cur(full);
  for (std::size_t k = ell; k-- > 0;) {
    for (std::size_t y = 0; y < full; ++y) {
      const bool ok = valid[k][y] && (y & required[k]) == required[k] && (y & forbidden[k]) == 0;
      const std::size_t above = k + 1 == ell ? 0 : below[y];
      cur[y] = ok && above < kInf ? static_cast<std::size_t>(std::popcount(y)) + above : kInf;
    }
    if (k == 0) break;
    below = cur;
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t y = 0; y < full; ++y)
        if (y >> b & 1) below[y] = std::min(below[y], below[y ^ (std::size_t{1} << b)]);
  }
  std::size_t best = kInf;
  for (std::size_t y = 0; y < full; ++y) best = std::min(best, cur[y]);
  return best;
}

}  // namespace detail

/// Exact optimum of a multi-level instance (OPT). Single-level instances use
/// subset enumeration; multi-level ones a subset-lattice DP over nested
/// chains, then edge-by-edge reconstruction of the lexicographically
/// smallest optimal rate vector.
inline MultiLevelSpanner exact_optimum(const MultiLevelInstance& inst, const PathTable& pt, const ExactCaps& caps = {}) {
  validate(inst);
  const std::size_t m = inst.graph.num_edges();
  const std::size_t ell = inst.levels();
  if (ell == 1) {
    const EdgeSet h = exact_single_level(inst.graph, inst.terminal_sets[0], inst.budget, pt, caps);
    std::vector<std::size_t> rate(m, 0);
    for (EdgeId e : h.ids()) rate[e] = 1;
    return MultiLevelSpanner::from_rates(std::move(rate), 1);
  }
  if (m > caps.max_edges_multi) throw SizeCapExceeded(m, ell, "edge cap " + std::to_string(caps.max_edges_multi));
  if (std::pow(static_cast<double>(ell + 1), static_cast<double>(m)) > caps.max_work)
    throw SizeCapExceeded(m, ell, "work budget");

  const std::size_t full = std::size_t{1} << m;
  std::vector<std::vector<char>> valid(ell, std::vector<char>(full, 0));
  for (std::size_t k = 0; k < ell; ++k) {
    detail::MaskVerifier verifier(inst.graph, pt, inst.terminal_sets[k], inst.budget);
    for (std::size_t y = 0; y < full; ++y) valid[k][y] = !verifier.has_pairs() || verifier.valid(y);
  }

  std::vector<std::uint64_t> required(ell, 0), forbidden(ell, 0);
  const std::size_t opt = detail::chain_optimum(valid, m, required, forbidden);
  std::vector<std::size_t> rate(m, 0);
  for (EdgeId e = 0; e < m; ++e) {
    const std::uint64_t b = std::uint64_t{1} << e;
    bool fixed = false;
    for (std::size_t r = 0; r <= ell && !fixed; ++r) {
      auto req = required, forb = forbidden;
      for (std::size_t k = 0; k < ell; ++k) (k + 1 <= r ? req[k] : forb[k]) |= b;
      if (detail::chain_optimum(valid, m, req, forb) == opt) {
        required = std::move(req);
        forbidden = std::move(forb);
        rate[e] = r;
        fixed = true;
      }
    }
    if (!fixed) throw std::logic_error("exact reconstruction lost the optimum");
  }
  return MultiLevelSpanner::from_rates(std::move(rate), ell);
}

}  // namespace mlspanner
