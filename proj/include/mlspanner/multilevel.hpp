#pragma once

// Multi-level spanners: nested subgraphs G_l ⊆ ... ⊆ G_1 where G_i is a
// subsetwise spanner over S_i. Built from any single-level subroutine either
// by rounding priorities up to powers of two or level by level.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlspanner/graph.hpp"
#include "mlspanner/rng.hpp"
#include "mlspanner/shortest_paths.hpp"

namespace mlspanner {

struct MultiLevelInstance {
  WeightedGraph graph;
  std::vector<std::vector<Vertex>> terminal_sets;  // S_1 ⊇ S_2 ⊇ ... ⊇ S_l
  ErrorBudget budget;

  std::size_t levels() const { return terminal_sets.size(); }
};

inline void validate(const MultiLevelInstance& inst) {
  if (inst.terminal_sets.empty()) throw std::invalid_argument("instance needs at least one level");
  std::vector<char> in_prev(inst.graph.num_vertices(), 1);
  for (std::size_t i = 0; i < inst.terminal_sets.size(); ++i) {
    const auto& level = inst.terminal_sets[i];
    if (level.empty()) throw std::invalid_argument("terminal set S_" + std::to_string(i + 1) + " is empty");
    std::vector<char> in_this(inst.graph.num_vertices(), 0);
    for (Vertex v : level) {
      if (v >= inst.graph.num_vertices()) throw std::invalid_argument("terminal id out of range");
      if (!in_prev[v])
        throw std::invalid_argument("terminal sets are not nested at level " + std::to_string(i + 1));
      in_this[v] = 1;
    }
    in_prev = std::move(in_this);
  }
}

/// Per-level edge sets plus each edge's rate (highest level containing it).
struct MultiLevelSpanner {
  std::vector<EdgeSet> level_edges;  // index 0 is level 1
  std::vector<std::size_t> edge_rate;

  std::size_t levels() const { return level_edges.size(); }

  std::size_t sparsity() const {
    std::size_t s = 0;
    for (const auto& l : level_edges) s += l.size();
    return s;
  }

  bool nested() const {
    for (std::size_t i = 1; i < level_edges.size(); ++i)
      if (!level_edges[i].is_subset_of(level_edges[i - 1])) return false;
    return true;
  }

  /// Materializes nested level sets from per-edge rates in [0, levels].
  static MultiLevelSpanner from_rates(std::vector<std::size_t> rates, std::size_t levels) {
    MultiLevelSpanner out;
    out.level_edges.assign(levels, EdgeSet(rates.size()));
    for (EdgeId e = 0; e < rates.size(); ++e)
      for (std::size_t k = 1; k <= rates[e] && k <= levels; ++k) out.level_edges[k - 1].insert(e);
    out.edge_rate = std::move(rates);
    return out;
  }
};

/// Single-level subroutine: a subsetwise spanner over `terminals` for the
/// instance budget. `seed` is already mixed with the level index.
using SingleLevelSolver = std::function<EdgeSet(const std::vector<Vertex>& terminals, std::uint64_t seed)>;

/// P(v) = max{i : v in S_i}, 0 outside S_1.
inline std::vector<std::size_t> priorities(const MultiLevelInstance& inst) {
  std::vector<std::size_t> p(inst.graph.num_vertices(), 0);
  for (std::size_t i = 0; i < inst.terminal_sets.size(); ++i)
    for (Vertex v : inst.terminal_sets[i]) p[v] = std::max(p[v], i + 1);
  return p;
}

/// Least power of two >= x (x >= 1).
constexpr std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

inline std::vector<std::size_t> round_up_levels(const std::vector<std::size_t>& p, std::size_t ell) {
  std::vector<std::size_t> out(p.size(), 0);
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] > ell) throw std::invalid_argument("priority exceeds level count");
    out[v] = p[v] == 0 ? 0 : next_pow2(p[v]);
  }
  return out;
}

/// Per-level violations of `sp` against the instance (empty when valid).
struct LevelCheck {
  std::size_t level;
  std::vector<VertexPair> violations;
};

inline std::vector<LevelCheck> verify_multilevel(const MultiLevelInstance& inst, const PathTable& pt,
                                                 const MultiLevelSpanner& sp) {
  std::vector<LevelCheck> bad;
  for (std::size_t i = 0; i < inst.levels(); ++i) {
    auto v = verify_spanner(inst.graph, sp.level_edges.at(i), all_pairs(inst.terminal_sets[i]), inst.budget, pt);
    if (!v.empty()) bad.push_back({i + 1, std::move(v)});
  }
  return bad;
}

namespace detail {

inline EdgeSet solve_level(const SingleLevelSolver& solver, const std::vector<Vertex>& terminals,
                           std::size_t edge_count, std::uint64_t seed, std::size_t level) {
  // Fewer than two terminals impose no pair constraint.
  if (terminals.size() < 2) return EdgeSet(edge_count);
  return solver(terminals, derive_seed(seed, "level", level));
}

}  // namespace detail

/// Rounding-up framework: priorities are rounded to powers of two, one
/// spanner is computed per power-of-two level over the vertices whose rounded
/// priority reaches it, and each edge keeps the highest level it appears in.
/// Original level k receives the edges whose rounded rate is at least
/// next_pow2(k).
inline MultiLevelSpanner multilevel_roundup(const MultiLevelInstance& inst, const SingleLevelSolver& solver,
                                            std::uint64_t seed = 0) {
  validate(inst);
  const std::size_t ell = inst.levels();
  const std::size_t m = inst.graph.num_edges();
  const auto rounded = round_up_levels(priorities(inst), ell);
  const std::size_t top = next_pow2(ell);

  std::vector<std::size_t> rounded_rate(m, 0);
  for (std::size_t i = 1; i <= top; i <<= 1) {
    std::vector<Vertex> terminals;
    for (Vertex v = 0; v < rounded.size(); ++v)
      if (rounded[v] >= i) terminals.push_back(v);
    if (terminals.empty()) continue;
    const EdgeSet h = detail::solve_level(solver, terminals, m, seed, i);
    for (EdgeId e : h.ids()) rounded_rate[e] = std::max(rounded_rate[e], i);
  }

  std::vector<std::size_t> rate(m, 0);
  for (EdgeId e = 0; e < m; ++e)
    for (std::size_t k = 1; k <= ell; ++k)
      if (rounded_rate[e] >= next_pow2(k)) rate[e] = k;
  return MultiLevelSpanner::from_rates(std::move(rate), ell);
}

/// One spanner per level over S_i; each edge keeps its highest level.
inline MultiLevelSpanner multilevel_naive(const MultiLevelInstance& inst, const SingleLevelSolver& solver,
                                          std::uint64_t seed = 0) {
  validate(inst);
  const std::size_t m = inst.graph.num_edges();
  std::vector<std::size_t> rate(m, 0);
  for (std::size_t i = 1; i <= inst.levels(); ++i) {
    const EdgeSet h = detail::solve_level(solver, inst.terminal_sets[i - 1], m, seed, i);
    for (EdgeId e : h.ids()) rate[e] = std::max(rate[e], i);
  }
  return MultiLevelSpanner::from_rates(std::move(rate), inst.levels());
}

enum class Strategy { RoundUp, Naive };

inline std::string_view to_string(Strategy s) { return s == Strategy::RoundUp ? "roundup" : "naive"; }

inline Strategy parse_strategy(std::string_view s) {
  if (s == "roundup") return Strategy::RoundUp;
  if (s == "naive") return Strategy::Naive;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

inline MultiLevelSpanner build_multilevel(const MultiLevelInstance& inst, const SingleLevelSolver& solver,
                                          Strategy strategy, std::uint64_t seed = 0) {
  return strategy == Strategy::RoundUp ? multilevel_roundup(inst, solver, seed)
                                       : multilevel_naive(inst, solver, seed);
}

}  // namespace mlspanner
