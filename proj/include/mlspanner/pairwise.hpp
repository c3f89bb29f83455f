#pragma once

// Pairwise spanners built on a d-light initialization: the +2W(.,.),
// +4W(.,.) and +6W constructions, with the resample-until-few-missing loop.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlspanner/graph.hpp"
#include "mlspanner/rng.hpp"
#include "mlspanner/shortest_paths.hpp"
#include "mlspanner/subsetwise.hpp"

namespace mlspanner {

enum class PairwiseAlgo { P2W, P4W, P8W };

inline std::string_view to_string(PairwiseAlgo a) {
  switch (a) {
    case PairwiseAlgo::P2W: return "p2w";
    case PairwiseAlgo::P4W: return "p4w";
    case PairwiseAlgo::P8W: return "p8w";
  }
  return "?";
}

/// Which subsetwise spanner the +6W construction calls on its sample.
/// `Plus4WRelabel` still runs the +2W construction but advertises the
/// weaker +8W guarantee of the original analysis.
enum class SubsetwiseChoice { Plus2W, Plus4WRelabel };

struct PairwiseParams {
  PairwiseAlgo algo = PairwiseAlgo::P2W;
  std::optional<std::size_t> d_override;
  std::optional<std::size_t> ell_override;
  std::size_t max_retries = 10;
  std::uint64_t seed = 0;
  SubsetwiseChoice subroutine = SubsetwiseChoice::Plus2W;
};

/// Error guarantee checked on every output.
inline ErrorBudget advertised_budget(const PairwiseParams& p) {
  switch (p.algo) {
    case PairwiseAlgo::P2W: return ErrorBudget::local(2);
    case PairwiseAlgo::P4W: return ErrorBudget::local(4);
    case PairwiseAlgo::P8W:
      return ErrorBudget::global(p.subroutine == SubsetwiseChoice::Plus2W ? 6 : 8);
  }
  return ErrorBudget::global(0);
}

using SubsetRoutine =
    std::function<EdgeSet(const WeightedGraph&, const std::vector<Vertex>&, const PathTable&)>;

namespace detail {

inline constexpr __int128 kSaturate = static_cast<__int128>(1) << 120;

inline __int128 sat_mul(__int128 a, __int128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturate / b) return kSaturate;
  return a * b;
}

inline __int128 sat_pow(std::uint64_t base, unsigned exp) {
  __int128 r = 1;
  for (unsigned i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

/// Smallest d >= 1 with d^den >= p^num, i.e. ceil(p^(num/den)).
inline std::size_t ceil_power(std::uint64_t p, unsigned num, unsigned den) {
  const __int128 target = sat_pow(p, num);
  auto ok = [&](std::uint64_t d) { return sat_pow(d, den) >= target; };
  auto d = static_cast<std::uint64_t>(std::max(1.0L, std::floor(std::pow(static_cast<long double>(p),
                                                                            static_cast<long double>(num) / den))));
  while (d > 1 && ok(d - 1)) --d;
  while (!ok(d)) ++d;
  return static_cast<std::size_t>(d);
}

/// max(1, ceil(n / p^(num/den))): smallest l >= 1 with l^den * p^num >= n^den.
inline std::size_t ceil_ratio_power(std::uint64_t n, std::uint64_t p, unsigned num, unsigned den) {
  const __int128 target = sat_pow(n, den);
  const __int128 pp = sat_pow(p, num);
  auto ok = [&](std::uint64_t l) { return sat_mul(sat_pow(l, den), pp) >= target; };
  auto l = static_cast<std::uint64_t>(std::max(
      1.0L, std::floor(static_cast<long double>(n) /
                       std::pow(static_cast<long double>(p), static_cast<long double>(num) / den))));
  while (l > 1 && ok(l - 1)) --l;
  while (!ok(l)) ++l;
  return static_cast<std::size_t>(l);
}

}  // namespace detail

struct PairwiseParameters {
  std::size_t d;
  std::size_t ell;
};

/// d and l from |P| and n, or the overrides when given.
inline PairwiseParameters resolve_parameters(const PairwiseParams& p, std::size_t n, std::size_t pair_count) {
  if ((p.d_override && *p.d_override == 0) || (p.ell_override && *p.ell_override == 0))
    throw std::invalid_argument("d and l overrides must be positive");
  unsigned dn = 1, dd = 3, ln = 2, ld = 3;
  switch (p.algo) {
    case PairwiseAlgo::P2W: dn = 1, dd = 3, ln = 2, ld = 3; break;
    case PairwiseAlgo::P4W: dn = 2, dd = 7, ln = 5, ld = 7; break;
    case PairwiseAlgo::P8W: dn = 1, dd = 4, ln = 3, ld = 4; break;
  }
  PairwiseParameters out;
  out.d = p.d_override ? *p.d_override : detail::ceil_power(pair_count, dn, dd);
  out.ell = p.ell_override ? *p.ell_override : detail::ceil_ratio_power(n, pair_count, ln, ld);
  return out;
}

/// Union over vertices of each vertex's d lightest incident edges (ties by
/// smaller neighbor id).
inline EdgeSet d_light_init(const WeightedGraph& g, std::size_t d) {
  if (d == 0) throw std::invalid_argument("d must be positive");
  EdgeSet h(g.num_edges());
  std::vector<Neighbor> adj;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    auto nbs = g.neighbors(v);
    adj.assign(nbs.begin(), nbs.end());
    const std::size_t take = std::min(d, adj.size());
    std::partial_sort(adj.begin(), adj.begin() + static_cast<std::ptrdiff_t>(take), adj.end(),
                      [](const Neighbor& a, const Neighbor& b) { return std::pair(a.w, a.to) < std::pair(b.w, b.to); });
    for (std::size_t i = 0; i < take; ++i) h.insert(adj[i].id);
  }
  return h;
}

/// Minimum-weight r -> target path using at most `miss_cap` edges outside
/// `current`. Layered Dijkstra over (vertex, missing count); equal-weight
/// ties prefer fewer missing edges at the target, then smaller predecessor
/// ids.
inline std::optional<std::vector<Vertex>> limited_missing_path(const WeightedGraph& g, Vertex r, Vertex target,
                                                               const EdgeSet& current, std::size_t miss_cap) {
  const std::size_t n = g.num_vertices();
  const std::size_t layers = std::min(miss_cap, n == 0 ? 0 : n - 1) + 1;
  const std::size_t states = n * layers;
  std::vector<Distance> dist(states, kUnreachable);
  std::vector<std::size_t> pred(states, SIZE_MAX);
  std::vector<char> settled(states, 0);
  auto id = [&](Vertex v, std::size_t k) { return static_cast<std::size_t>(v) * layers + k; };

  using Item = std::pair<Distance, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[id(r, 0)] = 0;
  heap.push({0, id(r, 0)});
  while (!heap.empty()) {
    auto [d, s] = heap.top();
    heap.pop();
    if (settled[s]) continue;
    settled[s] = 1;
    const auto v = static_cast<Vertex>(s / layers);
    const std::size_t k = s % layers;
    for (const auto& nb : g.neighbors(v)) {
      const std::size_t nk = k + (current.contains(nb.id) ? 0 : 1);
      if (nk >= layers) continue;
      const std::size_t t = id(nb.to, nk);
      const Distance nd = d + nb.w;
      if (nd < dist[t] || (nd == dist[t] && !settled[t] && s < pred[t])) {
        const bool improved = nd < dist[t];
        dist[t] = nd;
        pred[t] = s;
        if (improved) heap.push({nd, t});
      }
    }
  }

  std::size_t best = SIZE_MAX;
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t s = id(target, k);
    if (dist[s] == kUnreachable) continue;
    if (best == SIZE_MAX || dist[s] < dist[best]) best = s;
  }
  if (best == SIZE_MAX) return std::nullopt;
  std::vector<Vertex> path;
  for (std::size_t s = best; s != SIZE_MAX; s = pred[s]) path.push_back(static_cast<Vertex>(s / layers));
  std::reverse(path.begin(), path.end());
  return path;
}

struct PassRecord {
  std::size_t attempt;
  std::size_t sampled_vertices;
  std::size_t violating_pairs;
  std::size_t missing_edges;  // m'
};

struct PairwiseReport {
  PairwiseAlgo algo;
  std::size_t d;
  std::size_t ell;
  std::size_t init_size;
  std::vector<PassRecord> passes;
  bool fallback = false;
};

struct PairwiseResult {
  EdgeSet edges;
  PairwiseReport report;
};

namespace detail {

class PairwisePass {
 public:
  PairwisePass(const WeightedGraph& g, const std::vector<VertexPair>& pairs, const PathTable& pt,
               const PairwiseParameters& prm, const SubsetRoutine& subroutine)
      : g_(g), pairs_(pairs), pt_(pt), prm_(prm), subroutine_(subroutine) {}

  /// One full sweep over the pairs plus sampling; returns sampled vertex count.
  std::size_t run(PairwiseAlgo algo, EdgeSet& h, Rng& rng) {
    tree_added_.assign(g_.num_vertices(), 0);
    sampled_ = 0;
    switch (algo) {
      case PairwiseAlgo::P2W: run_2w(h, rng); break;
      case PairwiseAlgo::P4W: run_4w(h, rng); break;
      case PairwiseAlgo::P8W: run_8w(h, rng); break;
    }
    return sampled_;
  }

 private:
  std::size_t missing(const std::vector<EdgeId>& path, const EdgeSet& h) const {
    std::size_t x = 0;
    for (EdgeId id : path) x += h.contains(id) ? 0 : 1;
    return x;
  }

  static void add_path(const std::vector<EdgeId>& path, EdgeSet& h) {
    for (EdgeId id : path) h.insert(id);
  }

  // Adds the first l and last l edges of `path` that are missing from h.
  void add_missing_ends(const std::vector<EdgeId>& path, EdgeSet& h) const {
    std::vector<EdgeId> miss;
    for (EdgeId id : path)
      if (!h.contains(id)) miss.push_back(id);
    const std::size_t l = std::min(prm_.ell, miss.size());
    for (std::size_t i = 0; i < l; ++i) {
      h.insert(miss[i]);
      h.insert(miss[miss.size() - 1 - i]);
    }
  }

  void add_tree(Vertex root, EdgeSet& h) {
    if (tree_added_[root]) return;
    tree_added_[root] = 1;
    for (Vertex v = 0; v < g_.num_vertices(); ++v)
      if (v != root) h.insert(pt_.tree_pred_edge(root, v));
  }

  std::vector<Vertex> sample(Rng& rng, double p) {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < g_.num_vertices(); ++v)
      if (rng.coin(p)) out.push_back(v);
    sampled_ += out.size();
    return out;
  }

  double inv_ld() const { return std::min(1.0, 1.0 / (static_cast<double>(prm_.ell) * static_cast<double>(prm_.d))); }

  void run_2w(EdgeSet& h, Rng& rng) {
    for (auto [s, t] : pairs_) {
      const auto path = pt_.canonical_path_edges(s, t);
      if (missing(path, h) <= prm_.ell) add_path(path, h);
    }
    for (Vertex r : sample(rng, inv_ld())) add_tree(r, h);
  }

  void run_4w(EdgeSet& h, Rng& rng) {
    const std::size_t n = g_.num_vertices();
    const std::size_t dd = prm_.d * prm_.d;
    const std::size_t cap = n / dd;
    const double tree_p = std::min(1.0, static_cast<double>(dd) / static_cast<double>(n));
    for (auto [s, t] : pairs_) {
      const auto path = pt_.canonical_path_edges(s, t);
      const std::size_t x = missing(path, h);
      if (x <= prm_.ell) {
        add_path(path, h);
      } else if (x * dd >= n) {
        for (Vertex r : sample(rng, tree_p)) add_tree(r, h);
      } else {
        add_missing_ends(path, h);
        const auto roots = sample(rng, inv_ld());
        for (std::size_t i = 0; i < roots.size(); ++i)
          for (std::size_t j = i + 1; j < roots.size(); ++j) {
            auto p = limited_missing_path(g_, roots[i], roots[j], h, cap);
            if (!p) continue;
            for (std::size_t k = 0; k + 1 < p->size(); ++k) h.insert(*g_.find_edge((*p)[k], (*p)[k + 1]));
          }
      }
    }
  }

  void run_8w(EdgeSet& h, Rng& rng) {
    for (auto [s, t] : pairs_) {
      const auto path = pt_.canonical_path_edges(s, t);
      if (missing(path, h) <= prm_.ell) {
        add_path(path, h);
        continue;
      }
      add_missing_ends(path, h);
      const auto sample_set = sample(rng, inv_ld());
      if (sample_set.size() >= 2) h.insert_all(subroutine_(g_, sample_set, pt_));
    }
  }

  const WeightedGraph& g_;
  const std::vector<VertexPair>& pairs_;
  const PathTable& pt_;
  PairwiseParameters prm_;
  const SubsetRoutine& subroutine_;
  std::vector<char> tree_added_;
  std::size_t sampled_ = 0;
};

/// Distinct canonical-path edges of violating pairs that are absent from h.
inline std::vector<EdgeId> missing_edges(const std::vector<VertexPair>& violators, const EdgeSet& h,
                                         const PathTable& pt) {
  EdgeSet seen(h.universe());
  std::vector<EdgeId> out;
  for (auto [s, t] : violators)
    for (EdgeId id : pt.canonical_path_edges(s, t))
      if (!h.contains(id) && seen.insert(id)) out.push_back(id);
  return out;
}

}  // namespace detail

/// Pairwise spanner for `pairs`.
///
/// Each attempt starts from the d-light initialization, runs one pass of the
/// selected construction with a fresh random stream, and then counts m', the
/// distinct canonical-path edges still missing for pairs that violate the
/// advertised budget. If m' <= n*d those edges are added and the attempt is
/// accepted. After `max_retries` rejected attempts the last attempt (or the
/// bare initialization when max_retries == 0) is patched the same way.
inline PairwiseResult pairwise_spanner(const WeightedGraph& g, const std::vector<VertexPair>& pairs,
                                       const PairwiseParams& params, const PathTable& pt,
                                       SubsetRoutine subroutine = {}) {
  if (pairs.empty()) throw std::invalid_argument("pairwise spanner needs a nonempty pair set");
  for (auto [s, t] : pairs) {
    if (s >= g.num_vertices() || t >= g.num_vertices()) throw std::invalid_argument("pair vertex out of range");
    if (!pt.connected(s, t))
      throw DisconnectedError("pair " + std::to_string(s) + "," + std::to_string(t) + " is disconnected");
  }
  if (!subroutine) subroutine = [](const WeightedGraph& gg, const std::vector<Vertex>& s, const PathTable& p) {
    return subsetwise_2w(gg, s, p);
  };

  const auto prm = resolve_parameters(params, g.num_vertices(), pairs.size());
  const ErrorBudget budget = advertised_budget(params);
  const EdgeSet init = d_light_init(g, prm.d);

  PairwiseResult res{init, {params.algo, prm.d, prm.ell, init.size(), {}, false}};
  detail::PairwisePass pass(g, pairs, pt, prm, subroutine);
  const std::size_t accept_limit = g.num_vertices() * prm.d;

  EdgeSet h = init;
  std::vector<EdgeId> patch;
  bool accepted = false;
  for (std::size_t attempt = 0; attempt < params.max_retries; ++attempt) {
    h = init;
    Rng rng(params.seed, "pairwise", attempt);
    const std::size_t sampled = pass.run(params.algo, h, rng);
    const auto violators = verify_spanner(g, h, pairs, budget, pt);
    patch = detail::missing_edges(violators, h, pt);
    res.report.passes.push_back({attempt, sampled, violators.size(), patch.size()});
    if (patch.size() <= accept_limit) {
      accepted = true;
      break;
    }
  }
  if (!accepted) {
    if (params.max_retries == 0) patch = detail::missing_edges(verify_spanner(g, h, pairs, budget, pt), h, pt);
    res.report.fallback = true;
  }
  for (EdgeId id : patch) h.insert(id);
  res.edges = std::move(h);
  return res;
}

}  // namespace mlspanner
