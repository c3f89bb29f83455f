#pragma once

// Named single-level constructions and their adapters to the multi-level
// framework.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlspanner/exact.hpp"
#include "mlspanner/multilevel.hpp"
#include "mlspanner/pairwise.hpp"
#include "mlspanner/subsetwise.hpp"

namespace mlspanner {

enum class Algorithm { Sub2W, P2W, P4W, P8W };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sub2W: return "sub2w";
    case Algorithm::P2W: return "p2w";
    case Algorithm::P4W: return "p4w";
    case Algorithm::P8W: return "p8w";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "sub2w") return Algorithm::Sub2W;
  if (s == "p2w") return Algorithm::P2W;
  if (s == "p4w") return Algorithm::P4W;
  if (s == "p8w") return Algorithm::P8W;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

inline bool is_pairwise(Algorithm a) { return a != Algorithm::Sub2W; }

inline PairwiseAlgo pairwise_kind(Algorithm a) {
  switch (a) {
    case Algorithm::P2W: return PairwiseAlgo::P2W;
    case Algorithm::P4W: return PairwiseAlgo::P4W;
    case Algorithm::P8W: return PairwiseAlgo::P8W;
    default: throw std::invalid_argument("not a pairwise algorithm");
  }
}

struct AlgorithmOptions {
  std::size_t max_retries = 10;
  std::optional<std::size_t> d_override;
  bool d_sweep = false;
  SubsetwiseChoice p8w_subroutine = SubsetwiseChoice::Plus2W;
};

inline ErrorBudget advertised_budget(Algorithm a, const AlgorithmOptions& opt = {}) {
  if (a == Algorithm::Sub2W) return ErrorBudget::global(2);
  PairwiseParams p;
  p.algo = pairwise_kind(a);
  p.subroutine = opt.p8w_subroutine;
  return advertised_budget(p);
}

inline PairwiseParams pairwise_params(Algorithm a, const AlgorithmOptions& opt, std::uint64_t seed) {
  PairwiseParams p;
  p.algo = pairwise_kind(a);
  p.d_override = opt.d_override;
  p.max_retries = opt.max_retries;
  p.seed = seed;
  p.subroutine = opt.p8w_subroutine;
  return p;
}

struct DSweepResult {
  EdgeSet best;
  std::size_t best_d = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ladder;  // (d, |H|)
};

/// Runs the pairwise construction for d = base, ceil(base/2), ..., 1 with the
/// same seed and keeps the sparsest output (the largest d wins ties).
inline DSweepResult d_sweep(const WeightedGraph& g, const std::vector<VertexPair>& pairs, PairwiseParams params,
                            const PathTable& pt, std::size_t base_d) {
  if (base_d == 0) throw std::invalid_argument("d-sweep needs base_d >= 1");
  DSweepResult out;
  for (std::size_t d = base_d;; d = (d + 1) / 2) {
    params.d_override = d;
    auto res = pairwise_spanner(g, pairs, params, pt);
    out.ladder.emplace_back(d, res.edges.size());
    if (out.ladder.size() == 1 || res.edges.size() < out.best.size()) {
      out.best = std::move(res.edges);
      out.best_d = d;
    }
    if (d == 1) break;
  }
  return out;
}

/// Default d for the algorithm on `pair_count` pairs.
inline std::size_t default_d(PairwiseAlgo algo, std::size_t n, std::size_t pair_count) {
  PairwiseParams p;
  p.algo = algo;
  return resolve_parameters(p, n, pair_count).d;
}

/// Single-level solver for `a` on graph g. g and pt must outlive the solver.
inline SingleLevelSolver make_solver(Algorithm a, const WeightedGraph& g, const PathTable& pt,
                                     const AlgorithmOptions& opt = {}) {
  if (a == Algorithm::Sub2W)
    return [&g, &pt](const std::vector<Vertex>& terminals, std::uint64_t) { return subsetwise_2w(g, terminals, pt); };
  return [&g, &pt, a, opt](const std::vector<Vertex>& terminals, std::uint64_t seed) {
    const auto pairs = all_pairs(terminals);
    PairwiseParams p = pairwise_params(a, opt, seed);
    if (!opt.d_sweep) return pairwise_spanner(g, pairs, p, pt).edges;
    const std::size_t base = opt.d_override ? *opt.d_override : default_d(p.algo, g.num_vertices(), pairs.size());
    return d_sweep(g, pairs, p, pt, base).best;
  };
}

inline SingleLevelSolver make_exact_solver(const WeightedGraph& g, const PathTable& pt, ErrorBudget budget,
                                           ExactCaps caps = {}) {
  return [&g, &pt, budget, caps](const std::vector<Vertex>& terminals, std::uint64_t) {
    return exact_single_level(g, terminals, budget, pt, caps);
  };
}

}  // namespace mlspanner
