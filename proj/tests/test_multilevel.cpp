#include <gtest/gtest.h>

#include "mlspanner/algorithms.hpp"
#include "mlspanner/exact.hpp"
#include "mlspanner/generators.hpp"
#include "mlspanner/multilevel.hpp"
#include "test_support.hpp"

using namespace mlspanner;
using namespace mlspanner::testing;

namespace {

MultiLevelInstance make_instance(GraphModel model, std::size_t n, std::size_t levels, TerminalMethod tsm,
                                 std::uint64_t seed, ErrorBudget budget = ErrorBudget::global(2)) {
  GeneratorSpec spec;
  spec.model = model;
  spec.n = n;
  spec.seed = seed;
  return {generate(spec), generate_terminals(n, {tsm, levels, seed}), budget};
}

// Deterministic subroutine that records its calls.
struct Recorder {
  std::vector<std::vector<Vertex>> calls;
  std::vector<std::uint64_t> seeds;
  const WeightedGraph* g;
  SingleLevelSolver solver() {
    return [this](const std::vector<Vertex>& t, std::uint64_t s) {
      calls.push_back(t);
      seeds.push_back(s);
      return EdgeSet::all(*g);
    };
  }
};

}  // namespace

TEST(Priorities, Examples) {
  MultiLevelInstance inst{complete(6), {{0, 1, 2, 3, 4}, {0, 1, 2, 3}, {0, 1, 2}, {0, 1}, {0}}, {}};
  const auto p = priorities(inst);
  EXPECT_EQ(p[2], 3u);
  EXPECT_EQ(p[5], 0u);
  EXPECT_EQ(p[0], 5u);
  MultiLevelInstance same{complete(3), {{1}, {1}}, {}};
  EXPECT_EQ(priorities(same)[1], 2u);
}

TEST(RoundUp, Examples) {
  EXPECT_EQ(round_up_levels({3}, 3), (std::vector<std::size_t>{4}));
  EXPECT_EQ(round_up_levels({1}, 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(round_up_levels({5}, 5), (std::vector<std::size_t>{8}));
  EXPECT_EQ(round_up_levels({0, 2, 6, 7, 8}, 8), (std::vector<std::size_t>{0, 2, 8, 8, 8}));
  EXPECT_THROW(round_up_levels({4}, 3), std::invalid_argument);
  EXPECT_EQ(next_pow2(1), 1u);
  EXPECT_EQ(next_pow2(9), 16u);
}

TEST(Validate, RejectsBadInstances) {
  const auto g = complete(4);
  EXPECT_THROW(validate(MultiLevelInstance{g, {}, {}}), std::invalid_argument);
  EXPECT_THROW(validate(MultiLevelInstance{g, {{0, 1}, {}}, {}}), std::invalid_argument);
  EXPECT_THROW(validate(MultiLevelInstance{g, {{0, 1}, {2}}, {}}), std::invalid_argument);
  EXPECT_THROW(validate(MultiLevelInstance{g, {{0, 9}}, {}}), std::invalid_argument);
  EXPECT_NO_THROW(validate(MultiLevelInstance{g, {{0, 1, 2}, {2}}, {}}));
}

TEST(Spanner, FromRatesNestingAndSparsity) {
  const auto sp = MultiLevelSpanner::from_rates({0, 3, 1, 2}, 3);
  EXPECT_EQ(sp.sparsity(), 6u);
  EXPECT_TRUE(sp.nested());
  EXPECT_EQ(sp.level_edges[0].size(), 3u);
  EXPECT_EQ(sp.level_edges[2].ids(), (std::vector<EdgeId>{1}));
}

TEST(RoundUpFramework, SingleLevelIsOneCall) {
  const auto g = random_connected(10, 10, 5, 1);
  Recorder rec{{}, {}, &g};
  MultiLevelInstance inst{g, {{1, 4, 7}}, ErrorBudget::global(2)};
  const auto sp = multilevel_roundup(inst, rec.solver(), 42);
  ASSERT_EQ(rec.calls.size(), 1u);
  EXPECT_EQ(rec.calls[0], (std::vector<Vertex>{1, 4, 7}));
  EXPECT_EQ(rec.seeds[0], derive_seed(42, "level", 1));
  EXPECT_EQ(sp.sparsity(), g.num_edges());

  Recorder rec2{{}, {}, &g};
  const auto naive = multilevel_naive(inst, rec2.solver(), 42);
  EXPECT_EQ(rec2.seeds, rec.seeds);
  EXPECT_EQ(naive.level_edges, sp.level_edges);
}

TEST(RoundUpFramework, CallsPowerOfTwoLevels) {
  const auto g = complete(8);
  Recorder rec{{}, {}, &g};
  // Priorities 1..5 round to 1, 2, 4, 4, 8.
  MultiLevelInstance inst{g, {{0, 1, 2, 3, 4}, {1, 2, 3, 4}, {2, 3, 4}, {3, 4}, {4}}, {}};
  multilevel_roundup(inst, rec.solver());
  ASSERT_EQ(rec.calls.size(), 3u);  // level 8 has a single terminal and is skipped
  EXPECT_EQ(rec.calls[0], (std::vector<Vertex>{0, 1, 2, 3, 4}));
  EXPECT_EQ(rec.calls[1], (std::vector<Vertex>{1, 2, 3, 4}));
  EXPECT_EQ(rec.calls[2], (std::vector<Vertex>{2, 3, 4}));
}

TEST(RoundUpFramework, ProjectionUsesNextPowerOfTwo) {
  // Subroutine returns a distinct single edge per call so rates are visible.
  const auto g = complete(6);
  MultiLevelInstance inst{g, {{0, 1, 2, 3}, {1, 2, 3}, {2, 3}}, {}};
  std::map<std::size_t, EdgeId> by_size{{4, 0}, {3, 1}, {2, 2}};
  SingleLevelSolver s = [&](const std::vector<Vertex>& t, std::uint64_t) {
    EdgeSet h(g.num_edges());
    h.insert(by_size.at(t.size()));
    return h;
  };
  const auto sp = multilevel_roundup(inst, s);
  // Rounded levels 1, 2, 4; original levels 1, 2, 3 map to 1, 2, 4.
  EXPECT_EQ(sp.edge_rate[0], 1u);
  EXPECT_EQ(sp.edge_rate[1], 2u);
  EXPECT_EQ(sp.edge_rate[2], 3u);
  EXPECT_TRUE(sp.nested());
  EXPECT_EQ(sp.sparsity(), 6u);
}

TEST(RoundUpFramework, EqualLevelsBoundedByTwiceLarger) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = make_instance(GraphModel::ER, 20, 1, TerminalMethod::Linear, seed);
    inst.terminal_sets.push_back(inst.terminal_sets[0]);
    const PathTable pt(inst.graph);
    const auto solver = make_solver(Algorithm::Sub2W, inst.graph, pt);
    const auto sp = multilevel_roundup(inst, solver, seed);
    const auto h = subsetwise_2w(inst.graph, inst.terminal_sets[0], pt);
    EXPECT_EQ(sp.level_edges[0], sp.level_edges[1]);
    EXPECT_LE(sp.sparsity(), 2 * h.size());
    EXPECT_TRUE(verify_multilevel(inst, pt, sp).empty());
  }
}

TEST(NaiveFramework, EqualSetsRepeat) {
  auto inst = make_instance(GraphModel::BA, 20, 1, TerminalMethod::Linear, 3);
  inst.terminal_sets.assign(4, inst.terminal_sets[0]);
  const PathTable pt(inst.graph);
  const auto sp = multilevel_naive(inst, make_solver(Algorithm::Sub2W, inst.graph, pt));
  const auto h = subsetwise_2w(inst.graph, inst.terminal_sets[0], pt);
  EXPECT_EQ(sp.sparsity(), 4 * h.size());
}

TEST(Frameworks, SingleTerminalLevelIsEmpty) {
  const auto g = complete(4);
  Recorder rec{{}, {}, &g};
  MultiLevelInstance inst{g, {{0, 1}, {1}}, {}};
  const auto sp = multilevel_naive(inst, rec.solver());
  EXPECT_EQ(rec.calls.size(), 1u);
  EXPECT_EQ(sp.level_edges[1].size(), 0u);
}

TEST(Frameworks, BothAtLeastOptOnSmallEr) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; checked < 5 && seed < 1000; ++seed) {
    GeneratorSpec spec;
    spec.n = 8;
    spec.seed = seed;
    const auto g = generate(spec);
    if (g.num_edges() > 11) continue;  // keeps 4^m rate vectors enumerable
    MultiLevelInstance inst{g, generate_terminals(8, {TerminalMethod::Exponential, 3, seed}), ErrorBudget::global(2)};
    const PathTable pt(g);
    const std::size_t opt = brute_multi_optimum(g, inst.terminal_sets, [&](Vertex, Vertex) { return 2 * g.max_weight(); });
    for (auto a : {Algorithm::Sub2W, Algorithm::P2W, Algorithm::P4W, Algorithm::P8W}) {
      const auto budget = advertised_budget(a);
      inst.budget = budget;
      const std::size_t opt_a =
          budget == ErrorBudget::global(2)
              ? opt
              : brute_multi_optimum(g, inst.terminal_sets, [&](Vertex u, Vertex v) { return budget.allowance(g, pt, u, v); });
      const auto solver = make_solver(a, g, pt);
      for (auto strat : {Strategy::RoundUp, Strategy::Naive}) {
        const auto sp = build_multilevel(inst, solver, strat, seed);
        EXPECT_TRUE(sp.nested());
        EXPECT_TRUE(verify_multilevel(inst, pt, sp).empty());
        EXPECT_GE(sp.sparsity(), opt_a);
      }
    }
    ++checked;
  }
  EXPECT_EQ(checked, 5u);
}

TEST(Frameworks, ValidAndNestedAcrossModels) {
  for (auto model : {GraphModel::ER, GraphModel::WS, GraphModel::BA, GraphModel::GE})
    for (std::size_t levels : {2u, 3u, 5u})
      for (auto tsm : {TerminalMethod::Linear, TerminalMethod::Exponential}) {
        auto inst = make_instance(model, 30, levels, tsm, levels * 13 + 1);
        const PathTable pt(inst.graph);
        for (auto a : {Algorithm::Sub2W, Algorithm::P2W, Algorithm::P4W, Algorithm::P8W}) {
          inst.budget = advertised_budget(a);
          const auto solver = make_solver(a, inst.graph, pt);
          for (auto strat : {Strategy::RoundUp, Strategy::Naive}) {
            const auto sp = build_multilevel(inst, solver, strat, 11);
            EXPECT_TRUE(sp.nested());
            EXPECT_TRUE(verify_multilevel(inst, pt, sp).empty());
            std::size_t rate_sum = 0;
            for (auto r : sp.edge_rate) rate_sum += r;
            EXPECT_EQ(rate_sum, sp.sparsity());
            // Level 1 must connect S_1.
            EXPECT_GE(sp.level_edges[0].size() + 1, inst.terminal_sets[0].size());
            EXPECT_EQ(build_multilevel(inst, solver, strat, 11).level_edges, sp.level_edges);
          }
        }
      }
}

TEST(Frameworks, TinyExactSubroutineWithinFourOpt) {
  // Triangle, S_1 = V, S_2 = {0,2}.
  const auto g = triangle();
  const PathTable pt(g);
  MultiLevelInstance inst{g, {{0, 1, 2}, {0, 2}}, ErrorBudget::global(2)};
  const auto opt = exact_optimum(inst, pt);
  const auto sp = multilevel_roundup(inst, make_exact_solver(g, pt, inst.budget));
  EXPECT_EQ(opt.sparsity(), brute_multi_optimum(g, inst.terminal_sets, [](Vertex, Vertex) { return 6; }));
  EXPECT_LE(sp.sparsity(), 4 * opt.sparsity());
}

TEST(Parsing, StrategyNames) {
  EXPECT_EQ(parse_strategy("roundup"), Strategy::RoundUp);
  EXPECT_EQ(parse_strategy("naive"), Strategy::Naive);
  EXPECT_THROW(parse_strategy("x"), std::invalid_argument);
  EXPECT_EQ(parse_algorithm("p8w"), Algorithm::P8W);
  EXPECT_THROW(parse_algorithm("p16w"), std::invalid_argument);
}
