#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mlspanner/bench.hpp"

using namespace mlspanner;

namespace {

ExperimentPlan small_plan(bool exact) {
  ExperimentPlan p;
  p.models = {GraphModel::ER};
  p.sizes = {10, 20};
  p.levels = {1};
  p.methods = {TerminalMethod::Linear, TerminalMethod::Exponential};
  p.algorithms = {Algorithm::Sub2W, Algorithm::P2W};
  p.exact = exact;
  return p;
}

std::string csv(const std::vector<ResultRow>& rows, bool with_wall) {
  std::ostringstream os;
  write_csv(os, rows, with_wall);
  return os.str();
}

}  // namespace

TEST(RunPlan, FortyRowPlan) {
  const auto plan = small_plan(true);
  const auto rows = run_plan(plan, 1);
  ASSERT_EQ(rows.size(), 1u * 2u * 1u * 2u * 5u * 2u);

  std::map<std::size_t, std::size_t> best;
  for (const auto& r : rows) {
    auto [it, fresh] = best.emplace(r.instance_id, r.sparsity);
    if (!fresh) it->second = std::min(it->second, r.sparsity);
  }
  ASSERT_EQ(best.size(), 20u);
  std::map<std::size_t, std::size_t> at_one;
  std::size_t with_exact = 0;
  for (const auto& r : rows) {
    with_exact += r.exact_sparsity.has_value();
    EXPECT_TRUE(r.valid);
    EXPECT_EQ(r.generator, "er");
    EXPECT_EQ(r.budget, r.algorithm == "sub2w" ? "global:2" : "local:2");
    ASSERT_TRUE(r.relative_sparsity.has_value());
    EXPECT_DOUBLE_EQ(*r.relative_sparsity,
                     static_cast<double>(r.sparsity) / static_cast<double>(best.at(r.instance_id)));
    EXPECT_GE(*r.relative_sparsity, 1.0);
    if (*r.relative_sparsity == 1.0) ++at_one[r.instance_id];
    // Exact is attempted for every row and recorded when the instance fits the cap.
    EXPECT_EQ(r.exact_sparsity.has_value(), r.m <= plan.caps.max_edges_single);
    if (r.exact_sparsity) {
      ASSERT_TRUE(r.experimental_ratio.has_value());
      EXPECT_GE(*r.experimental_ratio, 1.0);
      EXPECT_LE(*r.exact_sparsity, r.sparsity);
    } else {
      EXPECT_FALSE(r.experimental_ratio.has_value());
    }
  }
  EXPECT_EQ(at_one.size(), 20u);
  EXPECT_GT(with_exact, 0u);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.instance_id, a.algorithm) < std::tie(b.instance_id, b.algorithm);
  }));
}

TEST(RunPlan, ExactOffLeavesRatioEmpty) {
  const auto rows = run_plan(small_plan(false), 2);
  ASSERT_EQ(rows.size(), 40u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.exact_sparsity.has_value());
    EXPECT_FALSE(r.experimental_ratio.has_value());
    EXPECT_TRUE(r.relative_sparsity.has_value());
  }
  std::istringstream is(csv(rows, true));
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header, kCsvHeader);
  std::getline(is, line);
  std::vector<std::string> f;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) f.push_back(cell);
  ASSERT_GE(f.size(), 12u);
  EXPECT_TRUE(f[9].empty());
  EXPECT_TRUE(f[10].empty());
  EXPECT_FALSE(f[11].empty());
}

TEST(RunPlan, EmptyAlgorithmListIsRejected) {
  auto plan = small_plan(false);
  plan.algorithms.clear();
  EXPECT_THROW(validate(plan), std::invalid_argument);
  EXPECT_THROW(run_plan(plan, 1), std::invalid_argument);
  EXPECT_THROW(parse_plan(nlohmann::json::parse(R"({"models":["er"],"n":[10],"algorithms":[]})")),
               std::invalid_argument);
}

TEST(RunPlan, DeterministicAcrossWorkerCounts) {
  auto plan = small_plan(true);
  plan.models = {GraphModel::BA, GraphModel::GE};
  plan.levels = {1, 2};
  plan.seeds_per_cell = 2;
  plan.algorithms = {Algorithm::Sub2W, Algorithm::P2W, Algorithm::P4W, Algorithm::P8W};
  plan.emit_artifacts = true;
  const auto a = run_plan_full(plan, 1);
  const auto b = run_plan_full(plan, 4);
  EXPECT_EQ(csv(a.rows, false), csv(b.rows, false));
  ASSERT_EQ(a.instances.size(), b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    EXPECT_EQ(a.instances[i].graph_text, b.instances[i].graph_text);
    EXPECT_EQ(a.instances[i].terminals_text, b.instances[i].terminals_text);
    EXPECT_EQ(a.instances[i].spanner_texts, b.instances[i].spanner_texts);
  }
}

TEST(RunPlan, InstanceSeedsAreDistinctPerCell) {
  const auto planned = enumerate_instances(small_plan(false));
  ASSERT_EQ(planned.size(), 20u);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < planned.size(); ++i) {
    EXPECT_EQ(planned[i].id, i);
    seeds.insert(planned[i].seed);
  }
  EXPECT_EQ(seeds.size(), planned.size());
}

TEST(RunPlan, ArtifactsReparse) {
  auto plan = small_plan(false);
  plan.sizes = {10};
  plan.seeds_per_cell = 1;
  plan.emit_artifacts = true;
  const auto res = run_plan_full(plan, 1);
  const auto dir = std::filesystem::temp_directory_path() / "mlspanner_bench_artifacts";
  std::filesystem::remove_all(dir);
  write_plan_outputs(dir, plan, res);
  for (const char* f : {"rows.csv", "summary_n.csv", "summary_l.csv", "summary_tsm.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto planned = enumerate_instances(plan);
  for (const auto& pi : planned) {
    std::ifstream gs(dir / "instances" / (std::to_string(pi.id) + ".graph"));
    const auto g = read_graph(gs);
    const auto inst = materialize(pi, ErrorBudget::global(2));
    EXPECT_EQ(graph_to_string(g), graph_to_string(inst.graph));
    for (const auto& r : res.rows) {
      if (r.instance_id != pi.id) continue;
      std::ifstream hs(dir / "spanners" / (std::to_string(pi.id) + "_" + r.algorithm + "_l1.graph"));
      ASSERT_TRUE(hs.good());
      EXPECT_EQ(read_edge_set(hs, g).size(), r.sparsity);
    }
  }
  std::ifstream rs(dir / "rows.csv");
  EXPECT_EQ(read_csv(rs).size(), res.rows.size());
  std::filesystem::remove_all(dir);
}

TEST(Csv, RoundTrip) {
  const auto rows = run_plan(small_plan(true), 1);
  const auto text = csv(rows, true);
  std::istringstream is(text);
  const auto back = read_csv(is);
  EXPECT_EQ(csv(back, true), text);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Csv, RejectsForeignHeader) {
  std::istringstream is("a,b,c\n1,2,3\n");
  EXPECT_THROW(read_csv(is), std::invalid_argument);
}

TEST(Summarize, SingleRow) {
  ResultRow r;
  r.n = 10;
  r.levels = 1;
  r.tsm = "linear";
  r.algorithm = "p2w";
  r.experimental_ratio = 1.25;
  r.relative_sparsity = 1.5;
  const auto s = summarize({r}, GroupKey::N);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].rows, 1u);
  EXPECT_EQ(s[0].ratio.min, 1.25);
  EXPECT_EQ(s[0].ratio.mean(), 1.25);
  EXPECT_EQ(s[0].ratio.max, 1.25);
  EXPECT_EQ(s[0].relative.min, 1.5);
  EXPECT_EQ(s[0].relative.max, 1.5);
  EXPECT_THROW(summarize({}, GroupKey::N), std::invalid_argument);
}

TEST(Summarize, TwoAlgorithmsOneInstance) {
  ExperimentPlan p = small_plan(false);
  p.sizes = {20};
  p.methods = {TerminalMethod::Linear};
  p.seeds_per_cell = 1;
  const auto rows = run_plan(p, 1);
  ASSERT_EQ(rows.size(), 2u);
  const auto& sparser = rows[0].sparsity <= rows[1].sparsity ? rows[0] : rows[1];
  EXPECT_EQ(*sparser.relative_sparsity, 1.0);
}

TEST(Summarize, GroupingOfFortyRowPlan) {
  const auto rows = run_plan(small_plan(true), 1);
  const auto by_n = summarize(rows, GroupKey::N);
  ASSERT_EQ(by_n.size(), 4u);
  EXPECT_EQ(by_n[0].group_value, "10");
  EXPECT_EQ(by_n[0].algorithm, "p2w");
  EXPECT_EQ(by_n[3].group_value, "20");
  EXPECT_EQ(by_n[3].algorithm, "sub2w");
  for (const auto& s : by_n) {
    double sum = 0, lo = 1e300, hi = -1e300;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (std::to_string(r.n) != s.group_value || r.algorithm != s.algorithm) continue;
      sum += *r.relative_sparsity;
      lo = std::min(lo, *r.relative_sparsity);
      hi = std::max(hi, *r.relative_sparsity);
      ++count;
    }
    EXPECT_EQ(s.rows, 10u);
    EXPECT_EQ(count, 10u);
    EXPECT_NEAR(s.relative.mean(), sum / static_cast<double>(count), 1e-12);
    EXPECT_EQ(s.relative.min, lo);
    EXPECT_EQ(s.relative.max, hi);
  }
  EXPECT_EQ(summarize(rows, GroupKey::Levels).size(), 2u);
  EXPECT_EQ(summarize(rows, GroupKey::Tsm).size(), 4u);

  std::ostringstream os;
  write_summary_csv(os, by_n, GroupKey::N);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 5u);
  EXPECT_EQ(parse_group("l"), GroupKey::Levels);
  EXPECT_THROW(parse_group("m"), std::invalid_argument);
}

TEST(Summarize, NumericGroupsSortNumerically) {
  std::vector<ResultRow> rows(2);
  rows[0].n = 100;
  rows[1].n = 20;
  for (auto& r : rows) r.algorithm = "p2w";
  const auto s = summarize(rows, GroupKey::N);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].group_value, "20");
  EXPECT_EQ(s[1].group_value, "100");
}

TEST(ParsePlan, DefaultsAndOverrides) {
  const auto p = parse_plan(nlohmann::json::parse(R"({"models":["er","ge"],"n":[10],"algorithms":["p8w"]})"));
  EXPECT_EQ(p.seeds_per_cell, 5u);
  EXPECT_EQ(p.levels, (std::vector<std::size_t>{1}));
  EXPECT_EQ(p.methods.size(), 2u);
  EXPECT_FALSE(p.exact);
  EXPECT_EQ(p.strategy, Strategy::RoundUp);

  const auto q = parse_plan(nlohmann::json::parse(R"({
    "models":["ba"], "n":[20,30], "levels":[2,3], "tsm":["exp"], "algorithms":["sub2w","p4w"],
    "strategy":"naive", "seeds_per_cell":2, "base_seed":9,
    "exact":{"enabled":true,"max_edges_single":12,"max_edges_multi":8,"max_work":1000},
    "max_retries":3, "d":4, "d_sweep":true, "p8w_subroutine":"plus4w", "emit_artifacts":true})"));
  EXPECT_EQ(q.strategy, Strategy::Naive);
  EXPECT_EQ(q.seeds_per_cell, 2u);
  EXPECT_EQ(q.base_seed, 9u);
  EXPECT_TRUE(q.exact);
  EXPECT_EQ(q.caps.max_edges_single, 12u);
  EXPECT_EQ(q.caps.max_edges_multi, 8u);
  EXPECT_EQ(q.caps.max_work, 1000.0);
  EXPECT_EQ(q.options.max_retries, 3u);
  EXPECT_EQ(q.options.d_override, std::optional<std::size_t>(4));
  EXPECT_TRUE(q.options.d_sweep);
  EXPECT_TRUE(q.emit_artifacts);
  EXPECT_EQ(advertised_budget(Algorithm::P8W, q.options).label(), "global:8");

  EXPECT_THROW(parse_plan(nlohmann::json::parse(R"({"models":["zz"],"n":[10],"algorithms":["p2w"]})")),
               std::invalid_argument);
  EXPECT_THROW(parse_plan(nlohmann::json::parse(R"({"models":["er"],"n":[10],"algorithms":["p2w"],"seeds_per_cell":0})")),
               std::invalid_argument);
}
