#pragma once

// Experiment harness: instance sweeps, algorithm comparison against the exact
// optimum, relative sparsity, CSV emission and grouped summaries.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mlspanner/algorithms.hpp"
#include "mlspanner/exact.hpp"
#include "mlspanner/generators.hpp"
#include "mlspanner/multilevel.hpp"

namespace mlspanner {

/// Raised when a construction emits an invalid spanner. This is a bug in the
/// construction, never a data outcome.
class ValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentPlan {
  std::vector<GraphModel> models;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> levels;
  std::vector<TerminalMethod> methods;
  std::vector<Algorithm> algorithms;
  Strategy strategy = Strategy::RoundUp;
  std::size_t seeds_per_cell = 5;
  std::uint64_t base_seed = 1;
  bool exact = false;
  ExactCaps caps;
  AlgorithmOptions options;
  bool emit_artifacts = false;
};

inline void validate(const ExperimentPlan& p) {
  if (p.algorithms.empty()) throw std::invalid_argument("plan has no algorithms");
  if (p.models.empty() || p.sizes.empty() || p.levels.empty() || p.methods.empty())
    throw std::invalid_argument("plan needs at least one model, size, level count and terminal method");
  if (p.seeds_per_cell == 0) throw std::invalid_argument("seeds_per_cell must be >= 1");
  for (auto l : p.levels)
    if (l == 0) throw std::invalid_argument("level counts must be >= 1");
}

/// plan.json:
/// {
///   "models": ["er","ws","ba","ge"], "n": [10, 20], "levels": [1, 2],
///   "tsm": ["linear","exp"], "algorithms": ["sub2w","p2w","p4w","p8w"],
///   "strategy": "roundup", "seeds_per_cell": 5, "base_seed": 1,
///   "exact": {"enabled": true, "max_edges_single": 20, "max_edges_multi": 14},
///   "max_retries": 10, "d": null, "d_sweep": false,
///   "p8w_subroutine": "plus2w", "emit_artifacts": false
/// }
inline ExperimentPlan parse_plan(const nlohmann::json& j) {
  ExperimentPlan p;
  for (const auto& m : j.at("models")) p.models.push_back(parse_model(m.get<std::string>()));
  for (const auto& n : j.at("n")) p.sizes.push_back(n.get<std::size_t>());
  p.levels = j.value("levels", std::vector<std::size_t>{1});
  for (const auto& t : j.value("tsm", std::vector<std::string>{"linear", "exp"})) p.methods.push_back(parse_tsm(t));
  for (const auto& a : j.at("algorithms")) p.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  p.strategy = parse_strategy(j.value("strategy", std::string("roundup")));
  p.seeds_per_cell = j.value("seeds_per_cell", std::size_t{5});
  p.base_seed = j.value("base_seed", std::uint64_t{1});
  if (j.contains("exact")) {
    const auto& e = j["exact"];
    if (e.is_boolean()) {
      p.exact = e.get<bool>();
    } else {
      p.exact = e.value("enabled", false);
      p.caps.max_edges_single = e.value("max_edges_single", p.caps.max_edges_single);
      p.caps.max_edges_multi = e.value("max_edges_multi", p.caps.max_edges_multi);
      p.caps.max_work = e.value("max_work", p.caps.max_work);
    }
  }
  p.options.max_retries = j.value("max_retries", p.options.max_retries);
  if (j.contains("d") && !j["d"].is_null()) p.options.d_override = j["d"].get<std::size_t>();
  p.options.d_sweep = j.value("d_sweep", false);
  const auto sub = j.value("p8w_subroutine", std::string("plus2w"));
  if (sub == "plus2w") {
    p.options.p8w_subroutine = SubsetwiseChoice::Plus2W;
  } else if (sub == "plus4w") {
    p.options.p8w_subroutine = SubsetwiseChoice::Plus4WRelabel;
  } else {
    throw std::invalid_argument("p8w_subroutine must be plus2w or plus4w");
  }
  p.emit_artifacts = j.value("emit_artifacts", false);
  validate(p);
  return p;
}

struct ResultRow {
  std::size_t instance_id = 0;
  std::string generator;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t levels = 0;
  std::string tsm;
  std::string algorithm;
  std::string budget;
  std::size_t sparsity = 0;
  std::optional<std::size_t> exact_sparsity;
  std::optional<double> experimental_ratio;
  std::optional<double> relative_sparsity;
  double wall_ms = 0;
  std::uint64_t seed = 0;
  bool valid = false;
};

/// One generated instance of a plan cell.
struct PlannedInstance {
  std::size_t id;
  GraphModel model;
  std::size_t n;
  std::size_t levels;
  TerminalMethod method;
  std::uint64_t seed;
};

inline std::vector<PlannedInstance> enumerate_instances(const ExperimentPlan& p) {
  std::vector<PlannedInstance> out;
  for (auto model : p.models)
    for (auto n : p.sizes)
      for (auto l : p.levels)
        for (auto tsm : p.methods)
          for (std::size_t rep = 0; rep < p.seeds_per_cell; ++rep) {
            const std::string cell = std::string(to_string(model)) + "/" + std::to_string(n) + "/" +
                                     std::to_string(l) + "/" + std::string(to_string(tsm));
            out.push_back({out.size(), model, n, l, tsm, derive_seed(p.base_seed, cell, rep)});
          }
  return out;
}

inline MultiLevelInstance materialize(const PlannedInstance& pi, ErrorBudget budget) {
  GeneratorSpec spec;
  spec.model = pi.model;
  spec.n = pi.n;
  spec.seed = pi.seed;
  MultiLevelInstance inst;
  inst.graph = generate(spec);
  inst.terminal_sets = generate_terminals(pi.n, {pi.method, pi.levels, pi.seed});
  inst.budget = budget;
  return inst;
}

/// Throws ValidityError unless `sp` is nested and valid at every level.
inline void require_valid(const MultiLevelInstance& inst, const PathTable& pt, const MultiLevelSpanner& sp,
                          const std::string& what) {
  if (!sp.nested()) throw ValidityError(what + ": level edge sets are not nested");
  const auto bad = verify_multilevel(inst, pt, sp);
  if (!bad.empty()) {
    const auto& first = bad.front();
    throw ValidityError(what + ": level " + std::to_string(first.level) + " violates " + inst.budget.label() +
                        " on " + std::to_string(first.violations.size()) + " pair(s), first (" +
                        std::to_string(first.violations[0].first) + "," +
                        std::to_string(first.violations[0].second) + ")");
  }
}

struct InstanceOutcome {
  std::vector<ResultRow> rows;
  std::string graph_text;
  std::string terminals_text;
  std::vector<std::pair<std::string, std::string>> spanner_texts;  // (file stem, text)
};

inline InstanceOutcome run_instance(const ExperimentPlan& plan, const PlannedInstance& pi) {
  InstanceOutcome out;
  MultiLevelInstance inst = materialize(pi, ErrorBudget::global(2));
  const PathTable pt(inst.graph);
  {
    std::ostringstream gs, ts;
    write_graph(gs, inst.graph);
    write_terminals(ts, inst.terminal_sets);
    out.graph_text = gs.str();
    out.terminals_text = ts.str();
  }

  std::map<std::string, std::optional<std::size_t>> exact_by_budget;
  for (Algorithm a : plan.algorithms) {
    const ErrorBudget budget = advertised_budget(a, plan.options);
    inst.budget = budget;
    const auto solver = make_solver(a, inst.graph, pt, plan.options);
    const auto t0 = std::chrono::steady_clock::now();
    const MultiLevelSpanner sp = build_multilevel(inst, solver, plan.strategy, pi.seed);
    const auto t1 = std::chrono::steady_clock::now();
    require_valid(inst, pt, sp, "instance " + std::to_string(pi.id) + " " + std::string(to_string(a)));

    ResultRow row;
    row.instance_id = pi.id;
    row.generator = std::string(to_string(pi.model));
    row.n = pi.n;
    row.m = inst.graph.num_edges();
    row.levels = pi.levels;
    row.tsm = std::string(to_string(pi.method));
    row.algorithm = std::string(to_string(a));
    row.budget = budget.label();
    row.sparsity = sp.sparsity();
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.seed = pi.seed;
    row.valid = true;

    if (plan.exact) {
      auto it = exact_by_budget.find(budget.label());
      if (it == exact_by_budget.end()) {
        std::optional<std::size_t> value;
        try {
          const auto opt = exact_optimum(inst, pt, plan.caps);
          require_valid(inst, pt, opt, "instance " + std::to_string(pi.id) + " exact");
          value = opt.sparsity();
        } catch (const SizeCapExceeded&) {
        }
        it = exact_by_budget.emplace(budget.label(), value).first;
      }
      row.exact_sparsity = it->second;
      if (row.exact_sparsity) {
        row.experimental_ratio = *row.exact_sparsity == 0
                                     ? (row.sparsity == 0 ? 1.0 : HUGE_VAL)
                                     : static_cast<double>(row.sparsity) / static_cast<double>(*row.exact_sparsity);
      }
    }
    if (plan.emit_artifacts) {
      for (std::size_t k = 0; k < sp.levels(); ++k) {
        std::ostringstream hs;
        write_edge_set(hs, inst.graph, sp.level_edges[k]);
        out.spanner_texts.emplace_back(
            std::to_string(pi.id) + "_" + row.algorithm + "_l" + std::to_string(k + 1), hs.str());
      }
    }
    out.rows.push_back(std::move(row));
  }

  std::size_t best = SIZE_MAX;
  for (const auto& r : out.rows) best = std::min(best, r.sparsity);
  for (auto& r : out.rows)
    r.relative_sparsity = best == 0 ? (r.sparsity == 0 ? 1.0 : HUGE_VAL)
                                    : static_cast<double>(r.sparsity) / static_cast<double>(best);
  return out;
}

/// Worker count from MLSPANNER_WORKERS (default 1).
inline std::size_t worker_count() {
  if (const char* env = std::getenv("MLSPANNER_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

struct PlanResult {
  std::vector<ResultRow> rows;
  std::vector<InstanceOutcome> instances;  // indexed by instance id
};

/// Runs every instance of the plan. Rows come back sorted by
/// (instance id, algorithm name).
inline PlanResult run_plan_full(const ExperimentPlan& plan, std::size_t workers = worker_count()) {
  validate(plan);
  const auto planned = enumerate_instances(plan);
  PlanResult res;
  res.instances.resize(planned.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= planned.size()) return;
      try {
        res.instances[i] = run_instance(plan, planned[i]);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!error) error = std::current_exception();
        next.store(planned.size());
        return;
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, planned.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  for (const auto& inst : res.instances) res.rows.insert(res.rows.end(), inst.rows.begin(), inst.rows.end());
  std::sort(res.rows.begin(), res.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.instance_id, a.algorithm) < std::tie(b.instance_id, b.algorithm);
  });
  return res;
}

inline std::vector<ResultRow> run_plan(const ExperimentPlan& plan, std::size_t workers = worker_count()) {
  return run_plan_full(plan, workers).rows;
}

inline constexpr const char* kCsvHeader =
    "instance_id,generator,n,m,levels,tsm,algorithm,budget,sparsity,exact_sparsity,experimental_ratio,"
    "relative_sparsity,wall_ms,seed,valid";

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// CSV with header, LF line endings. `with_wall = false` blanks the wall-time
/// column, which is the only nondeterministic field.
inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool with_wall = true) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.instance_id << ',' << r.generator << ',' << r.n << ',' << r.m << ',' << r.levels << ',' << r.tsm << ','
       << r.algorithm << ',' << r.budget << ',' << r.sparsity << ','
       << (r.exact_sparsity ? std::to_string(*r.exact_sparsity) : "") << ','
       << (r.experimental_ratio ? detail::fixed(*r.experimental_ratio, 6) : "") << ','
       << (r.relative_sparsity ? detail::fixed(*r.relative_sparsity, 6) : "") << ','
       << (with_wall ? detail::fixed(r.wall_ms, 3) : "") << ',' << r.seed << ',' << (r.valid ? "true" : "false")
       << '\n';
  }
}

inline std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 15) throw std::invalid_argument("CSV row with " + std::to_string(f.size()) + " fields");
    ResultRow r;
    r.instance_id = std::stoull(f[0]);
    r.generator = f[1];
    r.n = std::stoull(f[2]);
    r.m = std::stoull(f[3]);
    r.levels = std::stoull(f[4]);
    r.tsm = f[5];
    r.algorithm = f[6];
    r.budget = f[7];
    r.sparsity = std::stoull(f[8]);
    if (!f[9].empty()) r.exact_sparsity = std::stoull(f[9]);
    if (!f[10].empty()) r.experimental_ratio = std::stod(f[10]);
    if (!f[11].empty()) r.relative_sparsity = std::stod(f[11]);
    if (!f[12].empty()) r.wall_ms = std::stod(f[12]);
    r.seed = std::stoull(f[13]);
    r.valid = f[14] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

enum class GroupKey { N, Levels, Tsm };

inline GroupKey parse_group(std::string_view s) {
  if (s == "n") return GroupKey::N;
  if (s == "l" || s == "levels") return GroupKey::Levels;
  if (s == "tsm") return GroupKey::Tsm;
  throw std::invalid_argument("group must be n, l or tsm");
}

struct Aggregate {
  std::size_t count = 0;
  double min = 0, max = 0, sum = 0;

  void add(double v) {
    if (count == 0) min = max = v;
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

struct SummaryRow {
  std::string group_value;
  std::string algorithm;
  std::size_t rows = 0;
  Aggregate ratio;
  Aggregate relative;
};

/// Min/mean/max of experimental ratio and relative sparsity per
/// (group value, algorithm). Numeric groups sort numerically.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, GroupKey key) {
  if (rows.empty()) throw std::invalid_argument("nothing to summarize");
  using Key = std::tuple<std::size_t, std::string, std::string>;
  std::map<Key, SummaryRow> groups;
  for (const auto& r : rows) {
    std::size_t num = 0;
    std::string text;
    switch (key) {
      case GroupKey::N: num = r.n; text = std::to_string(r.n); break;
      case GroupKey::Levels: num = r.levels; text = std::to_string(r.levels); break;
      case GroupKey::Tsm: text = r.tsm; break;
    }
    auto& s = groups[{num, text, r.algorithm}];
    s.group_value = text;
    s.algorithm = r.algorithm;
    ++s.rows;
    if (r.experimental_ratio) s.ratio.add(*r.experimental_ratio);
    if (r.relative_sparsity) s.relative.add(*r.relative_sparsity);
  }
  std::vector<SummaryRow> out;
  for (auto& [_, s] : groups) out.push_back(std::move(s));
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& summary, GroupKey key) {
  const char* name = key == GroupKey::N ? "n" : key == GroupKey::Levels ? "levels" : "tsm";
  os << name << ",algorithm,rows,ratio_min,ratio_mean,ratio_max,relative_min,relative_mean,relative_max\n";
  auto cells = [&](const Aggregate& a) {
    if (a.count == 0) return std::string(",,");
    return detail::fixed(a.min, 6) + "," + detail::fixed(a.mean(), 6) + "," + detail::fixed(a.max, 6);
  };
  for (const auto& s : summary)
    os << s.group_value << ',' << s.algorithm << ',' << s.rows << ',' << cells(s.ratio) << ',' << cells(s.relative)
       << '\n';
}

/// Writes rows.csv (and instances/ + spanners/ when artifacts are on) under `dir`.
inline void write_plan_outputs(const std::filesystem::path& dir, const ExperimentPlan& plan, const PlanResult& res) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "rows.csv", std::ios::binary);
    write_csv(os, res.rows);
  }
  for (auto key : {GroupKey::N, GroupKey::Levels, GroupKey::Tsm}) {
    const char* name = key == GroupKey::N ? "summary_n.csv" : key == GroupKey::Levels ? "summary_l.csv" : "summary_tsm.csv";
    std::ofstream os(dir / name, std::ios::binary);
    write_summary_csv(os, summarize(res.rows, key), key);
  }
  if (!plan.emit_artifacts) return;
  std::filesystem::create_directories(dir / "instances");
  std::filesystem::create_directories(dir / "spanners");
  for (std::size_t i = 0; i < res.instances.size(); ++i) {
    std::ofstream(dir / "instances" / (std::to_string(i) + ".graph"), std::ios::binary) << res.instances[i].graph_text;
    std::ofstream(dir / "instances" / (std::to_string(i) + ".terminals"), std::ios::binary)
        << res.instances[i].terminals_text;
    for (const auto& [stem, text] : res.instances[i].spanner_texts)
      std::ofstream(dir / "spanners" / (stem + ".graph"), std::ios::binary) << text;
  }
}

}  // namespace mlspanner
