// bench: command-line front end for generators, spanner constructions, the
// exact solver, ILP emission and the experiment harness.
//
// Exit codes: 0 ok, 1 bad input, 2 invalid spanner (a bug), 3 exact size cap.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlspanner/mlspanner.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mlspanner;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCap = 3;

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open " + path);
  return is;
}

WeightedGraph load_graph(const std::string& path) {
  auto is = open_in(path);
  return read_graph(is);
}

std::vector<std::vector<Vertex>> load_terminals(const std::string& path) {
  auto is = open_in(path);
  return read_terminals(is);
}

std::vector<VertexPair> load_pairs(const std::string& path) {
  auto is = open_in(path);
  std::vector<VertexPair> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u >> v) || u < 0 || v < 0) throw GraphFormatError("bad pair line: " + line);
    out.emplace_back(static_cast<Vertex>(std::min(u, v)), static_cast<Vertex>(std::max(u, v)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot write " + path);
  os << text;
}

std::string edge_set_text(const WeightedGraph& g, const EdgeSet& h) {
  std::ostringstream os;
  write_edge_set(os, g, h);
  return os.str();
}

class InvalidOutput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_pairs(const WeightedGraph& g, const EdgeSet& h, const std::vector<VertexPair>& pairs, ErrorBudget b,
                 const PathTable& pt) {
  const auto bad = verify_spanner(g, h, pairs, b, pt);
  if (!bad.empty())
    throw InvalidOutput(std::to_string(bad.size()) + " pairs violate " + b.label() + ", first " +
                        std::to_string(bad[0].first) + "-" + std::to_string(bad[0].second));
}

struct AlgoFlags {
  std::string algo = "p2w";
  std::optional<std::size_t> d;
  std::size_t retries = 10;
  bool d_sweep = false;
  std::string p8w_subroutine = "plus2w";

  void attach(CLI::App* app, bool with_sub2w) {
    app->add_option("--algo", algo, "construction")
        ->check(with_sub2w ? CLI::IsMember({"sub2w", "p2w", "p4w", "p8w"}) : CLI::IsMember({"p2w", "p4w", "p8w"}));
    app->add_option("--d", d, "override the d-light parameter")->check(CLI::PositiveNumber);
    app->add_option("--retries", retries, "maximum sampling retries");
    app->add_flag("--d-sweep", d_sweep, "try d, d/2, ..., 1 and keep the sparsest");
    app->add_option("--p8w-subroutine", p8w_subroutine, "subsetwise routine inside p8w")
        ->check(CLI::IsMember({"plus2w", "plus4w"}));
  }

  AlgorithmOptions options() const {
    AlgorithmOptions o;
    o.max_retries = retries;
    o.d_override = d;
    o.d_sweep = d_sweep;
    o.p8w_subroutine = p8w_subroutine == "plus4w" ? SubsetwiseChoice::Plus4WRelabel : SubsetwiseChoice::Plus2W;
    return o;
  }
};

json pairwise_report_json(const PairwiseReport& r) {
  json passes = json::array();
  for (const auto& p : r.passes)
    passes.push_back({{"attempt", p.attempt},
                      {"sampled_vertices", p.sampled_vertices},
                      {"violating_pairs", p.violating_pairs},
                      {"missing_edges", p.missing_edges}});
  return {{"d", r.d}, {"ell", r.ell}, {"init_size", r.init_size}, {"fallback", r.fallback}, {"passes", passes}};
}

int cmd_generate(const std::string& model, std::size_t n, std::uint64_t seed, std::size_t levels,
                 const std::string& tsm, Weight wmin, Weight wmax, const std::string& out) {
  GeneratorSpec spec;
  spec.model = parse_model(model);
  spec.n = n;
  spec.seed = seed;
  spec.min_weight = wmin;
  spec.max_weight = wmax;
  const auto g = generate(spec);
  const auto terms = generate_terminals(n, {parse_tsm(tsm), levels, seed});
  std::ostringstream ts;
  write_terminals(ts, terms);
  write_text(out + ".graph", graph_to_string(g));
  write_text(out + ".terminals", ts.str());
  json sizes = json::array();
  for (const auto& t : terms) sizes.push_back(t.size());
  std::cout << json{{"n", n}, {"m", g.num_edges()}, {"max_weight", g.max_weight()}, {"terminal_sizes", sizes}}.dump()
            << '\n';
  return 0;
}

int cmd_spanner(const std::string& graph_path, const std::string& terms_path, const std::string& pairs_path,
                std::size_t level, std::uint64_t seed, const AlgoFlags& flags, const std::string& out,
                const std::string& report_path) {
  const auto g = load_graph(graph_path);
  const PathTable pt(g);
  const Algorithm a = parse_algorithm(flags.algo);
  const auto opt = flags.options();
  json report{{"algorithm", flags.algo}, {"seed", seed}};
  EdgeSet h;
  std::vector<VertexPair> pairs;
  std::vector<Vertex> terms;
  if (!pairs_path.empty()) {
    if (a == Algorithm::Sub2W) throw std::invalid_argument("sub2w takes --terminals, not --pairs");
    pairs = load_pairs(pairs_path);
  } else {
    if (terms_path.empty()) throw std::invalid_argument("need --terminals or --pairs");
    const auto levels = load_terminals(terms_path);
    if (level == 0 || level > levels.size()) throw std::invalid_argument("--level out of range");
    terms = levels[level - 1];
    pairs = all_pairs(terms);
  }
  const ErrorBudget budget = advertised_budget(a, opt);
  if (a == Algorithm::Sub2W) {
    const auto res = subsetwise_2w_run(g, terms, pt);
    h = res.edges;
    json audit = json::array();
    for (const auto& r : res.audit)
      audit.push_back({{"u", r.u}, {"v", r.v}, {"cost", r.cost}, {"value", r.value}, {"bought", r.bought}});
    report["threshold"] = res.clustering.threshold;
    report["clusters"] = res.clustering.clusters.size();
    report["clustered_subgraph_size"] = res.clustering.subgraph.size();
    report["audit"] = audit;
  } else {
    const auto params = pairwise_params(a, opt, seed);
    if (opt.d_sweep) {
      const std::size_t base = resolve_parameters(params, g.num_vertices(), pairs.size()).d;
      const auto sw = d_sweep(g, pairs, params, pt, base);
      h = sw.best;
      json ladder = json::array();
      for (const auto& [d, size] : sw.ladder) ladder.push_back({{"d", d}, {"size", size}});
      report["best_d"] = sw.best_d;
      report["ladder"] = ladder;
    } else {
      const auto res = pairwise_spanner(g, pairs, params, pt);
      h = res.edges;
      report.update(pairwise_report_json(res.report));
    }
  }
  check_pairs(g, h, pairs, budget, pt);
  report["budget"] = budget.label();
  report["pairs"] = pairs.size();
  report["size"] = h.size();
  report["valid"] = true;
  write_text(out, edge_set_text(g, h));
  const std::string text = report.dump(2) + "\n";
  if (report_path.empty()) {
    if (out != "-") std::cout << text;
  } else {
    write_text(report_path, text);
  }
  return 0;
}

int cmd_multilevel(const std::string& graph_path, const std::string& terms_path, const std::string& strategy,
                   std::uint64_t seed, const AlgoFlags& flags, const std::string& out_dir) {
  MultiLevelInstance inst{load_graph(graph_path), load_terminals(terms_path), {}};
  const PathTable pt(inst.graph);
  const Algorithm a = parse_algorithm(flags.algo);
  const auto opt = flags.options();
  inst.budget = advertised_budget(a, opt);
  const auto sp = build_multilevel(inst, make_solver(a, inst.graph, pt, opt), parse_strategy(strategy), seed);
  require_valid(inst, pt, sp, "multilevel " + flags.algo);
  json sizes = json::array();
  for (std::size_t k = 0; k < sp.levels(); ++k) {
    sizes.push_back(sp.level_edges[k].size());
    write_text((fs::path(out_dir) / ("level_" + std::to_string(k + 1) + ".graph")).string(),
               edge_set_text(inst.graph, sp.level_edges[k]));
  }
  const json summary{{"algorithm", flags.algo},   {"strategy", strategy},       {"budget", inst.budget.label()},
                     {"seed", seed},              {"level_sizes", sizes},       {"sparsity", sp.sparsity()},
                     {"valid", true}};
  write_text((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_exact(const std::string& graph_path, const std::string& terms_path, const std::string& budget,
              const ExactCaps& caps, const std::string& out_dir) {
  MultiLevelInstance inst{load_graph(graph_path), load_terminals(terms_path), parse_budget(budget)};
  const PathTable pt(inst.graph);
  const auto opt = exact_optimum(inst, pt, caps);
  require_valid(inst, pt, opt, "exact");
  json sizes = json::array();
  for (std::size_t k = 0; k < opt.levels(); ++k) {
    sizes.push_back(opt.level_edges[k].size());
    if (!out_dir.empty())
      write_text((fs::path(out_dir) / ("level_" + std::to_string(k + 1) + ".graph")).string(),
                 edge_set_text(inst.graph, opt.level_edges[k]));
  }
  std::cout << json{{"budget", inst.budget.label()}, {"m", inst.graph.num_edges()}, {"level_sizes", sizes},
                    {"sparsity", opt.sparsity()}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_emit_ilp(const std::string& graph_path, const std::string& terms_path, const std::string& budget,
                 const std::string& out) {
  MultiLevelInstance inst{load_graph(graph_path), load_terminals(terms_path), parse_budget(budget)};
  const auto model = build_ilp(inst, PathTable(inst.graph));
  write_text(out, emit_lp(model));
  if (out != "-")
    std::cout << json{{"variables", model.variables.size()}, {"constraints", model.constraints.size()}}.dump() << '\n';
  return 0;
}

int cmd_run(const std::string& plan_path, const std::string& out_dir, std::optional<std::size_t> workers) {
  auto is = open_in(plan_path);
  const auto plan = parse_plan(json::parse(is));
  const auto res = run_plan_full(plan, workers.value_or(worker_count()));
  write_plan_outputs(out_dir, plan, res);
  std::size_t with_exact = 0;
  for (const auto& r : res.rows) with_exact += r.exact_sparsity.has_value();
  std::cout << json{{"instances", res.instances.size()}, {"rows", res.rows.size()}, {"rows_with_exact", with_exact},
                    {"out", out_dir}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_summarize(const std::string& in, const std::string& group, const std::string& out) {
  auto is = open_in(in);
  const auto key = parse_group(group);
  std::ostringstream os;
  write_summary_csv(os, summarize(read_csv(is), key), key);
  write_text(out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive spanner constructions, exact solver and benchmark harness"};
  app.require_subcommand(1);

  std::string model = "er", tsm = "linear", out = "-", graph_path, terms_path, pairs_path, report_path;
  std::string strategy = "roundup", budget = "global:2", plan_path, in_path, group = "n";
  std::size_t n = 10, levels = 1, level = 1;
  std::uint64_t seed = 0;
  Weight wmin = 1, wmax = 10;
  std::optional<std::size_t> workers;
  ExactCaps caps;
  AlgoFlags sp_flags, ml_flags;
  sp_flags.algo = "sub2w";

  auto* gen = app.add_subcommand("generate", "random instance: <out>.graph and <out>.terminals");
  gen->add_option("--model", model, "er|ws|ba|ge")->check(CLI::IsMember({"er", "ws", "ba", "ge"}));
  gen->add_option("--n", n, "vertex count")->required();
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--levels", levels, "terminal levels")->check(CLI::PositiveNumber);
  gen->add_option("--tsm", tsm, "terminal selection")->check(CLI::IsMember({"linear", "exp"}));
  gen->add_option("--min-weight", wmin, "smallest edge weight");
  gen->add_option("--max-weight", wmax, "largest edge weight");
  gen->add_option("--out", out, "output path stem")->required();

  auto* spn = app.add_subcommand("spanner", "single-level spanner over a terminal level or a pair list");
  spn->add_option("--graph", graph_path, "graph file")->required();
  spn->add_option("--terminals", terms_path, "terminals file");
  spn->add_option("--pairs", pairs_path, "pair list, one 'u v' per line (pairwise algorithms)");
  spn->add_option("--level", level, "terminal level to use");
  spn->add_option("--seed", seed, "seed");
  spn->add_option("--out", out, "spanner graph file, '-' for stdout");
  spn->add_option("--report", report_path, "JSON report path (default stdout when --out is a file)");
  sp_flags.attach(spn, true);

  auto* ml = app.add_subcommand("multilevel", "multi-level spanner");
  ml->add_option("--graph", graph_path, "graph file")->required();
  ml->add_option("--terminals", terms_path, "terminals file")->required();
  ml->add_option("--strategy", strategy, "roundup|naive")->check(CLI::IsMember({"roundup", "naive"}));
  ml->add_option("--seed", seed, "seed");
  ml->add_option("--out", out, "output directory")->required();
  ml_flags.attach(ml, true);

  auto add_caps = [&](CLI::App* c) {
    c->add_option("--max-edges-single", caps.max_edges_single, "edge cap for one level");
    c->add_option("--max-edges-multi", caps.max_edges_multi, "edge cap for several levels");
    c->add_option("--max-work", caps.max_work, "bound on (l+1)^m");
  };
  std::string exact_out;
  auto* ex = app.add_subcommand("exact", "exact minimum-sparsity spanner");
  ex->add_option("--graph", graph_path, "graph file")->required();
  ex->add_option("--terminals", terms_path, "terminals file")->required();
  ex->add_option("--budget", budget, "global:<c> or local:<c>");
  ex->add_option("--out", exact_out, "directory for per-level graph files");
  add_caps(ex);

  auto* ilp = app.add_subcommand("emit-ilp", "write the ILP in LP format");
  ilp->add_option("--graph", graph_path, "graph file")->required();
  ilp->add_option("--terminals", terms_path, "terminals file")->required();
  ilp->add_option("--budget", budget, "global:<c> or local:<c>");
  ilp->add_option("--out", out, "LP file, '-' for stdout")->required();

  auto* run = app.add_subcommand("run", "run an experiment plan");
  run->add_option("--plan", plan_path, "plan.json")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--workers", workers, "worker threads (default MLSPANNER_WORKERS or 1)")->check(CLI::PositiveNumber);

  auto* sum = app.add_subcommand("summarize", "grouped aggregates of rows.csv");
  sum->add_option("--in", in_path, "rows.csv")->required();
  sum->add_option("--group", group, "n|l|tsm")->check(CLI::IsMember({"n", "l", "tsm"}));
  sum->add_option("--out", out, "output CSV, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(model, n, seed, levels, tsm, wmin, wmax, out);
    if (*spn) return cmd_spanner(graph_path, terms_path, pairs_path, level, seed, sp_flags, out, report_path);
    if (*ml) return cmd_multilevel(graph_path, terms_path, strategy, seed, ml_flags, out);
    if (*ex) return cmd_exact(graph_path, terms_path, budget, caps, exact_out);
    if (*ilp) return cmd_emit_ilp(graph_path, terms_path, budget, out);
    if (*run) return cmd_run(plan_path, out, workers);
    if (*sum) return cmd_summarize(in_path, group, out);
  } catch (const SizeCapExceeded& e) {
    std::cerr << "size cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const InvalidOutput& e) {
    std::cerr << "invalid spanner: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ValidityError& e) {
    std::cerr << "invalid spanner: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
