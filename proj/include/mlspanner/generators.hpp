#pragma once

// Seeded random instances: Erdos-Renyi, Watts-Strogatz, Barabasi-Albert and
// random geometric graphs with uniform integer weights, plus nested terminal
// sets.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlspanner/graph.hpp"
#include "mlspanner/rng.hpp"

namespace mlspanner {

enum class GraphModel { ER, WS, BA, GE };

inline std::string_view to_string(GraphModel m) {
  switch (m) {
    case GraphModel::ER: return "er";
    case GraphModel::WS: return "ws";
    case GraphModel::BA: return "ba";
    case GraphModel::GE: return "ge";
  }
  return "?";
}

inline GraphModel parse_model(std::string_view s) {
  if (s == "er" || s == "ER") return GraphModel::ER;
  if (s == "ws" || s == "WS") return GraphModel::WS;
  if (s == "ba" || s == "BA") return GraphModel::BA;
  if (s == "ge" || s == "GE") return GraphModel::GE;
  throw std::invalid_argument("unknown graph model '" + std::string(s) + "'");
}

struct GeneratorSpec {
  GraphModel model = GraphModel::ER;
  std::size_t n = 10;
  std::uint64_t seed = 0;
  double er_epsilon = 1.0;
  int ws_k = 6;
  double ws_p = 0.2;
  int ba_m = 5;
  double ge_epsilon = 1.0;
  Weight min_weight = 1;
  Weight max_weight = 10;
};

inline constexpr int kMaxConnectivityAttempts = 100;

namespace detail {

using PairList = std::vector<std::pair<Vertex, Vertex>>;

inline PairList erdos_renyi(std::size_t n, double epsilon, Rng& rng) {
  const double p = std::min(1.0, (1.0 + epsilon) * std::log(static_cast<double>(n)) / static_cast<double>(n));
  PairList out;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.coin(p)) out.emplace_back(u, v);
  return out;
}

inline PairList watts_strogatz(std::size_t n, int k, double p, Rng& rng) {
  std::vector<char> adj(n * n, 0);
  std::vector<std::ptrdiff_t> deg(n, 0);
  auto link = [&](Vertex a, Vertex b, char on) {
    adj[a * n + b] = adj[b * n + a] = on;
    deg[a] += on ? 1 : -1;
    deg[b] += on ? 1 : -1;
  };
  const int half = k / 2;
  for (Vertex u = 0; u < n; ++u)
    for (int j = 1; j <= half; ++j) link(u, static_cast<Vertex>((u + j) % n), 1);

  // Rewire each clockwise lattice edge (u, u+j) with probability p.
  for (int j = 1; j <= half; ++j) {
    for (Vertex u = 0; u < n; ++u) {
      const Vertex v = static_cast<Vertex>((u + j) % n);
      if (!adj[u * n + v] || !rng.coin(p)) continue;
      if (deg[u] >= static_cast<std::ptrdiff_t>(n) - 1) continue;
      Vertex w;
      do {
        w = static_cast<Vertex>(rng.below(n));
      } while (w == u || adj[u * n + w]);
      link(u, v, 0);
      link(u, w, 1);
    }
  }
  PairList out;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (adj[u * n + v]) out.emplace_back(u, v);
  return out;
}

inline PairList barabasi_albert(std::size_t n, int m, Rng& rng) {
  PairList out;
  std::vector<std::uint64_t> deg(n, 0);
  const auto core = static_cast<Vertex>(m);
  for (Vertex u = 0; u < core; ++u)
    for (Vertex v = u + 1; v < core; ++v) {
      out.emplace_back(u, v);
      ++deg[u];
      ++deg[v];
    }
  std::vector<char> taken(n, 0);
  for (Vertex v = core; v < n; ++v) {
    std::vector<Vertex> targets;
    std::uint64_t total = 0;
    for (Vertex u = 0; u < v; ++u) total += deg[u];
    for (int draw = 0; draw < m; ++draw) {
      Vertex pick = 0;
      if (total == 0) {
        // No degree mass left (isolated seed): uniform over untaken.
        std::vector<Vertex> free;
        for (Vertex u = 0; u < v; ++u)
          if (!taken[u]) free.push_back(u);
        pick = free[rng.below(free.size())];
      } else {
        std::uint64_t r = rng.below(total);
        for (Vertex u = 0; u < v; ++u) {
          if (taken[u]) continue;
          if (r < deg[u]) {
            pick = u;
            break;
          }
          r -= deg[u];
        }
      }
      taken[pick] = 1;
      total -= deg[pick];
      targets.push_back(pick);
    }
    for (Vertex u : targets) {
      taken[u] = 0;
      out.emplace_back(u, v);
      ++deg[u];
      ++deg[v];
    }
  }
  return out;
}

inline PairList random_geometric(std::size_t n, double epsilon, Rng& rng) {
  const double nd = static_cast<double>(n);
  const double r = std::sqrt((1.0 + epsilon) * std::log(nd) / (std::numbers::pi * nd));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.unit();
    y[i] = rng.unit();
  }
  PairList out;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      const double dx = x[u] - x[v], dy = y[u] - y[v];
      if (dx * dx + dy * dy <= r * r) out.emplace_back(u, v);
    }
  return out;
}

inline bool pairs_connected(std::size_t n, const PairList& pairs) {
  std::vector<Vertex> parent(n);
  for (Vertex i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](Vertex a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::size_t components = n;
  for (auto [a, b] : pairs) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components <= 1;
}

}  // namespace detail

inline void validate(const GeneratorSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("generator needs n >= 2");
  if (spec.min_weight < 1 || spec.max_weight < spec.min_weight)
    throw std::invalid_argument("weight range must satisfy 1 <= lo <= hi");
  switch (spec.model) {
    case GraphModel::ER:
      if (!(spec.er_epsilon > -1)) throw std::invalid_argument("ER epsilon must be > -1");
      break;
    case GraphModel::WS:
      if (spec.ws_k < 2 || spec.ws_k % 2 != 0 || static_cast<std::size_t>(spec.ws_k) >= spec.n)
        throw std::invalid_argument("WS needs an even K with 2 <= K < n");
      if (spec.ws_p < 0 || spec.ws_p > 1) throw std::invalid_argument("WS p must lie in [0,1]");
      break;
    case GraphModel::BA:
      if (spec.ba_m < 1 || static_cast<std::size_t>(spec.ba_m) >= spec.n)
        throw std::invalid_argument("BA needs 1 <= m < n");
      break;
    case GraphModel::GE:
      if (!(spec.ge_epsilon > -1)) throw std::invalid_argument("GE epsilon must be > -1");
      break;
  }
}

/// Connected random graph drawn from `spec`. Disconnected topologies are
/// redrawn from the next topology stream, up to kMaxConnectivityAttempts.
inline WeightedGraph generate(const GeneratorSpec& spec) {
  validate(spec);
  for (int attempt = 0; attempt < kMaxConnectivityAttempts; ++attempt) {
    Rng topo(spec.seed, "topology", static_cast<std::uint64_t>(attempt));
    detail::PairList pairs;
    switch (spec.model) {
      case GraphModel::ER: pairs = detail::erdos_renyi(spec.n, spec.er_epsilon, topo); break;
      case GraphModel::WS: pairs = detail::watts_strogatz(spec.n, spec.ws_k, spec.ws_p, topo); break;
      case GraphModel::BA: pairs = detail::barabasi_albert(spec.n, spec.ba_m, topo); break;
      case GraphModel::GE: pairs = detail::random_geometric(spec.n, spec.ge_epsilon, topo); break;
    }
    if (!detail::pairs_connected(spec.n, pairs)) continue;
    std::sort(pairs.begin(), pairs.end());
    Rng weights(spec.seed, "weights");
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs)
      edges.push_back({u, v, static_cast<Weight>(weights.between(spec.min_weight, spec.max_weight))});
    return WeightedGraph(spec.n, std::move(edges));
  }
  throw std::runtime_error("no connected " + std::string(to_string(spec.model)) + " graph after " +
                           std::to_string(kMaxConnectivityAttempts) + " attempts");
}

enum class TerminalMethod { Linear, Exponential };

inline std::string_view to_string(TerminalMethod m) { return m == TerminalMethod::Linear ? "linear" : "exp"; }

inline TerminalMethod parse_tsm(std::string_view s) {
  if (s == "linear" || s == "lin") return TerminalMethod::Linear;
  if (s == "exp" || s == "exponential") return TerminalMethod::Exponential;
  throw std::invalid_argument("unknown terminal selection method '" + std::string(s) + "'");
}

struct TerminalSelection {
  TerminalMethod method = TerminalMethod::Linear;
  std::size_t levels = 1;
  std::uint64_t seed = 0;
};

/// Nested terminal sets S_1 ⊇ ... ⊇ S_levels, each sorted ascending.
/// Fractional sizes are rounded half-up with a floor of 1.
///   linear:      |S_1| = round(n·ℓ/(ℓ+1)), each level drops round(n/(ℓ+1))
///   exponential: |S_1| = round(n/2), each level keeps ceil(|S_i|/2)
inline std::vector<std::vector<Vertex>> generate_terminals(std::size_t n, const TerminalSelection& sel) {
  const std::size_t l = sel.levels;
  if (l < 1) throw std::invalid_argument("need at least one level");
  if (n < l + 1) throw std::invalid_argument("terminal selection needs n >= levels + 1");

  auto round_div = [](std::size_t num, std::size_t den) { return (2 * num + den) / (2 * den); };
  Rng rng(sel.seed, "terminals");
  std::vector<Vertex> all(n);
  for (Vertex v = 0; v < n; ++v) all[v] = v;

  std::size_t size = sel.method == TerminalMethod::Linear ? round_div(n * l, l + 1) : round_div(n, 2);
  const std::size_t drop = round_div(n, l + 1);

  std::vector<std::vector<Vertex>> levels;
  std::vector<Vertex> current = rng.sample(all, std::max<std::size_t>(size, 1));
  for (std::size_t i = 0; i < l; ++i) {
    if (current.empty()) throw std::invalid_argument("terminal level " + std::to_string(i + 1) + " is empty");
    auto sorted = current;
    std::sort(sorted.begin(), sorted.end());
    levels.push_back(std::move(sorted));
    if (i + 1 == l) break;
    const std::size_t next = sel.method == TerminalMethod::Linear
                                 ? (current.size() > drop ? current.size() - drop : 1)
                                 : (current.size() + 1) / 2;
    // Sample from the sorted level so the draw does not depend on prior shuffles.
    current = rng.sample(levels.back(), std::max<std::size_t>(next, 1));
  }
  return levels;
}

/// One line per level, ascending vertex ids separated by spaces.
inline void write_terminals(std::ostream& os, const std::vector<std::vector<Vertex>>& levels) {
  for (const auto& level : levels) {
    for (std::size_t i = 0; i < level.size(); ++i) os << (i ? " " : "") << level[i];
    os << '\n';
  }
}

inline std::vector<std::vector<Vertex>> read_terminals(std::istream& is) {
  std::vector<std::vector<Vertex>> levels;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<Vertex> level;
    long long v;
    while (ls >> v) {
      if (v < 0) throw GraphFormatError("negative terminal id");
      level.push_back(static_cast<Vertex>(v));
    }
    std::sort(level.begin(), level.end());
    levels.push_back(std::move(level));
  }
  return levels;
}

}  // namespace mlspanner
