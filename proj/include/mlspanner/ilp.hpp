#pragma once

// Path-based ILP for minimum-sparsity (multi-level) additive spanners and its
// serialization to LP text.
//
// For every level k and unordered terminal pair {s,t} of S_k (s < t), with
// binary edge variables x_e^k and arc variables f_(i,j)^{st,k} on both
// orientations of every edge:
//   length:   sum_(i,j) w_ij f_(i,j) <= dist(s,t) + c*W   (W or W(s,t))
//   flow:     out(i) - in(i) = 1 at s, -1 at t, 0 elsewhere
//   out:      out(i) <= 1
//   coupling: f_(i,j) + f_(j,i) - x_e <= 0
// plus x_e^k - x_e^(k-1) <= 0 for k >= 2. Objective: sum_k sum_e x_e^k.
//
// Names: xe_<u>_<v>, f_<i>_<j>_p<s>_<t>, with suffix _l<k> when there is more
// than one level. Emission order: per level, edge variables; then per pair
// (ascending) the length row, flow rows and out rows by vertex, coupling rows
// by edge; nesting rows last, by level then edge.

#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlspanner/multilevel.hpp"
#include "mlspanner/shortest_paths.hpp"

namespace mlspanner {

struct LinearTerm {
  std::int64_t coef;
  std::size_t var;
};

struct LinearConstraint {
  enum class Sense { LessEq, Equal };
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense;
  std::int64_t rhs;
};

/// All-binary minimization model.
struct IlpModel {
  std::vector<std::string> variables;
  std::vector<LinearTerm> objective;
  std::vector<LinearConstraint> constraints;

  std::size_t add_variable(std::string name) {
    variables.push_back(std::move(name));
    return variables.size() - 1;
  }

  std::int64_t objective_value(const std::vector<std::uint8_t>& x) const {
    std::int64_t v = 0;
    for (const auto& t : objective) v += t.coef * x.at(t.var);
    return v;
  }

  /// Names of constraints violated by the 0/1 assignment `x`.
  std::vector<std::string> violated(const std::vector<std::uint8_t>& x) const {
    std::vector<std::string> out;
    for (const auto& c : constraints) {
      std::int64_t lhs = 0;
      for (const auto& t : c.terms) lhs += t.coef * x.at(t.var);
      const bool ok = c.sense == LinearConstraint::Sense::Equal ? lhs == c.rhs : lhs <= c.rhs;
      if (!ok) out.push_back(c.name);
    }
    return out;
  }
};

/// Variable indices of a built model, for mapping solutions in and out.
struct IlpLayout {
  std::size_t levels = 0;
  std::vector<std::vector<std::size_t>> edge_var;  // [level][edge]
  struct PairBlock {
    std::size_t level;
    VertexPair pair;
    std::vector<std::size_t> forward;   // arc u->v of edge e
    std::vector<std::size_t> backward;  // arc v->u of edge e
  };
  std::vector<PairBlock> pair_blocks;
};

struct BuiltIlp {
  IlpModel model;
  IlpLayout layout;
};

inline BuiltIlp build_ilp_with_layout(const MultiLevelInstance& inst, const PathTable& pt) {
  validate(inst);
  const auto& g = inst.graph;
  const std::size_t ell = inst.levels();
  const std::size_t m = g.num_edges();
  BuiltIlp out;
  auto& model = out.model;
  auto& layout = out.layout;
  layout.levels = ell;
  auto suffix = [ell](std::size_t k) { return ell > 1 ? "_l" + std::to_string(k) : std::string(); };
  auto pair_tag = [](VertexPair p) { return "_p" + std::to_string(p.first) + "_" + std::to_string(p.second); };

  layout.edge_var.assign(ell, {});
  using Sense = LinearConstraint::Sense;
  for (std::size_t k = 1; k <= ell; ++k) {
    auto& ev = layout.edge_var[k - 1];
    for (EdgeId e = 0; e < m; ++e) {
      const auto& ed = g.edge(e);
      ev.push_back(model.add_variable("xe_" + std::to_string(ed.u) + "_" + std::to_string(ed.v) + suffix(k)));
      model.objective.push_back({1, ev.back()});
    }

    for (const auto& p : all_pairs(inst.terminal_sets[k - 1])) {
      if (!pt.connected(p.first, p.second))
        throw DisconnectedError("terminal pair " + std::to_string(p.first) + "," + std::to_string(p.second) +
                                " is disconnected");
      IlpLayout::PairBlock blk{k, p, {}, {}};
      const std::string tag = pair_tag(p) + suffix(k);
      for (EdgeId e = 0; e < m; ++e) {
        const auto& ed = g.edge(e);
        blk.forward.push_back(model.add_variable("f_" + std::to_string(ed.u) + "_" + std::to_string(ed.v) + tag));
        blk.backward.push_back(model.add_variable("f_" + std::to_string(ed.v) + "_" + std::to_string(ed.u) + tag));
      }

      LinearConstraint len{"len" + tag, {}, Sense::LessEq,
                           pt.dist(p.first, p.second) + inst.budget.allowance(g, pt, p.first, p.second)};
      for (EdgeId e = 0; e < m; ++e) {
        len.terms.push_back({g.edge(e).w, blk.forward[e]});
        len.terms.push_back({g.edge(e).w, blk.backward[e]});
      }
      model.constraints.push_back(std::move(len));

      // Arc variable leaving `from` along edge e.
      auto out_arc = [&](EdgeId e, Vertex from) { return g.edge(e).u == from ? blk.forward[e] : blk.backward[e]; };
      auto in_arc = [&](EdgeId e, Vertex to) { return g.edge(e).v == to ? blk.forward[e] : blk.backward[e]; };
      for (Vertex i = 0; i < g.num_vertices(); ++i) {
        LinearConstraint flow{"flow_" + std::to_string(i) + tag, {}, Sense::Equal,
                              i == p.first ? 1 : (i == p.second ? -1 : 0)};
        for (const auto& nb : g.neighbors(i)) flow.terms.push_back({1, out_arc(nb.id, i)});
        for (const auto& nb : g.neighbors(i)) flow.terms.push_back({-1, in_arc(nb.id, i)});
        if (flow.terms.empty() && flow.rhs == 0) continue;
        model.constraints.push_back(std::move(flow));
      }
      for (Vertex i = 0; i < g.num_vertices(); ++i) {
        LinearConstraint deg{"out_" + std::to_string(i) + tag, {}, Sense::LessEq, 1};
        for (const auto& nb : g.neighbors(i)) deg.terms.push_back({1, out_arc(nb.id, i)});
        if (deg.terms.empty()) continue;
        model.constraints.push_back(std::move(deg));
      }
      for (EdgeId e = 0; e < m; ++e) {
        const auto& ed = g.edge(e);
        model.constraints.push_back(
            {"cpl_" + std::to_string(ed.u) + "_" + std::to_string(ed.v) + tag,
             {{1, blk.forward[e]}, {1, blk.backward[e]}, {-1, ev[e]}},
             Sense::LessEq,
             0});
      }
      layout.pair_blocks.push_back(std::move(blk));
    }
  }
  for (std::size_t k = 2; k <= ell; ++k)
    for (EdgeId e = 0; e < m; ++e) {
      const auto& ed = g.edge(e);
      model.constraints.push_back({"nest_" + std::to_string(ed.u) + "_" + std::to_string(ed.v) + suffix(k),
                                   {{1, layout.edge_var[k - 1][e]}, {-1, layout.edge_var[k - 2][e]}},
                                   Sense::LessEq,
                                   0});
    }
  return out;
}

inline IlpModel build_ilp(const MultiLevelInstance& inst, const PathTable& pt) {
  return build_ilp_with_layout(inst, pt).model;
}

/// 0/1 assignment realizing `sp`: edge variables from level membership, arc
/// variables along a shortest path inside each level's subgraph. Meant for
/// checking the model against solutions found elsewhere.
inline std::vector<std::uint8_t> assignment_from_spanner(const MultiLevelInstance& inst, const BuiltIlp& ilp,
                                                         const MultiLevelSpanner& sp) {
  const auto& g = inst.graph;
  std::vector<std::uint8_t> x(ilp.model.variables.size(), 0);
  for (std::size_t k = 0; k < ilp.layout.levels; ++k)
    for (EdgeId e : sp.level_edges.at(k).ids()) x[ilp.layout.edge_var[k][e]] = 1;
  for (const auto& blk : ilp.layout.pair_blocks) {
    const auto tree = dijkstra(g, blk.pair.first, &sp.level_edges.at(blk.level - 1));
    if (tree.dist[blk.pair.second] == kUnreachable) continue;
    for (Vertex v = blk.pair.second; v != blk.pair.first; v = tree.pred[v]) {
      const EdgeId e = tree.pred_edge[v];
      x[g.edge(e).v == v ? blk.forward[e] : blk.backward[e]] = 1;
    }
  }
  return x;
}

namespace detail {

inline void emit_terms(std::ostream& os, const IlpModel& m, const std::vector<LinearTerm>& terms) {
  constexpr std::size_t kTermsPerLine = 8;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0 && i % kTermsPerLine == 0) os << "\n   ";
    const auto& t = terms[i];
    const std::int64_t mag = t.coef < 0 ? -t.coef : t.coef;
    if (i == 0) {
      if (t.coef < 0) os << "- ";
    } else {
      os << (t.coef < 0 ? " - " : " + ");
    }
    if (mag != 1) os << mag << ' ';
    os << m.variables[t.var];
  }
}

}  // namespace detail

/// CPLEX-style LP text. Byte-identical for identical models.
inline void emit_lp(std::ostream& os, const IlpModel& model) {
  os << "\\ minimum-sparsity additive spanner\n";
  os << "Minimize\n obj: ";
  if (model.objective.empty()) os << "0";
  detail::emit_terms(os, model, model.objective);
  os << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    os << ' ' << c.name << ": ";
    detail::emit_terms(os, model, c.terms);
    os << (c.sense == LinearConstraint::Sense::Equal ? " = " : " <= ") << c.rhs << '\n';
  }
  os << "Binary\n";
  for (const auto& v : model.variables) os << ' ' << v << '\n';
  os << "End\n";
}

inline std::string emit_lp(const IlpModel& model) {
  std::ostringstream os;
  emit_lp(os, model);
  return os.str();
}

}  // namespace mlspanner
