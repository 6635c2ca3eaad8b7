#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "watertrade/lp.hpp"
#include "watertrade/model.hpp"
#include "watertrade/rng.hpp"
#include "watertrade/welfare.hpp"

namespace watertrade {

// A lower bound r on the total number of units assigned to a set of buyers.
struct FairnessGroup {
  std::vector<std::string> buyers;
  long long lower_bound = 1;
};

struct FairnessSpec {
  std::vector<FairnessGroup> groups;
};

// Group-count cap: the collection must stay polynomial in the number of
// buyers. 0 picks the default |B|^2 + |B| + 1.
inline std::vector<std::string> validate_fairness_spec(
    const MarketInstance& m, const FairnessSpec& spec,
    std::size_t max_groups = 0) {
  std::vector<std::string> problems;
  std::size_t cap = max_groups
                        ? max_groups
                        : m.buyers.size() * m.buyers.size() + m.buyers.size() + 1;
  if (spec.groups.size() > cap)
    problems.push_back("fairness spec has " +
                       std::to_string(spec.groups.size()) +
                       " groups, above the cap of " + std::to_string(cap));
  for (const auto& g : spec.groups) {
    if (g.buyers.empty()) problems.push_back("fairness group with no buyers");
    if (g.lower_bound < 1)
      problems.push_back("fairness lower bound must be a positive integer");
    std::set<std::string> seen;
    for (const auto& id : g.buyers) {
      if (!m.find_buyer(id))
        problems.push_back("fairness group references unknown buyer " + id);
      if (!seen.insert(id).second)
        problems.push_back("fairness group lists buyer " + id + " twice");
    }
  }
  return problems;
}

inline void require_valid_spec(const MarketInstance& m,
                               const FairnessSpec& spec) {
  auto problems = validate_fairness_spec(m, spec);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// One z value per resources-needs edge, in edge order.
struct FractionalSolution {
  std::vector<Rat> z;

  Rat objective(const ResourcesNeedsGraph& g) const {
    Rat total;
    for (std::size_t i = 0; i < z.size(); ++i)
      total += g.edges[i].weight * z[i];
    return total;
  }
  Rat node_mass_left(const ResourcesNeedsGraph& g, int left) const {
    Rat total;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (g.edges[i].left == left) total += z[i];
    return total;
  }
  Rat node_mass_right(const ResourcesNeedsGraph& g, int right) const {
    Rat total;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (g.edges[i].right == right) total += z[i];
    return total;
  }
};

struct FairnessLp {
  ResourcesNeedsGraph graph;
  lp::Problem<Rat> problem;  // variable i == graph.edges[i]
};

// The welfare LP: maximize sum of alpha_e z_e subject to z >= 0, unit-node
// sums <= 1, and per-group sums >= r(L).
inline FairnessLp build_fairness_lp(const MarketInstance& m,
                                    const FairnessSpec& spec) {
  require_valid(m);
  require_valid_spec(m, spec);
  FairnessLp out;
  out.graph = build_resources_needs_graph(m);
  const auto& g = out.graph;
  auto& p = out.problem;
  p.num_vars = static_cast<int>(g.edges.size());
  p.objective.reserve(g.edges.size());
  for (const auto& e : g.edges) p.objective.push_back(e.weight);
  // matching constraints, one per unit node
  std::vector<int> left_rows, right_rows;
  for (std::size_t l = 0; l < g.left_units.size(); ++l)
    left_rows.push_back(p.add_row(lp::Sense::LessEq, Rat(1)));
  for (std::size_t r = 0; r < g.right_units.size(); ++r)
    right_rows.push_back(p.add_row(lp::Sense::LessEq, Rat(1)));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    p.add_coeff(left_rows[g.edges[i].left], static_cast<int>(i), Rat(1));
    p.add_coeff(right_rows[g.edges[i].right], static_cast<int>(i), Rat(1));
  }
  // fairness constraints, one per group
  for (const auto& grp : spec.groups) {
    std::set<std::string> members(grp.buyers.begin(), grp.buyers.end());
    int row = p.add_row(lp::Sense::GreaterEq, Rat(grp.lower_bound));
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      if (members.count(g.right_units[g.edges[i].right].agent))
        p.add_coeff(row, static_cast<int>(i), Rat(1));
  }
  return out;
}

inline std::optional<FractionalSolution> solve_fairness_lp(
    const FairnessLp& flp) {
  auto sol = lp::maximize(flp.problem);
  if (sol.status == lp::Status::Infeasible) return std::nullopt;
  FractionalSolution z;
  z.z = std::move(sol.x);
  return z;
}

// Rewrites each buyer's incoming mass so it fills unit 1 first, then unit 2,
// and so on: whenever a unit carries mass, all lower units are exactly full.
// Seller-unit totals are untouched (mass only moves between units of one
// buyer), group totals are preserved, and the objective cannot decrease
// because buyer values are non-increasing in the unit index. Moving a piece
// carried by seller unit s to a lower buyer unit keeps it on a real edge;
// contributions are repacked most-expensive-seller-first, which keeps every
// piece on an edge (a piece can land at unit j only if mass at least j-1
// with seller value >= its own sat at units >= j in the old solution, and
// those edges dominate it).
inline FractionalSolution normalize_prefix_fractional(
    const FractionalSolution& in, const ResourcesNeedsGraph& g,
    const MarketInstance& m) {
  FractionalSolution out = in;
  std::map<std::pair<int, int>, int> edge_ix;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    edge_ix[{g.edges[i].left, g.edges[i].right}] = static_cast<int>(i);

  for (const auto& b : m.buyers) {
    // this buyer's unit nodes, in unit order
    std::vector<int> unit_nodes;
    for (int j = 1; j <= b.unit_count(); ++j) {
      auto r = g.right_index({b.id, j});
      if (r) unit_nodes.push_back(*r);
    }
    if (unit_nodes.size() <= 1) continue;
    std::vector<Rat> mass(unit_nodes.size());
    for (std::size_t j = 0; j < unit_nodes.size(); ++j)
      mass[j] = out.node_mass_right(g, unit_nodes[j]);
    bool already = true;
    for (std::size_t j = 1; j < unit_nodes.size(); ++j)
      if (mass[j].sign() > 0 && mass[j - 1] != Rat(1)) already = false;
    if (already) continue;

    // gather per-seller-unit contributions to this buyer
    std::map<int, Rat> contribution;  // left node -> total mass
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if (out.z[i].is_zero()) continue;
      for (int node : unit_nodes)
        if (g.edges[i].right == node) {
          contribution[g.edges[i].left] += out.z[i];
          out.z[i] = Rat(0);
        }
    }
    std::vector<std::pair<int, Rat>> pieces(contribution.begin(),
                                            contribution.end());
    std::sort(pieces.begin(), pieces.end(), [&](const auto& a, const auto& c) {
      const Rat& va = m.find_seller(g.left_units[a.first].agent)
                          ->unit_value(g.left_units[a.first].index);
      const Rat& vc = m.find_seller(g.left_units[c.first].agent)
                          ->unit_value(g.left_units[c.first].index);
      if (va != vc) return vc < va;  // most expensive seller unit first
      return a.first < c.first;
    });
    std::size_t unit = 0;
    Rat used;  // mass already packed into unit_nodes[unit]
    for (auto& [left, remaining] : pieces) {
      while (remaining.sign() > 0) {
        if (unit >= unit_nodes.size())
          throw std::logic_error("prefix normalization overflowed the buyer");
        Rat space = Rat(1) - used;
        Rat put = remaining < space ? remaining : space;
        auto it = edge_ix.find({left, unit_nodes[unit]});
        if (it == edge_ix.end())
          throw std::logic_error(
              "prefix normalization needs a missing edge; instance is not "
              "monotone");
        out.z[it->second] += put;
        used += put;
        remaining -= put;
        if (used == Rat(1)) {
          ++unit;
          used = Rat(0);
        }
      }
    }
  }
  return out;
}

// Dependent randomized rounding (pipage on cycles, then maximal paths of the
// fractional support). Per edge, Pr[Z_e = 1] equals z_e exactly; per node,
// the rounded degree lands in {floor, ceil} of its fractional degree on
// every run. Cycles are taken first, components in canonical node order, so
// the only randomness is the per-step two-way choice drawn from `rng`.
struct RoundedSolution {
  std::vector<int> indicator;  // 0/1 per graph edge
  TradingAssignment assignment;
};

inline RoundedSolution dependent_round(const FractionalSolution& in,
                                       const ResourcesNeedsGraph& g,
                                       SplitMix64& rng) {
  std::vector<Rat> z = in.z;
  int left_n = static_cast<int>(g.left_units.size());
  int nodes = left_n + static_cast<int>(g.right_units.size());
  auto is_fractional = [&](std::size_t i) {
    return z[i].sign() > 0 && z[i] < Rat(1);
  };

  for (;;) {
    // adjacency over fractional edges
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (peer, edge)
    bool any = false;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!is_fractional(i)) continue;
      any = true;
      int u = g.edges[i].left;
      int v = left_n + g.edges[i].right;
      adj[u].push_back({v, static_cast<int>(i)});
      adj[v].push_back({u, static_cast<int>(i)});
    }
    if (!any) break;

    // hunt for a cycle (DFS, deterministic order), else take a maximal path
    std::vector<int> walk_edges;
    {
      std::vector<int> state(nodes, 0), parent_edge(nodes, -1),
          parent(nodes, -1);
      std::vector<int> cycle;
      std::function<bool(int)> dfs = [&](int u) {
        state[u] = 1;
        for (const auto& [v, e] : adj[u]) {
          if (e == parent_edge[u]) continue;
          if (state[v] == 1) {
            // back edge: unwind u..v
            cycle.push_back(e);
            for (int w = u; w != v; w = parent[w])
              cycle.push_back(parent_edge[w]);
            return true;
          }
          if (state[v] == 0) {
            parent[v] = u;
            parent_edge[v] = e;
            if (dfs(v)) return true;
          }
        }
        state[u] = 2;
        return false;
      };
      for (int start = 0; start < nodes && cycle.empty(); ++start)
        if (state[start] == 0 && !adj[start].empty()) dfs(start);
      if (!cycle.empty()) {
        walk_edges = cycle;
      } else {
        // forest: start at the smallest leaf and extend while possible
        int leaf = -1;
        for (int v = 0; v < nodes; ++v)
          if (adj[v].size() == 1) {
            leaf = v;
            break;
          }
        int at = leaf, in_edge = -1;
        for (;;) {
          int next = -1, via = -1;
          for (const auto& [v, e] : adj[at])
            if (e != in_edge) {
              next = v;
              via = e;
              break;
            }
          if (next < 0) break;
          walk_edges.push_back(via);
          in_edge = via;
          at = next;
        }
      }
    }

    // alternate the walk's edges into two blocks and push until a bound hits
    Rat alpha, beta;
    {
      bool a_any = false, b_any = false;
      Rat a_up, a_down, b_up, b_down;
      for (std::size_t k = 0; k < walk_edges.size(); ++k) {
        const Rat& v = z[walk_edges[k]];
        Rat head = Rat(1) - v;
        if (k % 2 == 0) {
          if (!a_any || head < a_up) a_up = head;
          if (!a_any || v < a_down) a_down = v;
          a_any = true;
        } else {
          if (!b_any || head < b_up) b_up = head;
          if (!b_any || v < b_down) b_down = v;
          b_any = true;
        }
      }
      alpha = a_up;  // raise block A by alpha, lower block B by alpha
      if (b_any && b_down < alpha) alpha = b_down;
      beta = a_down;  // lower block A by beta, raise block B by beta
      if (b_any && b_up < beta) beta = b_up;
    }
    Rat denom = alpha + beta;
    double p_alpha = denom.is_zero() ? 0.0 : (beta / denom).to_double();
    bool take_alpha = rng.uniform01() < p_alpha;
    for (std::size_t k = 0; k < walk_edges.size(); ++k) {
      Rat& v = z[walk_edges[k]];
      if (take_alpha)
        v = k % 2 == 0 ? v + alpha : v - alpha;
      else
        v = k % 2 == 0 ? v - beta : v + beta;
    }
  }

  RoundedSolution out;
  out.indicator.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out.indicator[i] = z[i] == Rat(1) ? 1 : 0;
    if (!(z[i] == Rat(0) || z[i] == Rat(1)))
      throw std::logic_error("rounding left a fractional edge");
    if (out.indicator[i])
      out.assignment.pairs.push_back(
          {g.left_units[g.edges[i].left], g.right_units[g.edges[i].right]});
  }
  out.assignment.normalize();
  return out;
}

enum class FairStatus { Solved, LpInfeasible };

struct GroupReport {
  FairnessGroup group;
  bool singleton = false;
  long long achieved = 0;
  bool satisfied = false;
};

struct FairSolveReport {
  FairStatus status = FairStatus::LpInfeasible;
  Rat lp_objective;
  Rat welfare_value;
  TradingAssignment assignment;
  std::vector<GroupReport> groups;
  bool group_totals_changed_by_repair = false;
  // LpInfeasible means no fractional (hence no integral) solution meets the
  // bounds. Solved guarantees singleton groups on every run and the others
  // in expectation; a Solved run does not prove an integral solution meeting
  // every group bound exists.
};

// Randomized fairness pipeline: LP -> prefix normalization -> dependent
// rounding -> prefix repair. Singleton groups hold deterministically because
// normalization makes each buyer's filled units integral, so rounding
// preserves the buyer total to floor/ceiling; repair then only moves seller
// units, leaving buyer totals alone.
inline FairSolveReport solve_fair(const MarketInstance& m,
                                  const FairnessSpec& spec, SplitMix64& rng) {
  require_valid(m);
  if (!m.monotone) throw NonMonotoneRefusal();
  require_valid_spec(m, spec);
  FairSolveReport report;
  FairnessLp flp = build_fairness_lp(m, spec);
  auto frac = solve_fairness_lp(flp);
  if (!frac) {
    report.status = FairStatus::LpInfeasible;
    return report;
  }
  report.status = FairStatus::Solved;
  report.lp_objective = frac->objective(flp.graph);
  FractionalSolution norm = normalize_prefix_fractional(*frac, flp.graph, m);
  RoundedSolution rounded = dependent_round(norm, flp.graph, rng);
  auto totals_of = [&](const TradingAssignment& t) {
    return t.buyer_counts();
  };
  auto before = totals_of(rounded.assignment);
  report.assignment = repair_prefix(rounded.assignment, m);
  auto after = totals_of(report.assignment);
  report.group_totals_changed_by_repair = before != after;
  report.welfare_value = welfare(report.assignment, m);
  for (const auto& grp : spec.groups) {
    GroupReport gr;
    gr.group = grp;
    gr.singleton = grp.buyers.size() == 1;
    for (const auto& id : grp.buyers) {
      auto it = after.find(id);
      gr.achieved += it == after.end() ? 0 : it->second;
    }
    gr.satisfied = gr.achieved >= grp.lower_bound;
    report.groups.push_back(gr);
  }
  return report;
}

// Exact deterministic solver for per-buyer lower bounds (all groups are
// singletons): a flow with mandatory buyer arcs, then prefix repair. The
// repair cannot lower welfare and keeps all per-node totals, so the result
// is optimal among assignments meeting the bounds; nullopt when no
// assignment can.
inline std::optional<WelfareSolution> solve_fair_singleton(
    const MarketInstance& m,
    const std::map<std::string, long long>& lower_bounds) {
  require_valid(m);
  if (!m.monotone) throw NonMonotoneRefusal();
  for (const auto& [id, r] : lower_bounds) {
    if (!m.find_buyer(id))
      throw ValidationError({"lower bound references unknown buyer " + id});
    if (r < 0) throw ValidationError({"negative lower bound for buyer " + id});
  }
  ResourcesNeedsGraph g = build_resources_needs_graph(m);
  int left_n = static_cast<int>(g.left_units.size());
  int right_n = static_cast<int>(g.right_units.size());
  int buyer_n = static_cast<int>(m.buyers.size());
  // nodes: source | seller units | buyer units | buyers | sink
  int source = 0;
  int sink = 1 + left_n + right_n + buyer_n;
  MinCostFlow<Rat> flow(sink + 1);
  Rat reward(1);
  for (const auto& e : g.edges) reward += e.weight;
  for (int l = 0; l < left_n; ++l) flow.add_arc(source, 1 + l, 1, Rat(0));
  std::vector<int> edge_arcs;
  for (const auto& e : g.edges)
    edge_arcs.push_back(flow.add_arc(1 + e.left, 1 + left_n + e.right, 1,
                                     Rat(0) - e.weight));
  std::map<std::string, int> buyer_ix;
  for (int b = 0; b < buyer_n; ++b) buyer_ix[m.buyers[b].id] = b;
  for (int r = 0; r < right_n; ++r)
    flow.add_arc(1 + left_n + r, 1 + left_n + right_n +
                                     buyer_ix.at(g.right_units[r].agent),
                 1, Rat(0));
  std::vector<int> mandatory(buyer_n, -1);
  for (int b = 0; b < buyer_n; ++b) {
    auto it = lower_bounds.find(m.buyers[b].id);
    long long need = it == lower_bounds.end() ? 0 : it->second;
    long long gamma = m.buyers[b].unit_count();
    int node = 1 + left_n + right_n + b;
    if (need > gamma) return std::nullopt;
    if (need > 0)
      mandatory[b] = flow.add_arc(node, sink, need, Rat(0) - reward);
    if (gamma > need) flow.add_arc(node, sink, gamma - need, Rat(0));
  }
  flow.augment_while_negative(source, sink);
  for (int b = 0; b < buyer_n; ++b)
    if (mandatory[b] >= 0) {
      auto it = lower_bounds.find(m.buyers[b].id);
      if (flow.flow(mandatory[b]) < it->second) return std::nullopt;
    }
  TradingAssignment raw;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (flow.flow(edge_arcs[i]) > 0)
      raw.pairs.push_back(
          {g.left_units[g.edges[i].left], g.right_units[g.edges[i].right]});
  raw.normalize();
  WelfareSolution sol;
  sol.assignment = repair_prefix(raw, m);
  sol.welfare_value = welfare(sol.assignment, m);
  return sol;
}

// Exhaustive decision procedure for the group-feasibility question: is there
// any valid assignment meeting every group bound?
inline bool feas_demog_bruteforce(const MarketInstance& m,
                                  const FairnessSpec& spec,
                                  const BruteForceOptions& opts = {}) {
  require_valid(m);
  require_valid_spec(m, spec);
  detail::AssignmentEnumerator enumerator(m, opts);
  const auto& g = enumerator.graph();
  // buyer id -> groups it belongs to
  std::map<std::string, std::vector<int>> member_of;
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi)
    for (const auto& id : spec.groups[gi].buyers)
      member_of[id].push_back(static_cast<int>(gi));
  bool feasible = false;
  enumerator.enumerate([&]() {
    std::vector<long long> achieved(spec.groups.size(), 0);
    for (int e : enumerator.chosen()) {
      auto it = member_of.find(g.right_units[g.edges[e].right].agent);
      if (it == member_of.end()) continue;
      for (int gi : it->second) achieved[gi]++;
    }
    for (std::size_t gi = 0; gi < spec.groups.size(); ++gi)
      if (achieved[gi] < spec.groups[gi].lower_bound) return true;  // keep going
    feasible = true;
    return false;  // stop, found one
  });
  return feasible;
}

}  // namespace watertrade
