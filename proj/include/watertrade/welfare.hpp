#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "watertrade/matching.hpp"
#include "watertrade/model.hpp"

namespace watertrade {

// Raised when the exact solver is asked to run on an instance whose value
// functions violate the monotonicity it needs (the regime where welfare
// maximization is intractable in general).
struct NonMonotoneRefusal : std::runtime_error {
  NonMonotoneRefusal()
      : std::runtime_error(
            "instance is not flagged monotone; the exact solver only "
            "guarantees optimality for non-decreasing seller and "
            "non-increasing buyer value lists. Pass "
            "NonMonotoneHandling::Heuristic to run anyway.") {}
};

enum class NonMonotoneHandling { Refuse, Heuristic };

struct WelfareSolution {
  TradingAssignment assignment;
  Rat welfare_value;
  bool heuristic = false;  // set when run on a non-monotone instance
};

// Re-targets trades so that every agent's matched units form a prefix of its
// ordered unit list: while some unit i is matched and unit i-1 is not, the
// trade moves to unit i-1. On monotone instances the move is always legal
// and never decreases welfare; on explicit-wired (gadget) instances a move
// whose target pair is not an edge drops the trade instead.
inline TradingAssignment repair_prefix(const TradingAssignment& raw,
                                       const MarketInstance& m) {
  require_valid(m);
  ResourcesNeedsGraph g = build_resources_needs_graph(m);
  std::set<std::pair<int, int>> edges;
  for (const auto& e : g.edges) edges.insert({e.left, e.right});

  std::vector<std::pair<UnitRef, UnitRef>> pairs = raw.pairs;
  auto matched_on = [&](bool seller_side, const UnitRef& u) -> int {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const UnitRef& mine = seller_side ? pairs[i].first : pairs[i].second;
      if (mine == u) return static_cast<int>(i);
    }
    return -1;
  };
  auto is_edge = [&](const UnitRef& su, const UnitRef& bu) {
    auto l = g.left_index(su);
    auto r = g.right_index(bu);
    return l && r && edges.count({*l, *r}) > 0;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    auto scan = [&](const std::vector<Agent>& agents, bool seller_side) {
      for (const auto& a : agents) {
        for (int i = 2; i <= a.unit_count(); ++i) {
          int at = matched_on(seller_side, {a.id, i});
          if (at < 0) continue;
          if (matched_on(seller_side, {a.id, i - 1}) >= 0) continue;
          UnitRef target{a.id, i - 1};
          UnitRef su = seller_side ? target : pairs[at].first;
          UnitRef bu = seller_side ? pairs[at].second : target;
          if (is_edge(su, bu)) {
            pairs[at] = {su, bu};
          } else {
            pairs.erase(pairs.begin() + at);
          }
          changed = true;
        }
      }
    };
    scan(m.sellers, true);
    scan(m.buyers, false);
  }
  TradingAssignment out;
  out.pairs = std::move(pairs);
  out.normalize();
  return out;
}

namespace detail {

inline TradingAssignment assignment_from_matching(
    const ResourcesNeedsGraph& g, const std::vector<int>& chosen) {
  TradingAssignment t;
  for (int i : chosen)
    t.pairs.push_back(
        {g.left_units[g.edges[i].left], g.right_units[g.edges[i].right]});
  t.normalize();
  return t;
}

}  // namespace detail

// Exact welfare maximization: build the unit-level graph, take a maximum
// weight matching, then repair prefix order. Optimal for monotone instances;
// with Heuristic handling it also runs on non-monotone ones (marked, no
// optimality claim).
inline WelfareSolution solve_max_welfare(
    const MarketInstance& m,
    NonMonotoneHandling handling = NonMonotoneHandling::Refuse) {
  require_valid(m);
  if (!m.monotone && handling == NonMonotoneHandling::Refuse)
    throw NonMonotoneRefusal();
  ResourcesNeedsGraph g = build_resources_needs_graph(m);
  WeightedBipartiteGraph wg;
  wg.left_count = static_cast<int>(g.left_units.size());
  wg.right_count = static_cast<int>(g.right_units.size());
  std::vector<int> kept;  // wg edge -> g edge (negative weights never help)
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (g.edges[i].weight.sign() >= 0) {
      wg.edges.push_back(
          {g.edges[i].left, g.edges[i].right, g.edges[i].weight});
      kept.push_back(static_cast<int>(i));
    }
  std::vector<int> chosen_wg = max_weight_matching(wg);
  std::vector<int> chosen;
  for (int i : chosen_wg) chosen.push_back(kept[i]);
  TradingAssignment raw = detail::assignment_from_matching(g, chosen);
  WelfareSolution sol;
  sol.assignment = repair_prefix(raw, m);
  sol.welfare_value = welfare(sol.assignment, m);
  sol.heuristic = !m.monotone;
  return sol;
}

struct BruteForceOptions {
  int max_total_units = 10;
  long long max_nodes = 50'000'000;  // DFS budget, guards gadget verifiers
};

namespace detail {

// Exhaustive enumerator over valid trading assignments, shared by the
// welfare oracle and the feasibility brute force. Walks buyer units in
// canonical order: a buyer unit may only be matched if the buyer's previous
// unit is (buyer prefix by construction), and seller prefix validity is
// tracked incrementally so leaves check in O(1).
class AssignmentEnumerator {
public:
  AssignmentEnumerator(const MarketInstance& m, const BruteForceOptions& opts,
                       bool enforce_unit_cap = true)
      : opts_(opts), graph_(build_resources_needs_graph(m)) {
    if (enforce_unit_cap && m.total_units() > opts.max_total_units)
      throw CapExceeded("instance has " + std::to_string(m.total_units()) +
                        " units, above the brute-force cap of " +
                        std::to_string(opts.max_total_units));
    candidates_.resize(graph_.right_units.size());
    for (std::size_t i = 0; i < graph_.edges.size(); ++i)
      candidates_[graph_.edges[i].right].push_back(static_cast<int>(i));
    std::map<std::string, int> seller_ix;
    for (const auto& s : m.sellers)
      seller_ix.emplace(s.id, static_cast<int>(seller_ix.size()));
    seller_of_left_.reserve(graph_.left_units.size());
    for (const auto& u : graph_.left_units)
      seller_of_left_.push_back({seller_ix.at(u.agent), u.index});
    seller_matched_.assign(m.sellers.size(), 0);
    seller_max_index_.assign(m.sellers.size(), 0);
    taken_.assign(graph_.left_units.size(), 0);
  }

  // Calls visit() once per valid assignment (including the empty one); the
  // current edge set and welfare are exposed via chosen()/current_welfare().
  // visit returns false to stop the enumeration early.
  template <typename Visit>
  void enumerate(Visit&& visit) {
    nodes_ = 0;
    walk(0, true, visit);
  }

  const ResourcesNeedsGraph& graph() const { return graph_; }
  const std::vector<int>& chosen() const { return chosen_; }
  Rat current_welfare() const { return welfare_; }

private:
  template <typename Visit>
  bool walk(std::size_t unit_ix, bool prev_matched, Visit& visit) {
    if (++nodes_ > opts_.max_nodes)
      throw CapExceeded("assignment enumeration exceeded its node budget");
    if (unit_ix == candidates_.size()) {
      if (sellers_violating_ == 0) return visit();
      return true;
    }
    bool first_of_buyer = graph_.right_units[unit_ix].index == 1;
    if (!walk(unit_ix + 1, false, visit)) return false;
    if (first_of_buyer || prev_matched) {
      for (int edge_ix : candidates_[unit_ix]) {
        if (taken_[graph_.edges[edge_ix].left]) continue;
        take(edge_ix);
        bool keep_going = walk(unit_ix + 1, true, visit);
        untake(edge_ix);
        if (!keep_going) return false;
      }
    }
    return true;
  }

  // Seller prefix holds iff, per seller, matched count == max matched index.
  bool seller_ok(int agent_ix) const {
    return seller_matched_[agent_ix] == seller_max_index_[agent_ix];
  }

  void take(int edge_ix) {
    const auto& e = graph_.edges[edge_ix];
    auto [agent_ix, unit_index] = seller_of_left_[e.left];
    bool was_ok = seller_ok(agent_ix);
    taken_[e.left] = 1;
    chosen_.push_back(edge_ix);
    welfare_ += e.weight;
    seller_matched_[agent_ix]++;
    if (unit_index > seller_max_index_[agent_ix])
      seller_max_index_[agent_ix] = unit_index;
    sellers_violating_ += int(was_ok) - int(seller_ok(agent_ix));
  }

  void untake(int edge_ix) {
    const auto& e = graph_.edges[edge_ix];
    auto [agent_ix, unit_index] = seller_of_left_[e.left];
    bool was_ok = seller_ok(agent_ix);
    taken_[e.left] = 0;
    chosen_.pop_back();
    welfare_ -= e.weight;
    seller_matched_[agent_ix]--;
    if (unit_index == seller_max_index_[agent_ix]) {
      int mx = 0;
      for (std::size_t l = 0; l < taken_.size(); ++l)
        if (taken_[l] && seller_of_left_[l].first == agent_ix)
          mx = std::max(mx, seller_of_left_[l].second);
      seller_max_index_[agent_ix] = mx;
    }
    sellers_violating_ += int(was_ok) - int(seller_ok(agent_ix));
  }

  BruteForceOptions opts_;
  ResourcesNeedsGraph graph_;
  std::vector<std::vector<int>> candidates_;  // per buyer-unit node
  std::vector<std::pair<int, int>> seller_of_left_;
  std::vector<char> taken_;
  std::vector<int> seller_matched_, seller_max_index_;
  std::vector<int> chosen_;
  Rat welfare_;
  int sellers_violating_ = 0;
  long long nodes_ = 0;
};

}  // namespace detail

// Exhaustive oracle: enumerates every valid trading assignment and returns
// one of maximum welfare. Deliberately independent of the matching-based
// solver so each can check the other.
inline WelfareSolution brute_force_max_welfare(
    const MarketInstance& m, const BruteForceOptions& opts = {},
    bool enforce_unit_cap = true) {
  require_valid(m);
  detail::AssignmentEnumerator enumerator(m, opts, enforce_unit_cap);
  bool found = false;
  Rat best;
  std::vector<int> best_edges;
  enumerator.enumerate([&]() {
    Rat w = enumerator.current_welfare();
    if (!found || best < w) {
      found = true;
      best = w;
      best_edges = enumerator.chosen();
    }
    return true;
  });
  WelfareSolution sol;
  sol.assignment =
      detail::assignment_from_matching(enumerator.graph(), best_edges);
  sol.welfare_value = best;
  sol.heuristic = false;
  return sol;
}

}  // namespace watertrade
