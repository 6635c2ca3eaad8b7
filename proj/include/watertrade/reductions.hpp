#pragma once

#include <array>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "watertrade/fairness.hpp"
#include "watertrade/model.hpp"
#include "watertrade/welfare.hpp"

namespace watertrade {

// Exact cover by 3-sets: universe 1..universe_size (a multiple of 3), each
// set holds three distinct elements listed in increasing order.
struct X3CInstance {
  int universe_size = 0;
  std::vector<std::array<int, 3>> sets;
};

inline std::vector<std::string> validate_x3c(const X3CInstance& x) {
  std::vector<std::string> problems;
  if (x.universe_size <= 0 || x.universe_size % 3 != 0)
    problems.push_back("universe size must be a positive multiple of 3");
  for (const auto& s : x.sets) {
    if (!(s[0] < s[1] && s[1] < s[2]))
      problems.push_back("set elements must be distinct and increasing");
    for (int e : s)
      if (e < 1 || e > x.universe_size)
        problems.push_back("set element " + std::to_string(e) +
                           " outside the universe");
  }
  return problems;
}

// Vertex cover question: does G have a cover of at most `budget` nodes?
struct VCInstance {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based endpoints
  int budget = 0;
};

inline std::vector<std::string> validate_vc(const VCInstance& g) {
  std::vector<std::string> problems;
  if (g.vertex_count < 1) problems.push_back("graph needs at least one node");
  if (g.budget < 0 || g.budget > g.vertex_count)
    problems.push_back("budget must lie in [0, vertex count]");
  for (const auto& [u, v] : g.edges) {
    if (u < 1 || u > g.vertex_count || v < 1 || v > g.vertex_count)
      problems.push_back("edge endpoint outside the graph");
    if (u == v) problems.push_back("self loop");
  }
  return problems;
}

struct X3CGadget {
  MarketInstance instance;
  Rat threshold;  // cover exists iff max welfare >= threshold
  long long q = 4;
};

// The welfare-hardness gadget: one single-unit seller (value 1) per universe
// element; per set, a buyer with three units valued (0, 0, q) whose p-th
// unit is wired to the seller of the set's p-th element. The buyer lists
// rise in value, so the instance is flagged non-monotone, and the wiring is
// explicit unit edges: pairs on units 1 and 2 lose value (weight -1), so a
// buyer only pays off when all three units fill (prefix order forces exactly
// that), netting q - 3. An exact cover fills ell = t/3 buyers, welfare
// ell * (q - 3).
inline X3CGadget x3c_to_maxwelfare(const X3CInstance& x, long long q = 4) {
  auto problems = validate_x3c(x);
  if (q < 4) problems.push_back("q must be an integer >= 4");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  X3CGadget out;
  out.q = q;
  MarketInstance& m = out.instance;
  for (int u = 1; u <= x.universe_size; ++u)
    m.sellers.push_back({"u" + std::to_string(u), u, {Rat(1)}});
  std::vector<UnitEdge> wires;
  std::set<std::pair<std::string, std::string>> agent_edges;
  for (std::size_t j = 0; j < x.sets.size(); ++j) {
    std::string bid = "c" + std::to_string(j + 1);
    m.buyers.push_back({bid, static_cast<int>(j) + 1,
                        {Rat(0), Rat(0), Rat(q)}});
    for (int p = 0; p < 3; ++p) {
      std::string sid = "u" + std::to_string(x.sets[j][p]);
      wires.push_back({sid, 1, bid, p + 1});
      agent_edges.insert({sid, bid});
    }
  }
  m.compat_edges.assign(agent_edges.begin(), agent_edges.end());
  m.unit_edges = std::move(wires);
  m.monotone = false;
  out.threshold = Rat(x.universe_size / 3) * Rat(q - 3);
  return out;
}

struct VCGadget {
  MarketInstance instance;
  FairnessSpec spec;
};

// The feasibility-hardness gadget: budget-many single-unit sellers, one
// single-unit buyer per graph node, every unit pair compatible (all values
// zero), and one group constraint ({endpoints}, 1) per graph edge.
inline VCGadget minvc_to_feasdemog(const VCInstance& g) {
  auto problems = validate_vc(g);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  VCGadget out;
  MarketInstance& m = out.instance;
  for (int i = 1; i <= g.budget; ++i)
    m.sellers.push_back({"s" + std::to_string(i), i, {Rat(0)}});
  for (int v = 1; v <= g.vertex_count; ++v)
    m.buyers.push_back({"v" + std::to_string(v), v, {Rat(0)}});
  for (const auto& s : m.sellers)
    for (const auto& b : m.buyers) m.compat_edges.push_back({s.id, b.id});
  for (const auto& [u, v] : g.edges)
    out.spec.groups.push_back(
        {{"v" + std::to_string(u), "v" + std::to_string(v)}, 1});
  return out;
}

// Exhaustive exact-cover decision: cover elements in order, branching over
// the disjoint sets that contain the lowest uncovered element.
inline bool exhaustive_x3c(const X3CInstance& x) {
  auto problems = validate_x3c(x);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  std::vector<char> covered(x.universe_size + 1, 0);
  std::function<bool(int)> cover = [&](int done) {
    int low = 0;
    for (int u = 1; u <= x.universe_size; ++u)
      if (!covered[u]) {
        low = u;
        break;
      }
    if (low == 0) return true;
    for (const auto& s : x.sets) {
      if (s[0] != low && s[1] != low && s[2] != low) continue;
      if (covered[s[0]] || covered[s[1]] || covered[s[2]]) continue;
      covered[s[0]] = covered[s[1]] = covered[s[2]] = 1;
      if (cover(done + 3)) return true;
      covered[s[0]] = covered[s[1]] = covered[s[2]] = 0;
    }
    return false;
  };
  return cover(0);
}

// Exhaustive vertex-cover decision: branch on an uncovered edge, taking one
// endpoint or the other.
inline bool exhaustive_vertex_cover(const VCInstance& g) {
  auto problems = validate_vc(g);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  std::vector<char> in_cover(g.vertex_count + 1, 0);
  std::function<bool(int)> walk = [&](int budget) {
    const std::pair<int, int>* open = nullptr;
    for (const auto& e : g.edges)
      if (!in_cover[e.first] && !in_cover[e.second]) {
        open = &e;
        break;
      }
    if (!open) return true;
    if (budget == 0) return false;
    for (int pick : {open->first, open->second}) {
      in_cover[pick] = 1;
      if (walk(budget - 1)) return true;
      in_cover[pick] = 0;
    }
    return false;
  };
  return walk(g.budget);
}

// Equivalence checks: the gadget decision must agree with the source
// problem's exhaustive decision.
inline bool verify_reduction_x3c(const X3CInstance& x, long long q = 4,
                                 const BruteForceOptions& opts = {}) {
  X3CGadget gadget = x3c_to_maxwelfare(x, q);
  WelfareSolution best =
      brute_force_max_welfare(gadget.instance, opts, /*enforce_unit_cap=*/false);
  bool gadget_says = !(best.welfare_value < gadget.threshold);
  return gadget_says == exhaustive_x3c(x);
}

inline bool verify_reduction_vc(const VCInstance& g,
                                const BruteForceOptions& opts = {}) {
  VCGadget gadget = minvc_to_feasdemog(g);
  BruteForceOptions wide = opts;
  wide.max_total_units = std::max(wide.max_total_units,
                                  gadget.instance.total_units());
  bool gadget_says = feas_demog_bruteforce(gadget.instance, gadget.spec, wide);
  return gadget_says == exhaustive_vertex_cover(g);
}

}  // namespace watertrade
