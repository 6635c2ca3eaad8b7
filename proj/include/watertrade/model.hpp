#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "watertrade/rational.hpp"

namespace watertrade {

struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), issues(std::move(problems)) {}
  std::vector<std::string> issues;

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid input:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
};

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A market participant. Units are ordered: unit x must trade before unit
// x+1, so value lists read in trade order. seniority_rank is carried for the
// data-generation pipeline (higher = more senior); the solvers ignore it.
struct Agent {
  std::string id;
  int seniority_rank = 0;
  std::vector<Rat> units;  // value of unit i at index i-1; indices are 1-based

  int unit_count() const { return static_cast<int>(units.size()); }
  const Rat& unit_value(int index) const {
    if (index < 1 || index > unit_count())
      throw std::out_of_range("unit index " + std::to_string(index) +
                              " out of range for agent " + id);
    return units[static_cast<std::size_t>(index - 1)];
  }
  bool non_decreasing() const {
    return std::is_sorted(units.begin(), units.end());
  }
  bool non_increasing() const {
    return std::is_sorted(units.begin(), units.end(), std::greater<Rat>());
  }
};

// One water unit of one agent; index is 1-based.
struct UnitRef {
  std::string agent;
  int index = 0;
  friend bool operator==(const UnitRef&, const UnitRef&) = default;
  friend auto operator<=>(const UnitRef&, const UnitRef&) = default;
};

// Explicit seller-unit / buyer-unit compatibility. Only used by instances
// that wire compatibility below the agent level (the hardness gadgets); such
// edges bypass the value filter and may carry negative weight.
struct UnitEdge {
  std::string seller;
  int seller_index = 0;
  std::string buyer;
  int buyer_index = 0;
  friend bool operator==(const UnitEdge&, const UnitEdge&) = default;
  friend auto operator<=>(const UnitEdge&, const UnitEdge&) = default;
};

// A two-sided market: sellers, buyers, and the agent-level compatibility
// graph. `monotone` is a claim (seller lists non-decreasing, buyer lists
// non-increasing) that validate_instance checks rather than assumes; the
// exact solver refuses instances flagged non-monotone unless overridden.
struct MarketInstance {
  std::vector<Agent> sellers;
  std::vector<Agent> buyers;
  std::vector<std::pair<std::string, std::string>> compat_edges;
  bool monotone = true;
  std::optional<std::vector<UnitEdge>> unit_edges;

  const Agent* find_seller(const std::string& id) const {
    for (const auto& a : sellers)
      if (a.id == id) return &a;
    return nullptr;
  }
  const Agent* find_buyer(const std::string& id) const {
    for (const auto& a : buyers)
      if (a.id == id) return &a;
    return nullptr;
  }
  int total_units() const {
    int n = 0;
    for (const auto& a : sellers) n += a.unit_count();
    for (const auto& a : buyers) n += a.unit_count();
    return n;
  }
};

inline std::vector<std::string> validate_instance(const MarketInstance& m) {
  std::vector<std::string> problems;
  std::set<std::string> seller_ids, buyer_ids;
  auto check_agent = [&](const Agent& a, bool seller) {
    if (a.id.empty()) problems.push_back("agent with empty id");
    if (a.units.empty())
      problems.push_back("agent " + a.id + " has no water units");
    for (const auto& v : a.units)
      if (v.sign() < 0)
        problems.push_back("agent " + a.id + " has a negative unit value");
    auto& ids = seller ? seller_ids : buyer_ids;
    if (!ids.insert(a.id).second)
      problems.push_back("duplicate agent id " + a.id);
  };
  for (const auto& a : m.sellers) check_agent(a, true);
  for (const auto& a : m.buyers) check_agent(a, false);
  for (const auto& id : seller_ids)
    if (buyer_ids.count(id))
      problems.push_back("agent id " + id + " appears on both sides");
  for (const auto& [s, b] : m.compat_edges) {
    if (!seller_ids.count(s))
      problems.push_back("compatibility edge references unknown seller " + s);
    if (!buyer_ids.count(b))
      problems.push_back("compatibility edge references unknown buyer " + b);
  }
  if (m.monotone) {
    for (const auto& a : m.sellers)
      if (!a.non_decreasing())
        problems.push_back("instance flagged monotone but seller " + a.id +
                           " values are not non-decreasing");
    for (const auto& a : m.buyers)
      if (!a.non_increasing())
        problems.push_back("instance flagged monotone but buyer " + a.id +
                           " values are not non-increasing");
  }
  if (m.unit_edges) {
    for (const auto& e : *m.unit_edges) {
      const Agent* s = m.find_seller(e.seller);
      const Agent* b = m.find_buyer(e.buyer);
      if (!s || e.seller_index < 1 || e.seller_index > s->unit_count())
        problems.push_back("unit edge references unknown seller unit " +
                           e.seller + "#" + std::to_string(e.seller_index));
      if (!b || e.buyer_index < 1 || e.buyer_index > b->unit_count())
        problems.push_back("unit edge references unknown buyer unit " +
                           e.buyer + "#" + std::to_string(e.buyer_index));
    }
  }
  return problems;
}

inline void require_valid(const MarketInstance& m) {
  auto problems = validate_instance(m);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// Unit-level bipartite graph between seller units (left) and buyer units
// (right). Node order is canonical: agents sorted by id, units by index, so
// downstream algorithms are deterministic regardless of how the instance
// lists its agents.
struct ResourcesNeedsGraph {
  struct Edge {
    int left = 0;   // index into left_units
    int right = 0;  // index into right_units
    Rat weight;     // buyer value - seller value
  };
  std::vector<UnitRef> left_units;
  std::vector<UnitRef> right_units;
  std::vector<Edge> edges;

  std::optional<int> left_index(const UnitRef& u) const {
    return find_index(left_units, u);
  }
  std::optional<int> right_index(const UnitRef& u) const {
    return find_index(right_units, u);
  }
  bool has_edge(int left, int right) const {
    for (const auto& e : edges)
      if (e.left == left && e.right == right) return true;
    return false;
  }

private:
  static std::optional<int> find_index(const std::vector<UnitRef>& units,
                                       const UnitRef& u) {
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i] == u) return static_cast<int>(i);
    return std::nullopt;
  }
};

// Builds the unit-level graph. With agent-level compatibility, an edge
// (s_i, b_j) exists iff the agents are compatible and buyer value >= seller
// value; its weight is the (nonnegative) value gap. With explicit unit
// edges, exactly those pairs become edges and the value filter is skipped,
// so weights may be negative.
inline ResourcesNeedsGraph build_resources_needs_graph(
    const MarketInstance& m) {
  require_valid(m);
  ResourcesNeedsGraph g;
  std::map<UnitRef, int> left_ix, right_ix;
  std::vector<const Agent*> sellers, buyers;
  for (const auto& a : m.sellers) sellers.push_back(&a);
  for (const auto& b : m.buyers) buyers.push_back(&b);
  auto by_id = [](const Agent* a, const Agent* b) { return a->id < b->id; };
  std::sort(sellers.begin(), sellers.end(), by_id);
  std::sort(buyers.begin(), buyers.end(), by_id);
  for (const Agent* a : sellers)
    for (int i = 1; i <= a->unit_count(); ++i) {
      left_ix[{a->id, i}] = static_cast<int>(g.left_units.size());
      g.left_units.push_back({a->id, i});
    }
  for (const Agent* b : buyers)
    for (int j = 1; j <= b->unit_count(); ++j) {
      right_ix[{b->id, j}] = static_cast<int>(g.right_units.size());
      g.right_units.push_back({b->id, j});
    }
  if (m.unit_edges) {
    std::set<std::pair<int, int>> seen;
    for (const auto& e : *m.unit_edges) {
      int l = left_ix.at({e.seller, e.seller_index});
      int r = right_ix.at({e.buyer, e.buyer_index});
      if (!seen.insert({l, r}).second) continue;
      Rat w = m.find_buyer(e.buyer)->unit_value(e.buyer_index) -
              m.find_seller(e.seller)->unit_value(e.seller_index);
      g.edges.push_back({l, r, w});
    }
  } else {
    for (const auto& [sid, bid] : m.compat_edges) {
      const Agent* s = m.find_seller(sid);
      const Agent* b = m.find_buyer(bid);
      for (int i = 1; i <= s->unit_count(); ++i)
        for (int j = 1; j <= b->unit_count(); ++j) {
          Rat w = b->unit_value(j) - s->unit_value(i);
          if (w.sign() >= 0)
            g.edges.push_back({left_ix.at({sid, i}), right_ix.at({bid, j}), w});
        }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.left, a.right) < std::pair(b.left, b.right);
  });
  return g;
}

// A set of (seller unit, buyer unit) trades. Kept sorted for reproducible
// output; validity is a separate check (validate_assignment).
struct TradingAssignment {
  std::vector<std::pair<UnitRef, UnitRef>> pairs;

  void normalize() { std::sort(pairs.begin(), pairs.end()); }
  int size() const { return static_cast<int>(pairs.size()); }

  // Units received per buyer.
  std::map<std::string, int> buyer_counts() const {
    std::map<std::string, int> n;
    for (const auto& [s, b] : pairs) n[b.agent]++;
    return n;
  }
};

namespace detail {
inline const Agent& agent_for_unit(const MarketInstance& m, const UnitRef& u,
                                   bool seller) {
  const Agent* a = seller ? m.find_seller(u.agent) : m.find_buyer(u.agent);
  if (!a || u.index < 1 || u.index > a->unit_count())
    throw ValidationError({std::string("assignment references unknown ") +
                           (seller ? "seller" : "buyer") + " unit " + u.agent +
                           "#" + std::to_string(u.index)});
  return *a;
}
}  // namespace detail

// Sum of (buyer value - seller value) over all trades.
inline Rat welfare(const TradingAssignment& t, const MarketInstance& m) {
  Rat total;
  for (const auto& [su, bu] : t.pairs) {
    const Agent& s = detail::agent_for_unit(m, su, true);
    const Agent& b = detail::agent_for_unit(m, bu, false);
    total += b.unit_value(bu.index) - s.unit_value(su.index);
  }
  return total;
}

// Pre-trade value: what the sellers' units are worth if nothing trades.
inline Rat sigma0(const MarketInstance& m) {
  Rat total;
  for (const auto& s : m.sellers)
    for (const auto& v : s.units) total += v;
  return total;
}

inline Rat total_value(const TradingAssignment& t, const MarketInstance& m) {
  return sigma0(m) + welfare(t, m);
}

enum class ViolationKind {
  UnknownUnit,
  DuplicateUnit,
  NotCompatible,   // agents not adjacent in the compatibility graph
  ValueOrder,      // buyer values the unit below the seller's value
  NotAnEdge,       // pair not in the explicit unit-edge list
  PrefixGap,       // unit i matched while unit i-1 is not
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Checks the four validity conditions: matching, compatibility, value order
// and per-agent prefix consistency. Violations are data, not errors; an
// empty result means the assignment is valid.
inline std::vector<Violation> validate_assignment(const TradingAssignment& t,
                                                  const MarketInstance& m) {
  std::vector<Violation> out;
  std::set<UnitRef> seller_used, buyer_used;
  std::set<std::pair<std::string, std::string>> compat(m.compat_edges.begin(),
                                                       m.compat_edges.end());
  std::set<UnitEdge> explicit_edges;
  if (m.unit_edges)
    explicit_edges.insert(m.unit_edges->begin(), m.unit_edges->end());

  auto unit_name = [](const UnitRef& u) {
    return u.agent + "#" + std::to_string(u.index);
  };

  for (const auto& [su, bu] : t.pairs) {
    const Agent* s = m.find_seller(su.agent);
    const Agent* b = m.find_buyer(bu.agent);
    if (!s || su.index < 1 || su.index > s->unit_count()) {
      out.push_back({ViolationKind::UnknownUnit,
                     "unknown seller unit " + unit_name(su)});
      continue;
    }
    if (!b || bu.index < 1 || bu.index > b->unit_count()) {
      out.push_back({ViolationKind::UnknownUnit,
                     "unknown buyer unit " + unit_name(bu)});
      continue;
    }
    if (!seller_used.insert(su).second)
      out.push_back({ViolationKind::DuplicateUnit,
                     "seller unit " + unit_name(su) + " matched twice"});
    if (!buyer_used.insert(bu).second)
      out.push_back({ViolationKind::DuplicateUnit,
                     "buyer unit " + unit_name(bu) + " matched twice"});
    if (m.unit_edges) {
      if (!explicit_edges.count({su.agent, su.index, bu.agent, bu.index}))
        out.push_back({ViolationKind::NotAnEdge,
                       "pair " + unit_name(su) + " -> " + unit_name(bu) +
                           " is not a permitted unit edge"});
    } else {
      if (!compat.count({su.agent, bu.agent}))
        out.push_back({ViolationKind::NotCompatible,
                       "agents " + su.agent + " and " + bu.agent +
                           " are not compatible"});
      if (b->unit_value(bu.index) < s->unit_value(su.index))
        out.push_back({ViolationKind::ValueOrder,
                       "pair " + unit_name(su) + " -> " + unit_name(bu) +
                           " has buyer value below seller value"});
    }
  }

  auto check_prefix = [&](const std::vector<Agent>& agents,
                          const std::set<UnitRef>& used) {
    for (const auto& a : agents)
      for (int i = 2; i <= a.unit_count(); ++i)
        if (used.count({a.id, i}) && !used.count({a.id, i - 1}))
          out.push_back({ViolationKind::PrefixGap,
                         "unit " + a.id + "#" + std::to_string(i) +
                             " matched while #" + std::to_string(i - 1) +
                             " is not"});
  };
  check_prefix(m.sellers, seller_used);
  check_prefix(m.buyers, buyer_used);
  return out;
}

// Per-buyer satisfaction eta_b / gamma_b, buyers in instance order.
struct SatisfactionVector {
  std::vector<std::string> buyer_ids;
  std::vector<Rat> ratios;

  std::vector<Rat> sorted_ascending() const {
    std::vector<Rat> s = ratios;
    std::sort(s.begin(), s.end());
    return s;
  }
};

inline SatisfactionVector satisfaction_vector(const TradingAssignment& t,
                                              const MarketInstance& m) {
  auto counts = t.buyer_counts();
  SatisfactionVector v;
  for (const auto& b : m.buyers) {
    auto it = counts.find(b.id);
    long long eta = it == counts.end() ? 0 : it->second;
    v.buyer_ids.push_back(b.id);
    v.ratios.push_back(Rat(eta, b.unit_count()));
  }
  return v;
}

}  // namespace watertrade
