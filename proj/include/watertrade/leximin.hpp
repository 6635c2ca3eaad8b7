#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "watertrade/matching.hpp"
#include "watertrade/model.hpp"

namespace watertrade {

using BigInt = boost::multiprecision::cpp_int;

struct LeximinBuyer {
  std::string id;
  int requirement = 1;  // units wanted; satisfaction is received/requirement
};

// Single seller with `unit_count` identical units and a unit-buyer
// compatibility graph. Unit indices are 1-based.
struct LeximinInstance {
  int unit_count = 0;
  std::vector<LeximinBuyer> buyers;
  std::vector<std::pair<int, std::string>> edges;  // (unit, buyer id)

  const LeximinBuyer* find_buyer(const std::string& id) const {
    for (const auto& b : buyers)
      if (b.id == id) return &b;
    return nullptr;
  }
};

inline std::vector<std::string> validate_leximin_instance(
    const LeximinInstance& inst) {
  std::vector<std::string> problems;
  if (inst.unit_count < 1) problems.push_back("unit count must be positive");
  std::set<std::string> ids;
  for (const auto& b : inst.buyers) {
    if (b.requirement < 1)
      problems.push_back("buyer " + b.id + " has a non-positive requirement");
    if (!ids.insert(b.id).second)
      problems.push_back("duplicate buyer id " + b.id);
  }
  std::set<std::pair<int, std::string>> seen;
  for (const auto& [unit, id] : inst.edges) {
    if (unit < 1 || unit > inst.unit_count)
      problems.push_back("edge references unknown unit " +
                         std::to_string(unit));
    if (!ids.count(id)) problems.push_back("edge references unknown buyer " + id);
    if (!seen.insert({unit, id}).second)
      problems.push_back("duplicate edge (" + std::to_string(unit) + "," + id +
                         ")");
  }
  return problems;
}

inline void require_valid(const LeximinInstance& inst) {
  auto problems = validate_leximin_instance(inst);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// The ordinal benefit construction. F holds every satisfaction ratio that
// can arise (all fractions over unit indices, plus the per-buyer ratios
// l/requirement the slots touch, plus zero) sorted in descending order;
// rank(q) is the 1-based position in that order, so low satisfaction means
// high rank. A buyer's l-th unit is worth
//   base^rank((l-1)/requirement) - base^rank(l/requirement)
// with base = max(2, |B| * units). Weighting the increment by where it
// starts alone is not enough: with one unit and two idle buyers of
// requirements 2 and 6, both first units would weigh base^rank(0) and the
// matching could hand the unit to the wrong buyer, though satisfaction 1/2
// beats 1/6 in leximin order. The start-minus-end form telescopes per buyer
// to base^rank(0) - base^rank(final ratio), which orders totals exactly by
// leximin.
struct BenefitTable {
  std::vector<Rat> ratios;  // descending; last is always 0
  BigInt base = 2;
  // per buyer, per slot l: ranks of (l-1)/requirement and l/requirement
  std::vector<std::vector<int>> slot_ranks;      // start of the increment
  std::vector<std::vector<int>> slot_end_ranks;  // where it lands

  int size() const { return static_cast<int>(ratios.size()); }

  int rank_of(const Rat& q) const {
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (ratios[i] == q) return static_cast<int>(i) + 1;
    throw std::logic_error("ratio not in the table: " + q.str());
  }

  BigInt weight_of_rank(int rank) const {
    BigInt w = 1;
    for (int i = 0; i < rank; ++i) w *= base;
    return w;
  }

  BigInt slot_weight(int buyer_ix, int slot) const {
    return weight_of_rank(slot_ranks[buyer_ix][slot - 1]) -
           weight_of_rank(slot_end_ranks[buyer_ix][slot - 1]);
  }
};

// Buyers can hold at most min(requirement, unit_count) slots; later slots
// can never be filled because there are only unit_count units.
inline int slot_count(const LeximinInstance& inst, const LeximinBuyer& b) {
  return std::min(b.requirement, inst.unit_count);
}

inline BenefitTable build_ratio_ranks(const LeximinInstance& inst) {
  require_valid(inst);
  BenefitTable t;
  std::set<Rat, std::greater<Rat>> ratios;
  ratios.insert(Rat(0));
  for (int num = 1; num <= inst.unit_count; ++num)
    for (int den = num; den <= inst.unit_count; ++den)
      ratios.insert(Rat(num, den));
  for (const auto& b : inst.buyers)
    for (int l = 1; l <= slot_count(inst, b); ++l) {
      ratios.insert(Rat(l - 1, b.requirement));
      ratios.insert(Rat(l, b.requirement));
    }
  t.ratios.assign(ratios.begin(), ratios.end());
  long long base = static_cast<long long>(inst.buyers.size()) *
                   static_cast<long long>(inst.unit_count);
  t.base = base < 2 ? 2 : base;
  for (const auto& b : inst.buyers) {
    std::vector<int> starts, ends;
    for (int l = 1; l <= slot_count(inst, b); ++l) {
      starts.push_back(t.rank_of(Rat(l - 1, b.requirement)));
      ends.push_back(t.rank_of(Rat(l, b.requirement)));
    }
    t.slot_ranks.push_back(std::move(starts));
    t.slot_end_ranks.push_back(std::move(ends));
  }
  return t;
}

// Per-rank counts of collected increments; lexicographic comparison from the
// highest rank down equals big-integer comparison in base `base` as long as
// every count stays below the base (asserted by the tests).
struct RankVector {
  std::vector<long long> counts;  // index = rank, 0 unused

  explicit RankVector(int table_size) : counts(table_size + 1, 0) {}

  void add_rank(int rank) { counts[static_cast<std::size_t>(rank)]++; }

  BigInt to_bigint(const BigInt& base) const {
    // sum of counts[r] * base^r
    BigInt total = 0;
    for (std::size_t r = counts.size(); r-- > 1;)
      total = total * base + counts[r];
    return total * base;
  }

  // lexicographic from the most significant rank
  friend std::strong_ordering operator<=>(const RankVector& a,
                                          const RankVector& b) {
    for (std::size_t r = a.counts.size(); r-- > 1;) {
      if (a.counts[r] < b.counts[r]) return std::strong_ordering::less;
      if (a.counts[r] > b.counts[r]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const RankVector& a, const RankVector& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

enum class LeximinOrder { Less, Equal, Greater };

// Sorts both vectors ascending and compares lexicographically: the first
// position where the sorted vectors differ decides.
inline LeximinOrder leximin_compare(const std::vector<Rat>& a,
                                    const std::vector<Rat>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("satisfaction vectors differ in length");
  std::vector<Rat> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i] < sb[i]) return LeximinOrder::Less;
    if (sb[i] < sa[i]) return LeximinOrder::Greater;
  }
  return LeximinOrder::Equal;
}

struct LeximinSolution {
  std::vector<std::pair<int, std::string>> pairs;  // (unit, buyer id)
  SatisfactionVector satisfaction;
  BenefitTable table;
};

namespace detail {

inline SatisfactionVector leximin_satisfaction(
    const LeximinInstance& inst,
    const std::vector<std::pair<int, std::string>>& pairs) {
  std::map<std::string, int> counts;
  for (const auto& [unit, id] : pairs) counts[id]++;
  SatisfactionVector v;
  for (const auto& b : inst.buyers) {
    v.buyer_ids.push_back(b.id);
    v.ratios.push_back(Rat(counts[b.id], b.requirement));
  }
  return v;
}

}  // namespace detail

// Leximin-optimal assignment via the benefit construction: expand each buyer
// into slots weighted by the benefit increments and take an exact
// maximum-weight matching between units and slots. Buyers then relabel their
// matched units onto slots 1..m (slot weights are maximal at low slots, so
// the relabeling never loses weight).
inline LeximinSolution solve_leximin(const LeximinInstance& inst) {
  require_valid(inst);
  BenefitTable table = build_ratio_ranks(inst);
  // slot nodes in (buyer order, slot) order
  std::vector<std::pair<int, int>> slots;  // (buyer ix, slot)
  std::map<std::string, int> buyer_ix;
  for (std::size_t b = 0; b < inst.buyers.size(); ++b) {
    buyer_ix[inst.buyers[b].id] = static_cast<int>(b);
    for (int l = 1; l <= slot_count(inst, inst.buyers[b]); ++l)
      slots.push_back({static_cast<int>(b), l});
  }
  std::vector<std::tuple<int, int, BigInt>> edges;
  for (const auto& [unit, id] : inst.edges) {
    int b = buyer_ix.at(id);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s].first == b)
        edges.emplace_back(unit - 1, static_cast<int>(s),
                           table.slot_weight(b, slots[s].second));
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return std::pair(std::get<0>(a), std::get<1>(a)) <
           std::pair(std::get<0>(b), std::get<1>(b));
  });
  auto chosen = detail::max_weight_matching_impl(
      inst.unit_count, static_cast<int>(slots.size()), edges);
  // relabel: per buyer, matched units take slots 1..m in unit order
  std::map<int, std::vector<int>> units_of;  // buyer ix -> units
  for (int e : chosen)
    units_of[slots[std::get<1>(edges[e])].first].push_back(std::get<0>(edges[e]) +
                                                           1);
  LeximinSolution sol;
  for (auto& [b, units] : units_of) {
    std::sort(units.begin(), units.end());
    for (int u : units) sol.pairs.push_back({u, inst.buyers[b].id});
  }
  std::sort(sol.pairs.begin(), sol.pairs.end());
  sol.satisfaction = detail::leximin_satisfaction(inst, sol.pairs);
  sol.table = std::move(table);
  return sol;
}

struct LeximinBruteForceCaps {
  int max_units = 6;
  int max_buyers = 4;
};

// Exhaustive oracle: every assignment of units to compatible buyers within
// requirements, leximin-compared.
inline LeximinSolution brute_force_leximin(
    const LeximinInstance& inst, const LeximinBruteForceCaps& caps = {}) {
  require_valid(inst);
  if (inst.unit_count > caps.max_units ||
      static_cast<int>(inst.buyers.size()) > caps.max_buyers)
    throw CapExceeded("leximin brute force cap exceeded");
  std::map<std::string, int> buyer_ix;
  for (std::size_t b = 0; b < inst.buyers.size(); ++b)
    buyer_ix[inst.buyers[b].id] = static_cast<int>(b);
  std::vector<std::vector<int>> options(inst.unit_count);
  for (const auto& [unit, id] : inst.edges)
    options[unit - 1].push_back(buyer_ix.at(id));
  for (auto& o : options) std::sort(o.begin(), o.end());

  std::vector<int> received(inst.buyers.size(), 0);
  std::vector<int> pick(inst.unit_count, -1);
  std::vector<int> best_pick;
  std::vector<Rat> best_vec;
  std::function<void(int)> walk = [&](int unit) {
    if (unit == inst.unit_count) {
      std::vector<Rat> vec;
      for (std::size_t b = 0; b < inst.buyers.size(); ++b)
        vec.push_back(Rat(received[b], inst.buyers[b].requirement));
      if (best_vec.empty() ||
          leximin_compare(vec, best_vec) == LeximinOrder::Greater) {
        best_vec = vec;
        best_pick = pick;
      }
      return;
    }
    pick[unit] = -1;
    walk(unit + 1);
    for (int b : options[unit]) {
      if (received[b] >= inst.buyers[b].requirement) continue;
      received[b]++;
      pick[unit] = b;
      walk(unit + 1);
      pick[unit] = -1;
      received[b]--;
    }
  };
  walk(0);
  LeximinSolution sol;
  for (int u = 0; u < inst.unit_count; ++u)
    if (best_pick.size() > static_cast<std::size_t>(u) && best_pick[u] >= 0)
      sol.pairs.push_back({u + 1, inst.buyers[best_pick[u]].id});
  sol.satisfaction = detail::leximin_satisfaction(inst, sol.pairs);
  sol.table = build_ratio_ranks(inst);
  return sol;
}

// The dominance property behind the construction: each increment strictly
// outweighs the sum of every increment with a strictly larger satisfaction
// ratio, across all buyers. Checked exactly.
inline bool check_benefit_dominance(const LeximinInstance& inst,
                                    const BenefitTable& t) {
  for (std::size_t j = 0; j < inst.buyers.size(); ++j) {
    for (int l = 1; l <= slot_count(inst, inst.buyers[j]); ++l) {
      Rat q(l - 1, inst.buyers[j].requirement);
      BigInt mine = t.slot_weight(static_cast<int>(j), l);
      BigInt others = 0;
      for (std::size_t j2 = 0; j2 < inst.buyers.size(); ++j2)
        for (int l2 = 1; l2 <= slot_count(inst, inst.buyers[j2]); ++l2)
          if (q < Rat(l2 - 1, inst.buyers[j2].requirement))
            others += t.slot_weight(static_cast<int>(j2), l2);
      if (!(mine > others)) return false;
    }
  }
  return true;
}

// Validity of the benefit function: starts at zero, non-decreasing,
// diminishing increments, increments at most one unit of the scale (here:
// at most base^|F|, the scaled image of 1).
inline bool check_benefit_validity(const LeximinInstance& inst,
                                   const BenefitTable& t) {
  BigInt unit_scale = 1;
  for (int i = 0; i < t.size(); ++i) unit_scale *= t.base;
  for (std::size_t j = 0; j < inst.buyers.size(); ++j) {
    BigInt mu = 0;  // mu(0) = 0
    BigInt prev_delta = 0;
    for (int l = 1; l <= slot_count(inst, inst.buyers[j]); ++l) {
      BigInt delta = t.slot_weight(static_cast<int>(j), l);
      if (delta <= 0) return false;            // monotone non-decreasing mu
      if (l > 1 && delta > prev_delta) return false;  // diminishing returns
      if (delta > unit_scale) return false;    // delta <= 1 in ratio scale
      mu += delta;
      prev_delta = delta;
    }
  }
  return true;
}

}  // namespace watertrade
