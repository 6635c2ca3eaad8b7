#pragma once

#include <string>
#include <vector>

#include "watertrade/model.hpp"
#include "watertrade/rng.hpp"

namespace watertrade::corpus {

// Seeded random monotone instance with at most max_total_units units in
// total. Values are small decimals (denominator 10) with overlapping seller
// and buyer ranges, and agents hold at most three units each; that keeps
// the value filter from emptying the graph and gives the corpus real
// multi-agent matchings with prefix interaction.
inline MarketInstance random_monotone_instance(SplitMix64& rng,
                                               int max_total_units = 8) {
  MarketInstance m;
  int total =
      static_cast<int>(rng.range(std::min(4, max_total_units), max_total_units));
  int seller_units = static_cast<int>(rng.range(1, total - 1));
  int buyer_units = total - seller_units;
  auto deal_units = [&](int pool) {
    std::vector<int> counts;
    while (pool > 0) {
      int take = static_cast<int>(rng.range(1, std::min(pool, 3)));
      counts.push_back(take);
      pool -= take;
    }
    return counts;
  };
  auto seller_counts = deal_units(seller_units);
  auto buyer_counts = deal_units(buyer_units);
  int rank = 1;
  for (std::size_t i = 0; i < seller_counts.size(); ++i) {
    Agent a;
    a.id = "s" + std::to_string(i + 1);
    a.seniority_rank = rank++;
    std::vector<Rat> vals;
    for (int u = 0; u < seller_counts[i]; ++u)
      vals.push_back(Rat(rng.range(0, 30), 10));
    std::sort(vals.begin(), vals.end());
    a.units = vals;
    m.sellers.push_back(a);
  }
  for (std::size_t i = 0; i < buyer_counts.size(); ++i) {
    Agent a;
    a.id = "b" + std::to_string(i + 1);
    a.seniority_rank = rank++;
    std::vector<Rat> vals;
    for (int u = 0; u < buyer_counts[i]; ++u)
      vals.push_back(Rat(rng.range(10, 50), 10));
    std::sort(vals.begin(), vals.end(), std::greater<Rat>());
    a.units = vals;
    m.buyers.push_back(a);
  }
  for (const auto& s : m.sellers)
    for (const auto& b : m.buyers)
      if (rng.chance(0.85)) m.compat_edges.push_back({s.id, b.id});
  m.monotone = true;
  return m;
}

// Random (not necessarily valid) assignment over an instance's units; used
// to exercise validate_assignment against a direct re-check.
inline TradingAssignment random_assignment(SplitMix64& rng,
                                           const MarketInstance& m) {
  TradingAssignment t;
  std::vector<UnitRef> seller_units, buyer_units;
  for (const auto& s : m.sellers)
    for (int i = 1; i <= s.unit_count(); ++i) seller_units.push_back({s.id, i});
  for (const auto& b : m.buyers)
    for (int j = 1; j <= b.unit_count(); ++j) buyer_units.push_back({b.id, j});
  if (seller_units.empty() || buyer_units.empty()) return t;
  int n = static_cast<int>(
      rng.range(0, std::min(seller_units.size(), buyer_units.size())));
  for (int i = 0; i < n; ++i) {
    const auto& su = seller_units[rng.below(seller_units.size())];
    const auto& bu = buyer_units[rng.below(buyer_units.size())];
    t.pairs.push_back({su, bu});
  }
  t.normalize();
  return t;
}

}  // namespace watertrade::corpus
