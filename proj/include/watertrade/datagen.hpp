#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "watertrade/model.hpp"
#include "watertrade/rng.hpp"

namespace watertrade {

// Synthetic market: N agents with k units each on one stream. availability
// in [0,1] sets the seller cutoff, value_correlation in [0,1] couples
// seniority and crop value, beta_high in [1/2,1] is the high-value slope
// (the low slope is its complement).
struct SyntheticConfig {
  int agents = 10;
  int units_per_agent = 5;
  Rat availability{1, 2};       // delta
  Rat value_correlation{1, 2};  // lambda
  Rat beta_high{9, 10};
  std::uint64_t seed = 0;
};

inline std::vector<std::string> validate_synthetic_config(
    const SyntheticConfig& c) {
  std::vector<std::string> problems;
  if (c.agents < 1) problems.push_back("need at least one agent");
  if (c.units_per_agent < 1) problems.push_back("need at least one unit per agent");
  if (c.availability < Rat(0) || Rat(1) < c.availability)
    problems.push_back("availability must lie in [0,1]");
  if (c.value_correlation < Rat(0) || Rat(1) < c.value_correlation)
    problems.push_back("value correlation must lie in [0,1]");
  if (c.beta_high < Rat(1, 2) || Rat(1) < c.beta_high)
    problems.push_back("high-value slope must lie in [0.5,1]");
  return problems;
}

// Agent i (1-based) is a seller iff i/N >= 1 - availability, with zero
// availability meaning nobody holds water (the literal rule would still
// crown agent N). Each agent draws its crop class from its own seed stream,
// so a class draw does not depend on how other agents' draws consumed
// randomness. High-value probability: lambda*i/N + (1-lambda)*(1-i/N).
// Sellers value unit l at beta*l (rising), buyers at beta*(k-l+1) (falling);
// any buyer may buy from any seller.
inline MarketInstance gen_synthetic(const SyntheticConfig& c) {
  auto problems = validate_synthetic_config(c);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  MarketInstance m;
  int n = c.agents;
  int k = c.units_per_agent;
  for (int i = 1; i <= n; ++i) {
    Rat frac(i, n);
    bool seller = c.availability.sign() > 0 && !(frac < Rat(1) - c.availability);
    Rat p_high = c.value_correlation * frac +
                 (Rat(1) - c.value_correlation) * (Rat(1) - frac);
    SplitMix64 agent_rng(split_stream(c.seed, static_cast<std::uint64_t>(i)));
    bool high = agent_rng.uniform01() < p_high.to_double();
    Rat beta = high ? c.beta_high : Rat(1) - c.beta_high;
    Agent a;
    a.id = "a" + std::to_string(i);
    a.seniority_rank = i;  // larger i, more senior
    for (int l = 1; l <= k; ++l)
      a.units.push_back(seller ? beta * Rat(l) : beta * Rat(k - l + 1));
    (seller ? m.sellers : m.buyers).push_back(std::move(a));
  }
  for (const auto& s : m.sellers)
    for (const auto& b : m.buyers) m.compat_edges.push_back({s.id, b.id});
  m.monotone = true;
  return m;
}

// One water right and the farm attributes behind it. Exactly one of
// demand_mm_per_acre (converted via acre-millimeters, 304.8 mm per foot)
// or volume_acre_ft must be present.
struct WaterRightRecord {
  std::string right_id;
  int priority_rank = 0;  // higher = more senior
  std::string stream_id;
  int stream_position = 0;
  Rat acreage;
  Rat value_per_acre;
  std::optional<Rat> demand_mm_per_acre;
  std::optional<Rat> volume_acre_ft;
};

struct IngestResult {
  MarketInstance instance;
  std::map<std::string, std::string> agent_streams;
  std::map<std::string, long long> volumes;  // right id -> acre-feet
  Rat total_volume;      // W: baseline capacity
  Rat reduced_capacity;  // R = availability * W
};

inline std::vector<std::string> validate_records(
    const std::vector<WaterRightRecord>& records) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto complain = [&](const std::string& what) {
      problems.push_back("record " + std::to_string(i + 1) + " (" +
                         r.right_id + "): " + what);
    };
    if (r.right_id.empty()) complain("empty right id");
    if (!ids.insert(r.right_id).second) complain("duplicate right id");
    if (!(Rat(0) < r.acreage)) complain("acreage must be positive");
    if (r.value_per_acre.sign() < 0) complain("negative value per acre");
    if (r.demand_mm_per_acre.has_value() == r.volume_acre_ft.has_value())
      complain("need exactly one of demand_mm_per_acre and volume_acre_ft");
    if (r.demand_mm_per_acre && !(Rat(0) < *r.demand_mm_per_acre))
      complain("demand must be positive");
    if (r.volume_acre_ft && !(Rat(0) < *r.volume_acre_ft))
      complain("volume must be positive");
  }
  return problems;
}

// Volume of a right in whole acre-feet. The mm path rounds half to even
// (the conversion formula does not say how to break ties; banker's rounding
// keeps it deterministic and unbiased).
inline long long right_volume_acre_ft(const WaterRightRecord& r) {
  if (r.volume_acre_ft) return r.volume_acre_ft->round_half_even();
  Rat volume = r.acreage * (*r.demand_mm_per_acre) / Rat(3048, 10);
  return volume.round_half_even();
}

// Disaggregates rights into uniformly sized units, values them at
// (acreage * value_per_acre / volume) per acre-foot, and walks the rights
// most-senior-first marking sellers until the next right would push the
// cumulative volume past availability * total. Partial units round up.
// Seller unit lists ascend in value and buyer lists descend, so ingested
// instances always satisfy the monotone flag.
inline IngestResult ingest_water_rights(
    const std::vector<WaterRightRecord>& records, int unit_size,
    Rat availability) {
  auto problems = validate_records(records);
  if (unit_size <= 0) problems.push_back("unit size must be positive");
  if (availability < Rat(0) || Rat(1) < availability)
    problems.push_back("availability must lie in [0,1]");
  if (!problems.empty()) throw ValidationError(std::move(problems));

  IngestResult out;
  struct Prepared {
    const WaterRightRecord* rec;
    long long volume;
    long long units;
    Rat unit_value;
  };
  std::vector<Prepared> prepared;
  for (const auto& r : records) {
    Prepared p;
    p.rec = &r;
    p.volume = right_volume_acre_ft(r);
    if (p.volume <= 0)
      throw ValidationError({"right " + r.right_id +
                             " has zero volume after rounding"});
    p.units = (Rat(p.volume) / Rat(unit_size)).ceil();
    Rat price_per_acre_ft = r.acreage * r.value_per_acre / Rat(p.volume);
    p.unit_value = price_per_acre_ft * Rat(unit_size);
    out.total_volume += Rat(p.volume);
    out.volumes[r.right_id] = p.volume;
    prepared.push_back(p);
  }
  out.reduced_capacity = availability * out.total_volume;

  // seniority order: rank descending, id as the deterministic tie-break
  std::vector<const Prepared*> by_seniority;
  for (const auto& p : prepared) by_seniority.push_back(&p);
  std::sort(by_seniority.begin(), by_seniority.end(),
            [](const Prepared* a, const Prepared* b) {
              if (a->rec->priority_rank != b->rec->priority_rank)
                return a->rec->priority_rank > b->rec->priority_rank;
              return a->rec->right_id < b->rec->right_id;
            });
  std::set<std::string> seller_ids;
  Rat cumulative;
  for (const Prepared* p : by_seniority) {
    if (out.reduced_capacity < cumulative + Rat(p->volume)) break;
    cumulative += Rat(p->volume);
    seller_ids.insert(p->rec->right_id);
  }

  for (const auto& p : prepared) {
    Agent a;
    a.id = p.rec->right_id;
    a.seniority_rank = p.rec->priority_rank;
    a.units.assign(static_cast<std::size_t>(p.units), p.unit_value);
    bool seller = seller_ids.count(a.id) > 0;
    // uniform per-unit values: both orders hold, sort anyway by the rule
    if (seller)
      std::sort(a.units.begin(), a.units.end());
    else
      std::sort(a.units.begin(), a.units.end(), std::greater<Rat>());
    (seller ? out.instance.sellers : out.instance.buyers).push_back(a);
    out.agent_streams[p.rec->right_id] = p.rec->stream_id;
  }
  for (const auto& s : out.instance.sellers)
    for (const auto& b : out.instance.buyers)
      out.instance.compat_edges.push_back({s.id, b.id});
  out.instance.monotone = true;
  return out;
}

// A forest of stream segments; two agents are tradable neighbours when one
// segment lies on the other's path to the root (same stream, or upstream /
// downstream of it), but not across different forks.
struct StreamTopology {
  std::map<std::string, std::optional<std::string>> parent;

  bool known(const std::string& id) const { return parent.count(id) > 0; }

  bool is_ancestor(const std::string& a, const std::string& d) const {
    std::optional<std::string> at = d;
    while (at) {
      if (*at == a) return true;
      auto it = parent.find(*at);
      if (it == parent.end()) return false;
      at = it->second;
    }
    return false;
  }

  bool related(const std::string& a, const std::string& b) const {
    return is_ancestor(a, b) || is_ancestor(b, a);
  }
};

// Replaces the compatibility edges with the geographic rule: seller and
// buyer must sit on related stream segments.
inline MarketInstance build_geo_compatibility(
    const MarketInstance& m,
    const std::map<std::string, std::string>& agent_streams,
    const StreamTopology& topo) {
  require_valid(m);
  std::vector<std::string> problems;
  auto stream_of = [&](const std::string& id) -> const std::string* {
    auto it = agent_streams.find(id);
    if (it == agent_streams.end()) {
      problems.push_back("agent " + id + " has no stream mapping");
      return nullptr;
    }
    if (!topo.known(it->second)) {
      problems.push_back("agent " + id + " references unknown stream " +
                         it->second);
      return nullptr;
    }
    return &it->second;
  };
  for (const auto& a : m.sellers) stream_of(a.id);
  for (const auto& a : m.buyers) stream_of(a.id);
  if (!problems.empty()) throw ValidationError(std::move(problems));

  MarketInstance out = m;
  out.compat_edges.clear();
  for (const auto& s : m.sellers)
    for (const auto& b : m.buyers)
      if (topo.related(agent_streams.at(s.id), agent_streams.at(b.id)))
        out.compat_edges.push_back({s.id, b.id});
  return out;
}

}  // namespace watertrade
