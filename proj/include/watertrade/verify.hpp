#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "watertrade/corpus.hpp"
#include "watertrade/fairness.hpp"
#include "watertrade/leximin.hpp"
#include "watertrade/reductions.hpp"
#include "watertrade/welfare.hpp"

namespace watertrade::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

using WelfareSolver = std::function<WelfareSolution(const MarketInstance&)>;

inline WelfareSolver default_solver() {
  return [](const MarketInstance& m) { return solve_max_welfare(m); };
}

namespace detail {

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// The fixed fractional solution used by the rounding checks: a 4-cycle of
// halves (s1,s2 x b1,b2) plus a path 0.3/0.7 through s3. Singleton bounds
// r=1 on b1 and b2 have fractional totals exactly 1; the two-buyer group
// {b1,b3} has fractional total 1.3, so its rounded total genuinely varies
// and only its mean is bounded.
struct RoundingFixture {
  MarketInstance m;
  ResourcesNeedsGraph g;
  FractionalSolution z;
  FairnessSpec spec;

  RoundingFixture() {
    m.sellers.push_back({"s1", 1, {Rat(1)}});
    m.sellers.push_back({"s2", 2, {Rat(1)}});
    m.sellers.push_back({"s3", 3, {Rat(1)}});
    m.buyers.push_back({"b1", 4, {Rat(3)}});
    m.buyers.push_back({"b2", 5, {Rat(2)}});
    m.buyers.push_back({"b3", 6, {Rat(4)}});
    m.buyers.push_back({"b4", 7, {Rat(2)}});
    m.compat_edges = {{"s1", "b1"}, {"s2", "b1"}, {"s1", "b2"},
                      {"s2", "b2"}, {"s3", "b3"}, {"s3", "b4"}};
    g = build_resources_needs_graph(m);
    z.z.assign(g.edges.size(), Rat());
    set("s1", "b1", Rat(1, 2));
    set("s1", "b2", Rat(1, 2));
    set("s2", "b1", Rat(1, 2));
    set("s2", "b2", Rat(1, 2));
    set("s3", "b3", Rat(3, 10));
    set("s3", "b4", Rat(7, 10));
    spec.groups.push_back({{"b1"}, 1});
    spec.groups.push_back({{"b2"}, 1});
    spec.groups.push_back({{"b1", "b3"}, 1});  // held in expectation only
  }

  int edge(const std::string& s, const std::string& b) const {
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      if (g.left_units[g.edges[i].left].agent == s &&
          g.right_units[g.edges[i].right].agent == b)
        return static_cast<int>(i);
    throw std::logic_error("fixture edge missing");
  }
  void set(const std::string& s, const std::string& b, Rat v) {
    z.z[static_cast<std::size_t>(edge(s, b))] = v;
  }
};

// Welfare solver vs exhaustive oracle, exact equality on every instance.
inline CheckResult check_welfare_oracle(std::uint64_t seed, int instances,
                                        const WelfareSolver& solver) {
  detail::Timer timer;
  CheckResult r;
  r.name = "welfare solver equals brute force on " +
           std::to_string(instances) + " random monotone instances";
  SplitMix64 rng(seed);
  int bad = 0;
  for (int i = 0; i < instances; ++i) {
    MarketInstance m = corpus::random_monotone_instance(rng, 8);
    WelfareSolution fast = solver(m);
    WelfareSolution slow = brute_force_max_welfare(m);
    if (fast.welfare_value != slow.welfare_value ||
        !validate_assignment(fast.assignment, m).empty())
      ++bad;
  }
  r.pass = bad == 0;
  r.seconds = timer.seconds();
  std::ostringstream os;
  os << bad << " mismatches, " << r.seconds << "s";
  r.detail = os.str();
  return r;
}

// Prefix repair applied to the raw maximum-weight matching: welfare must be
// preserved exactly and the result must validate cleanly.
inline CheckResult check_repair_invariance(std::uint64_t seed, int instances) {
  detail::Timer timer;
  CheckResult r;
  r.name = "prefix repair preserves the raw matching weight on " +
           std::to_string(instances) + " instances";
  SplitMix64 rng(seed);
  int bad = 0;
  for (int i = 0; i < instances; ++i) {
    MarketInstance m = corpus::random_monotone_instance(rng, 8);
    ResourcesNeedsGraph g = build_resources_needs_graph(m);
    WeightedBipartiteGraph wg;
    wg.left_count = static_cast<int>(g.left_units.size());
    wg.right_count = static_cast<int>(g.right_units.size());
    for (const auto& e : g.edges)
      wg.edges.push_back({e.left, e.right, e.weight});
    TradingAssignment raw;
    for (int ix : max_weight_matching(wg))
      raw.pairs.push_back(
          {g.left_units[g.edges[ix].left], g.right_units[g.edges[ix].right]});
    raw.normalize();
    TradingAssignment repaired = repair_prefix(raw, m);
    if (welfare(repaired, m) != welfare(raw, m) ||
        repaired.pairs.size() != raw.pairs.size() ||
        !validate_assignment(repaired, m).empty())
      ++bad;
  }
  r.pass = bad == 0;
  r.seconds = timer.seconds();
  r.detail = std::to_string(bad) + " mismatches";
  return r;
}

// Per-buyer bounds: flow-based solver vs exhaustive search, exact equality
// of welfare (or agreeing infeasibility).
inline CheckResult check_singleton_bounds(std::uint64_t seed, int instances) {
  detail::Timer timer;
  CheckResult r;
  r.name = "per-buyer lower-bound solver equals the bounded oracle on " +
           std::to_string(instances) + " instances";
  SplitMix64 rng(seed);
  int bad = 0, feasible = 0, infeasible = 0;
  for (int i = 0; i < instances; ++i) {
    MarketInstance m = corpus::random_monotone_instance(rng, 8);
    std::map<std::string, long long> bounds;
    for (const auto& b : m.buyers)
      if (rng.chance(0.6)) bounds[b.id] = rng.range(0, 2);
    auto fast = solve_fair_singleton(m, bounds);

    watertrade::detail::AssignmentEnumerator en(m, {});
    const auto& g = en.graph();
    std::optional<Rat> best;
    en.enumerate([&]() {
      std::map<std::string, long long> counts;
      for (int e : en.chosen())
        counts[g.right_units[g.edges[e].right].agent]++;
      for (const auto& [id, need] : bounds)
        if (counts[id] < need) return true;
      Rat w = en.current_welfare();
      if (!best || *best < w) best = w;
      return true;
    });
    if (fast.has_value() != best.has_value())
      ++bad;
    else if (fast && fast->welfare_value != *best)
      ++bad;
    (fast ? feasible : infeasible)++;
  }
  r.pass = bad == 0 && feasible > 0 && infeasible > 0;
  r.seconds = timer.seconds();
  std::ostringstream os;
  os << bad << " mismatches (" << feasible << " feasible, " << infeasible
     << " infeasible)";
  r.detail = os.str();
  return r;
}

inline std::vector<CheckResult> oracle_suite(
    std::uint64_t seed, int instances = 200,
    const WelfareSolver& solver = default_solver()) {
  return {check_welfare_oracle(seed, instances, solver),
          check_repair_invariance(split_stream(seed, 1), instances),
          check_singleton_bounds(split_stream(seed, 2),
                                 std::max(1, instances / 2))};
}

// Dependent rounding on the fixed fractional solution: degree preservation
// on every run, empirical marginals within three standard errors, mean
// welfare within 2% of the LP objective, singleton bounds on every run.
inline std::vector<CheckResult> rounding_suite(std::uint64_t seed,
                                               int runs = 20000) {
  detail::Timer timer;
  RoundingFixture fx;
  const auto& g = fx.g;
  std::vector<long long> hits(g.edges.size(), 0);
  std::vector<Rat> frac_left(g.left_units.size()),
      frac_right(g.right_units.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    frac_left[g.edges[i].left] += fx.z.z[i];
    frac_right[g.edges[i].right] += fx.z.z[i];
  }
  bool degrees_ok = true, bounds_ok = true;
  double welfare_sum = 0;
  std::vector<double> group_sum(fx.spec.groups.size(), 0),
      group_sumsq(fx.spec.groups.size(), 0);
  SplitMix64 rng(seed);
  for (int run = 0; run < runs; ++run) {
    auto rounded = dependent_round(fx.z, g, rng);
    std::vector<long long> dl(g.left_units.size(), 0),
        dr(g.right_units.size(), 0);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      hits[i] += rounded.indicator[i];
      if (rounded.indicator[i]) {
        dl[g.edges[i].left]++;
        dr[g.edges[i].right]++;
      }
    }
    for (std::size_t n = 0; n < dl.size(); ++n)
      if (dl[n] != frac_left[n].floor() && dl[n] != frac_left[n].ceil())
        degrees_ok = false;
    for (std::size_t n = 0; n < dr.size(); ++n)
      if (dr[n] != frac_right[n].floor() && dr[n] != frac_right[n].ceil())
        degrees_ok = false;
    auto counts = rounded.assignment.buyer_counts();
    for (std::size_t gi = 0; gi < fx.spec.groups.size(); ++gi) {
      const auto& grp = fx.spec.groups[gi];
      long long got = 0;
      for (const auto& id : grp.buyers) {
        auto it = counts.find(id);
        got += it == counts.end() ? 0 : it->second;
      }
      // the every-run guarantee is for singletons; groups hold in mean
      if (grp.buyers.size() == 1 && got < grp.lower_bound) bounds_ok = false;
      group_sum[gi] += static_cast<double>(got);
      group_sumsq[gi] += static_cast<double>(got) * static_cast<double>(got);
    }
    welfare_sum += welfare(rounded.assignment, fx.m).to_double();
  }
  bool group_means_ok = true;
  for (std::size_t gi = 0; gi < fx.spec.groups.size(); ++gi) {
    double mean = group_sum[gi] / runs;
    double var = group_sumsq[gi] / runs - mean * mean;
    double se = std::sqrt(std::max(0.0, var) / runs);
    if (mean < static_cast<double>(fx.spec.groups[gi].lower_bound) - 3 * se)
      group_means_ok = false;
  }
  bool marginals_ok = true;
  std::ostringstream marg;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    double ze = fx.z.z[i].to_double();
    double freq = double(hits[i]) / runs;
    double tol = 3 * std::sqrt(ze * (1 - ze) / runs);
    if (std::abs(freq - ze) >= tol) {
      marginals_ok = false;
      marg << " edge" << i << " " << freq << " vs " << ze;
    }
  }
  double lp_obj = fx.z.objective(g).to_double();
  double mean = welfare_sum / runs;
  bool welfare_ok = std::abs(mean - lp_obj) / lp_obj < 0.02;
  double secs = timer.seconds();

  auto mk = [&](const std::string& name, bool pass, const std::string& detail) {
    CheckResult r;
    r.name = name + " over " + std::to_string(runs) + " runs";
    r.pass = pass;
    r.detail = detail;
    r.seconds = secs;
    return r;
  };
  std::ostringstream wd;
  wd << "mean " << mean << " vs objective " << lp_obj;
  return {
      mk("rounded degrees stay in floor/ceiling", degrees_ok, ""),
      mk("per-edge marginals within three standard errors", marginals_ok,
         marg.str()),
      mk("mean rounded welfare within 2% of the fractional objective",
         welfare_ok, wd.str()),
      mk("singleton group bounds hold on every run", bounds_ok, ""),
      mk("group mean totals within three standard errors of their bounds",
         group_means_ok, ""),
  };
}

inline X3CInstance random_x3c(SplitMix64& rng, int universe, int max_sets) {
  X3CInstance x;
  x.universe_size = universe;
  int sets = static_cast<int>(rng.range(1, max_sets));
  std::set<std::array<int, 3>> seen;
  int guard = 0;
  while (static_cast<int>(seen.size()) < sets && ++guard < 1000) {
    std::set<int> pick;
    while (pick.size() < 3)
      pick.insert(static_cast<int>(rng.range(1, universe)));
    std::array<int, 3> s{};
    int i = 0;
    for (int e : pick) s[i++] = e;
    seen.insert(s);
  }
  x.sets.assign(seen.begin(), seen.end());
  return x;
}

inline VCInstance random_vc(SplitMix64& rng, int max_nodes) {
  VCInstance g;
  g.vertex_count = static_cast<int>(rng.range(2, max_nodes));
  for (int u = 1; u <= g.vertex_count; ++u)
    for (int v = u + 1; v <= g.vertex_count; ++v)
      if (rng.chance(0.5)) g.edges.push_back({u, v});
  g.budget = static_cast<int>(rng.range(0, g.vertex_count));
  return g;
}

// Gadget equivalence: the constructed market instance answers the source
// problem correctly on every random instance.
inline std::vector<CheckResult> reductions_suite(std::uint64_t seed,
                                                 int count = 100) {
  std::vector<CheckResult> out;
  {
    detail::Timer timer;
    SplitMix64 rng(seed);
    int bad = 0;
    for (int i = 0; i < count; ++i) {
      int universe = rng.chance(0.5) ? 6 : 9;
      auto x = random_x3c(rng, universe, 8);
      long long q = rng.chance(0.5) ? 4 : 5;
      if (!verify_reduction_x3c(x, q)) ++bad;
    }
    CheckResult r;
    r.name = "exact-cover gadget agrees with exhaustive search on " +
             std::to_string(count) + " instances";
    r.pass = bad == 0;
    r.seconds = timer.seconds();
    r.detail = std::to_string(bad) + " disagreements";
    out.push_back(r);
  }
  {
    detail::Timer timer;
    SplitMix64 rng(split_stream(seed, 7));
    int bad = 0;
    for (int i = 0; i < count; ++i)
      if (!verify_reduction_vc(random_vc(rng, 7))) ++bad;
    CheckResult r;
    r.name = "vertex-cover gadget agrees with exhaustive search on " +
             std::to_string(count) + " graphs";
    r.pass = bad == 0;
    r.seconds = timer.seconds();
    r.detail = std::to_string(bad) + " disagreements";
    out.push_back(r);
  }
  return out;
}

inline LeximinInstance random_leximin_instance(SplitMix64& rng,
                                               int max_units = 6,
                                               int max_buyers = 4) {
  LeximinInstance inst;
  inst.unit_count = static_cast<int>(rng.range(1, max_units));
  int buyers = static_cast<int>(rng.range(1, max_buyers));
  for (int b = 1; b <= buyers; ++b)
    inst.buyers.push_back({"b" + std::to_string(b),
                           static_cast<int>(rng.range(1, max_units))});
  for (int u = 1; u <= inst.unit_count; ++u)
    for (const auto& b : inst.buyers)
      if (rng.chance(0.6)) inst.edges.push_back({u, b.id});
  return inst;
}

// Leximin solver vs oracle, plus the benefit-function properties, exact.
inline std::vector<CheckResult> leximin_suite(std::uint64_t seed,
                                              int instances = 200) {
  detail::Timer timer;
  SplitMix64 rng(seed);
  int bad = 0, bad_tables = 0;
  long long matched = 0, max_card = 0;
  for (int i = 0; i < instances; ++i) {
    auto inst = random_leximin_instance(rng);
    auto fast = solve_leximin(inst);
    auto slow = brute_force_leximin(inst);
    if (leximin_compare(fast.satisfaction.ratios, slow.satisfaction.ratios) !=
        LeximinOrder::Equal)
      ++bad;
    auto t = build_ratio_ranks(inst);
    if (!check_benefit_validity(inst, t) || !check_benefit_dominance(inst, t))
      ++bad_tables;
    matched += static_cast<long long>(fast.pairs.size());
    // recorded, not asserted: maximum units any assignment could move
    WeightedBipartiteGraph g;
    g.left_count = inst.unit_count;
    int slot_base = 0;
    std::map<std::string, int> slot_start;
    for (const auto& b : inst.buyers) {
      slot_start[b.id] = slot_base;
      slot_base += std::min(b.requirement, inst.unit_count);
    }
    g.right_count = slot_base;
    for (const auto& [u, id] : inst.edges) {
      const auto* b = inst.find_buyer(id);
      for (int c = 0; c < std::min(b->requirement, inst.unit_count); ++c)
        g.edges.push_back({u - 1, slot_start[id] + c, Rat(1)});
    }
    max_card += static_cast<long long>(max_weight_matching(g).size());
  }
  double secs = timer.seconds();
  CheckResult a;
  a.name = "leximin solver is leximin-equal to brute force on " +
           std::to_string(instances) + " instances";
  a.pass = bad == 0;
  a.seconds = secs;
  {
    std::ostringstream os;
    os << bad << " mismatches; matched " << matched
       << " units, max-cardinality total " << max_card << " (recorded only)";
    a.detail = os.str();
  }
  CheckResult b;
  b.name = "benefit tables satisfy validity and dominance exactly";
  b.pass = bad_tables == 0;
  b.seconds = secs;
  b.detail = std::to_string(bad_tables) + " bad tables";
  return {a, b};
}

}  // namespace watertrade::verify
