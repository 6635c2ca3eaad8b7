#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "watertrade/model.hpp"
#include "watertrade/rational.hpp"

namespace watertrade {

// Successive-shortest-path min-cost flow with Johnson potentials, generic
// over the cost type (int64 fast path, Rat or big integers when exactness
// needs them). Initial potentials come from Bellman-Ford, so arcs may carry
// negative costs as long as the network has no negative-cost directed cycle;
// every network this artifact builds is layered (a DAG), which guarantees
// that. Augmenting along successive shortest paths keeps the flow min-cost
// at every intermediate value, so "stop when the best path is no longer
// profitable" yields the min-cost flow over all values.
template <typename Cost>
class MinCostFlow {
public:
  explicit MinCostFlow(int nodes) : adj_(nodes) {}

  int add_node() {
    adj_.emplace_back();
    return static_cast<int>(adj_.size()) - 1;
  }

  int node_count() const { return static_cast<int>(adj_.size()); }

  // Returns an arc handle for flow(). cap must be >= 0.
  int add_arc(int from, int to, long long cap, Cost cost) {
    if (cap < 0) throw std::invalid_argument("negative arc capacity");
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap, cost});
    arcs_.push_back({from, 0, negate(cost)});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    potentials_ready_ = false;
    return id;
  }

  long long flow(int arc) const { return arcs_[arc + 1].cap; }

  // Augments along successive shortest paths while the true path cost is
  // negative. Returns the number of units sent.
  long long augment_while_negative(int source, int sink) {
    return run(source, sink, -1, true);
  }

  // Augments up to `target` units regardless of path cost (min-cost flow of
  // a fixed value). Returns the number of units actually sent.
  long long augment_up_to(int source, int sink, long long target) {
    return run(source, sink, target, false);
  }

private:
  struct Arc {
    int to;
    long long cap;
    Cost cost;
  };

  static Cost negate(const Cost& c) { return Cost{} - c; }

  void ensure_potentials() {
    if (potentials_ready_) return;
    int n = node_count();
    potential_.assign(n, Cost{});
    // Bellman-Ford from an implicit super source at distance 0 to all nodes.
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        for (int id : adj_[u]) {
          const Arc& a = arcs_[id];
          if (a.cap <= 0) continue;
          Cost cand = potential_[u] + a.cost;
          if (cand < potential_[a.to]) {
            potential_[a.to] = cand;
            changed = true;
          }
        }
      }
      if (!changed) {
        potentials_ready_ = true;
        return;
      }
    }
    throw std::invalid_argument("flow network has a negative-cost cycle");
  }

  long long run(int source, int sink, long long target, bool only_negative) {
    ensure_potentials();
    int n = node_count();
    long long sent = 0;
    std::vector<Cost> dist(n);
    std::vector<char> reached(n);
    std::vector<int> parent_arc(n);
    while (target < 0 || sent < target) {
      // Dijkstra on reduced costs.
      std::fill(reached.begin(), reached.end(), 0);
      std::vector<char> finished(n, 0);
      dist[source] = Cost{};
      reached[source] = 1;
      parent_arc[source] = -1;
      using Entry = std::pair<Cost, int>;
      std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
      pq.push({Cost{}, source});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (finished[u]) continue;
        finished[u] = 1;
        for (int id : adj_[u]) {
          const Arc& a = arcs_[id];
          if (a.cap <= 0 || finished[a.to]) continue;
          Cost nd = dist[u] + a.cost + potential_[u] - potential_[a.to];
          if (!reached[a.to] || nd < dist[a.to]) {
            reached[a.to] = 1;
            dist[a.to] = nd;
            parent_arc[a.to] = id;
            pq.push({nd, a.to});
          }
        }
      }
      if (!reached[sink]) break;
      Cost true_cost = dist[sink] + potential_[sink] - potential_[source];
      if (only_negative && !(true_cost < Cost{})) break;
      // Bottleneck along the path.
      long long push = target < 0 ? std::numeric_limits<long long>::max()
                                  : target - sent;
      for (int v = sink; v != source;) {
        const Arc& a = arcs_[parent_arc[v]];
        push = std::min(push, a.cap);
        v = arcs_[parent_arc[v] ^ 1].to;
      }
      for (int v = sink; v != source;) {
        int id = parent_arc[v];
        arcs_[id].cap -= push;
        arcs_[id ^ 1].cap += push;
        v = arcs_[id ^ 1].to;
      }
      for (int v = 0; v < n; ++v)
        if (reached[v]) potential_[v] = potential_[v] + dist[v];
      sent += push;
    }
    return sent;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<Cost> potential_;
  bool potentials_ready_ = false;
};

struct WeightedBipartiteGraph {
  struct Edge {
    int left = 0;
    int right = 0;
    Rat weight;
  };
  int left_count = 0;
  int right_count = 0;
  std::vector<Edge> edges;
};

namespace detail {

// Common-denominator scaling so hot paths can run on int64 instead of
// rationals. Returns nullopt when the least common denominator or the scaled
// magnitudes would not leave `headroom` of slack under 2^62.
inline std::optional<std::vector<long long>> scale_to_int64(
    const std::vector<Rat>& values, long long headroom) {
  long long lcm = 1;
  constexpr long long kLcmLimit = 2'000'000'000LL;
  for (const Rat& v : values) {
    long long d = v.den();
    long long g = std::gcd(lcm, d);
    __int128 next = static_cast<__int128>(lcm / g) * d;
    if (next > kLcmLimit) return std::nullopt;
    lcm = static_cast<long long>(next);
  }
  constexpr __int128 kMax = static_cast<__int128>(1) << 62;
  std::vector<long long> scaled;
  scaled.reserve(values.size());
  for (const Rat& v : values) {
    __int128 s = static_cast<__int128>(v.num()) * (lcm / v.den());
    __int128 mag = s < 0 ? -s : s;
    if (mag * headroom >= kMax) return std::nullopt;
    scaled.push_back(static_cast<long long>(s));
  }
  return scaled;
}

// Max-weight bipartite matching over an arbitrary ordered cost type.
// Nonnegative weights; zero-weight edges are never selected (they do not
// change the matching weight).
template <typename Cost>
std::vector<int> max_weight_matching_impl(
    int left_count, int right_count,
    const std::vector<std::tuple<int, int, Cost>>& edges) {
  int source = 0;
  int sink = left_count + right_count + 1;
  MinCostFlow<Cost> flow(left_count + right_count + 2);
  for (int l = 0; l < left_count; ++l) flow.add_arc(source, 1 + l, 1, Cost{});
  for (int r = 0; r < right_count; ++r)
    flow.add_arc(1 + left_count + r, sink, 1, Cost{});
  std::vector<int> edge_arcs;
  edge_arcs.reserve(edges.size());
  for (const auto& [l, r, w] : edges)
    edge_arcs.push_back(
        flow.add_arc(1 + l, 1 + left_count + r, 1, Cost{} - w));
  flow.augment_while_negative(source, sink);
  std::vector<int> chosen;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (flow.flow(edge_arcs[i]) > 0) chosen.push_back(static_cast<int>(i));
  return chosen;
}

}  // namespace detail

inline void validate_bipartite(const WeightedBipartiteGraph& g,
                               bool require_nonnegative = true) {
  std::vector<std::string> problems;
  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    if (e.left < 0 || e.left >= g.left_count || e.right < 0 ||
        e.right >= g.right_count)
      problems.push_back("edge endpoint out of range");
    if (require_nonnegative && e.weight.sign() < 0)
      problems.push_back("negative edge weight");
    if (!seen.insert({e.left, e.right}).second)
      problems.push_back("duplicate edge (" + std::to_string(e.left) + "," +
                         std::to_string(e.right) + ")");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// Returns indices into g.edges forming a matching of maximum total weight
// (not necessarily maximum cardinality; zero-weight edges may be omitted).
// Deterministic for a fixed edge order.
inline std::vector<int> max_weight_matching(const WeightedBipartiteGraph& g) {
  validate_bipartite(g);
  std::vector<Rat> weights;
  weights.reserve(g.edges.size());
  for (const auto& e : g.edges) weights.push_back(e.weight);
  long long headroom = 4 * static_cast<long long>(g.edges.size() +
                                                  g.left_count +
                                                  g.right_count) +
                       16;
  std::vector<int> chosen;
  if (auto scaled = detail::scale_to_int64(weights, headroom)) {
    std::vector<std::tuple<int, int, long long>> edges;
    edges.reserve(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      edges.emplace_back(g.edges[i].left, g.edges[i].right, (*scaled)[i]);
    chosen = detail::max_weight_matching_impl(g.left_count, g.right_count,
                                              edges);
  } else {
    std::vector<std::tuple<int, int, Rat>> edges;
    edges.reserve(g.edges.size());
    for (const auto& e : g.edges)
      edges.emplace_back(e.left, e.right, e.weight);
    chosen = detail::max_weight_matching_impl(g.left_count, g.right_count,
                                              edges);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline Rat matching_weight(const WeightedBipartiteGraph& g,
                           const std::vector<int>& chosen) {
  Rat total;
  for (int i : chosen) total += g.edges[i].weight;
  return total;
}

// A flow network with per-arc lower bounds. Mandatory flow is realized by
// splitting each arc into a reward piece (capacity = lower bound, cost
// shifted down by a constant that dominates any simple path cost) and a
// regular piece, then running successive shortest paths; the reward piece is
// saturated in any min-cost flow iff the lower bound is satisfiable.
struct FlowNetwork {
  struct Arc {
    int from = 0;
    int to = 0;
    long long lower = 0;
    long long capacity = 0;
    Rat cost;
  };
  int node_count = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;
};

struct FlowSolution {
  std::vector<long long> flows;  // parallel to FlowNetwork::arcs
  Rat cost;
};

inline std::string dump_network(const FlowNetwork& net) {
  std::ostringstream os;
  os << "nodes " << net.node_count << " source " << net.source << " sink "
     << net.sink << "\n";
  for (const auto& a : net.arcs)
    os << a.from << " -> " << a.to << " lower " << a.lower << " cap "
       << a.capacity << " cost " << a.cost << "\n";
  return os.str();
}

// Min-cost integral flow of exactly `flow_value` units meeting every arc
// lower bound; nullopt when no such flow exists. The network (with source
// and sink viewed as plain nodes) must not contain a negative-cost directed
// cycle; the layered networks built in this artifact never do.
inline std::optional<FlowSolution> min_cost_flow_with_lower_bounds(
    const FlowNetwork& net, long long flow_value) {
  std::vector<std::string> problems;
  for (const auto& a : net.arcs) {
    if (a.from < 0 || a.from >= net.node_count || a.to < 0 ||
        a.to >= net.node_count)
      problems.push_back("arc endpoint out of range");
    if (a.lower < 0 || a.capacity < 0) problems.push_back("negative arc bound");
  }
  if (flow_value < 0) problems.push_back("negative flow value");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  for (const auto& a : net.arcs)
    if (a.lower > a.capacity) return std::nullopt;

  // Dominates the true cost of any feasible flow, so a unit of mandatory
  // flow always beats any cost rearrangement.
  Rat reward(1);
  for (const auto& a : net.arcs) reward += a.cost.abs() * Rat(a.capacity);
  MinCostFlow<Rat> flow(net.node_count);
  std::vector<int> mandatory(net.arcs.size(), -1);
  std::vector<int> regular(net.arcs.size(), -1);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    if (a.lower > 0)
      mandatory[i] = flow.add_arc(a.from, a.to, a.lower, a.cost - reward);
    if (a.capacity > a.lower)
      regular[i] = flow.add_arc(a.from, a.to, a.capacity - a.lower, a.cost);
  }
  long long sent = flow.augment_up_to(net.source, net.sink, flow_value);
  if (sent != flow_value) return std::nullopt;
  FlowSolution sol;
  sol.flows.resize(net.arcs.size(), 0);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    long long f = 0;
    if (mandatory[i] >= 0) {
      f += flow.flow(mandatory[i]);
      if (flow.flow(mandatory[i]) < net.arcs[i].lower) return std::nullopt;
    }
    if (regular[i] >= 0) f += flow.flow(regular[i]);
    sol.flows[i] = f;
    sol.cost += net.arcs[i].cost * Rat(f);
  }
  return sol;
}

// Degree-constrained subgraph (b-matching): pick edges so that every node's
// degree lands in [lower, upper], maximizing total edge weight. Solved as a
// min-cost flow with mandatory degree arcs.
struct DegreeConstrainedProblem {
  WeightedBipartiteGraph graph;
  std::vector<long long> left_lower, left_upper;
  std::vector<long long> right_lower, right_upper;
};

inline std::optional<std::vector<int>> dcs_solve(
    const DegreeConstrainedProblem& p) {
  const auto& g = p.graph;
  validate_bipartite(g);
  std::vector<std::string> problems;
  auto check_bounds = [&](const std::vector<long long>& lo,
                          const std::vector<long long>& hi, int count,
                          const char* side) {
    if (static_cast<int>(lo.size()) != count ||
        static_cast<int>(hi.size()) != count)
      problems.push_back(std::string(side) + " bound size mismatch");
    for (int i = 0; i < count && i < static_cast<int>(lo.size()) &&
                    i < static_cast<int>(hi.size());
         ++i)
      if (lo[i] < 0 || lo[i] > hi[i])
        problems.push_back(std::string(side) + " bounds violate 0 <= lower <= upper");
  };
  check_bounds(p.left_lower, p.left_upper, g.left_count, "left");
  check_bounds(p.right_lower, p.right_upper, g.right_count, "right");
  if (!problems.empty()) throw ValidationError(std::move(problems));

  Rat reward(1);
  for (const auto& e : g.edges) reward += e.weight;
  int source = 0;
  int sink = g.left_count + g.right_count + 1;
  MinCostFlow<Rat> flow(g.left_count + g.right_count + 2);
  std::vector<int> left_mandatory(g.left_count, -1),
      right_mandatory(g.right_count, -1);
  for (int l = 0; l < g.left_count; ++l) {
    if (p.left_lower[l] > 0)
      left_mandatory[l] =
          flow.add_arc(source, 1 + l, p.left_lower[l], Rat{} - reward);
    if (p.left_upper[l] > p.left_lower[l])
      flow.add_arc(source, 1 + l, p.left_upper[l] - p.left_lower[l], Rat{});
  }
  for (int r = 0; r < g.right_count; ++r) {
    if (p.right_lower[r] > 0)
      right_mandatory[r] = flow.add_arc(1 + g.left_count + r, sink,
                                        p.right_lower[r], Rat{} - reward);
    if (p.right_upper[r] > p.right_lower[r])
      flow.add_arc(1 + g.left_count + r, sink,
                   p.right_upper[r] - p.right_lower[r], Rat{});
  }
  std::vector<int> edge_arcs;
  edge_arcs.reserve(g.edges.size());
  for (const auto& e : g.edges)
    edge_arcs.push_back(flow.add_arc(1 + e.left, 1 + g.left_count + e.right, 1,
                                     Rat{} - e.weight));
  flow.augment_while_negative(source, sink);
  for (int l = 0; l < g.left_count; ++l)
    if (left_mandatory[l] >= 0 &&
        flow.flow(left_mandatory[l]) < p.left_lower[l])
      return std::nullopt;
  for (int r = 0; r < g.right_count; ++r)
    if (right_mandatory[r] >= 0 &&
        flow.flow(right_mandatory[r]) < p.right_lower[r])
      return std::nullopt;
  std::vector<int> chosen;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (flow.flow(edge_arcs[i]) > 0) chosen.push_back(static_cast<int>(i));
  return chosen;
}

}  // namespace watertrade
