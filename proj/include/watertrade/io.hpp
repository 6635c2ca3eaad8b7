#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "watertrade/datagen.hpp"
#include "watertrade/fairness.hpp"
#include "watertrade/leximin.hpp"
#include "watertrade/model.hpp"
#include "watertrade/reductions.hpp"
#include "watertrade/welfare.hpp"

namespace watertrade::io {

using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json instance_to_json(const MarketInstance& m) {
  json j;
  auto agents = [](const std::vector<Agent>& list) {
    json arr = json::array();
    for (const auto& a : list) {
      json units = json::array();
      for (const auto& v : a.units) units.push_back(v.str());
      arr.push_back({{"id", a.id},
                     {"rank", a.seniority_rank},
                     {"units", std::move(units)}});
    }
    return arr;
  };
  j["sellers"] = agents(m.sellers);
  j["buyers"] = agents(m.buyers);
  json edges = json::array();
  for (const auto& [s, b] : m.compat_edges) edges.push_back(json::array({s, b}));
  j["edges"] = std::move(edges);
  j["monotone"] = m.monotone;
  if (m.unit_edges) {
    json wires = json::array();
    for (const auto& e : *m.unit_edges)
      wires.push_back(
          json::array({e.seller, e.seller_index, e.buyer, e.buyer_index}));
    j["unit_edges"] = std::move(wires);
  }
  return j;
}

inline MarketInstance instance_from_json(const json& j) {
  try {
    MarketInstance m;
    auto agents = [](const json& arr) {
      std::vector<Agent> list;
      for (const auto& item : arr) {
        Agent a;
        a.id = item.at("id").get<std::string>();
        a.seniority_rank = item.value("rank", 0);
        for (const auto& v : item.at("units"))
          a.units.push_back(Rat::parse(v.get<std::string>()));
        list.push_back(std::move(a));
      }
      return list;
    };
    m.sellers = agents(j.at("sellers"));
    m.buyers = agents(j.at("buyers"));
    for (const auto& e : j.at("edges"))
      m.compat_edges.push_back(
          {e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    m.monotone = j.value("monotone", true);
    if (j.contains("unit_edges")) {
      std::vector<UnitEdge> wires;
      for (const auto& e : j.at("unit_edges"))
        wires.push_back({e.at(0).get<std::string>(), e.at(1).get<int>(),
                         e.at(2).get<std::string>(), e.at(3).get<int>()});
      m.unit_edges = std::move(wires);
    }
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed instance JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("malformed instance JSON: ") + e.what());
  }
}

inline json fairness_spec_to_json(const FairnessSpec& spec) {
  json groups = json::array();
  for (const auto& g : spec.groups)
    groups.push_back({{"buyers", g.buyers}, {"r", g.lower_bound}});
  return json{{"groups", std::move(groups)}};
}

inline FairnessSpec fairness_spec_from_json(const json& j) {
  try {
    FairnessSpec spec;
    for (const auto& g : j.at("groups")) {
      FairnessGroup grp;
      for (const auto& b : g.at("buyers"))
        grp.buyers.push_back(b.get<std::string>());
      grp.lower_bound = g.at("r").get<long long>();
      spec.groups.push_back(std::move(grp));
    }
    return spec;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed fairness spec JSON: ") + e.what());
  }
}

inline json leximin_instance_to_json(const LeximinInstance& inst) {
  json buyers = json::array();
  for (const auto& b : inst.buyers)
    buyers.push_back({{"id", b.id}, {"gamma", b.requirement}});
  json edges = json::array();
  for (const auto& [u, id] : inst.edges) edges.push_back(json::array({u, id}));
  return json{{"k", inst.unit_count},
              {"buyers", std::move(buyers)},
              {"edges", std::move(edges)}};
}

inline LeximinInstance leximin_instance_from_json(const json& j) {
  try {
    LeximinInstance inst;
    inst.unit_count = j.at("k").get<int>();
    for (const auto& b : j.at("buyers"))
      inst.buyers.push_back(
          {b.at("id").get<std::string>(), b.at("gamma").get<int>()});
    for (const auto& e : j.at("edges"))
      inst.edges.push_back({e.at(0).get<int>(), e.at(1).get<std::string>()});
    return inst;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed leximin instance JSON: ") + e.what());
  }
}

inline json assignment_to_json(const TradingAssignment& t) {
  json pairs = json::array();
  for (const auto& [su, bu] : t.pairs)
    pairs.push_back(json::array({su.agent, su.index, bu.agent, bu.index}));
  return pairs;
}

inline TradingAssignment assignment_from_json(const json& j) {
  try {
    TradingAssignment t;
    for (const auto& p : j)
      t.pairs.push_back({{p.at(0).get<std::string>(), p.at(1).get<int>()},
                         {p.at(2).get<std::string>(), p.at(3).get<int>()}});
    t.normalize();
    return t;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed assignment JSON: ") + e.what());
  }
}

inline json welfare_solution_to_json(const WelfareSolution& sol,
                                     const MarketInstance& m) {
  json j;
  j["pairs"] = assignment_to_json(sol.assignment);
  j["welfare"] = sol.welfare_value.str();
  j["total_value"] = total_value(sol.assignment, m).str();
  j["sigma0"] = sigma0(m).str();
  if (sol.heuristic) j["heuristic"] = true;
  return j;
}

inline json satisfaction_to_json(const SatisfactionVector& v) {
  json j = json::object();
  for (std::size_t i = 0; i < v.buyer_ids.size(); ++i)
    j[v.buyer_ids[i]] = v.ratios[i].str();
  return j;
}

inline json fair_report_to_json(const FairSolveReport& report,
                                const MarketInstance& m) {
  json j;
  if (report.status == FairStatus::LpInfeasible) {
    j["status"] = "infeasible";
    j["note"] =
        "the fractional relaxation has no solution, so no assignment can "
        "meet every group bound";
    return j;
  }
  j["status"] = "solved";
  j["pairs"] = assignment_to_json(report.assignment);
  j["welfare"] = report.welfare_value.str();
  j["total_value"] = total_value(report.assignment, m).str();
  j["sigma0"] = sigma0(m).str();
  j["lp_objective"] = report.lp_objective.str();
  json groups = json::array();
  for (const auto& g : report.groups)
    groups.push_back({{"buyers", g.group.buyers},
                      {"r", g.group.lower_bound},
                      {"singleton", g.singleton},
                      {"achieved", g.achieved},
                      {"satisfied", g.satisfied}});
  j["groups"] = std::move(groups);
  j["group_totals_changed_by_repair"] = report.group_totals_changed_by_repair;
  j["note"] =
      "singleton bounds hold on every run; larger groups hold in "
      "expectation over the rounding";
  return j;
}

inline json leximin_solution_to_json(const LeximinSolution& sol) {
  json pairs = json::array();
  for (const auto& [u, id] : sol.pairs) pairs.push_back(json::array({u, id}));
  json sorted = json::array();
  for (const auto& r : sol.satisfaction.sorted_ascending())
    sorted.push_back(r.str());
  return json{{"pairs", std::move(pairs)},
              {"satisfaction", satisfaction_to_json(sol.satisfaction)},
              {"satisfaction_sorted", std::move(sorted)},
              {"matched_units", sol.pairs.size()}};
}

inline json x3c_to_json(const X3CInstance& x) {
  json sets = json::array();
  for (const auto& s : x.sets) sets.push_back(json::array({s[0], s[1], s[2]}));
  return json{{"t", x.universe_size}, {"sets", std::move(sets)}};
}

inline X3CInstance x3c_from_json(const json& j) {
  try {
    X3CInstance x;
    x.universe_size = j.at("t").get<int>();
    for (const auto& s : j.at("sets"))
      x.sets.push_back({s.at(0).get<int>(), s.at(1).get<int>(),
                        s.at(2).get<int>()});
    return x;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed X3C JSON: ") + e.what());
  }
}

inline json vc_to_json(const VCInstance& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back(json::array({u, v}));
  return json{{"n", g.vertex_count}, {"edges", std::move(edges)},
              {"k", g.budget}};
}

inline VCInstance vc_from_json(const json& j) {
  try {
    VCInstance g;
    g.vertex_count = j.at("n").get<int>();
    for (const auto& e : j.at("edges"))
      g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    g.budget = j.at("k").get<int>();
    return g;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed vertex-cover JSON: ") + e.what());
  }
}

inline StreamTopology topology_from_json(const json& j) {
  try {
    StreamTopology topo;
    for (const auto& seg : j.at("segments")) {
      std::string id = seg.at("id").get<std::string>();
      if (seg.contains("parent") && !seg.at("parent").is_null())
        topo.parent[id] = seg.at("parent").get<std::string>();
      else
        topo.parent[id] = std::nullopt;
    }
    return topo;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed stream topology JSON: ") + e.what());
  }
}

// Water-rights CSV. Header names: right_id, priority_rank, stream_id,
// stream_pos, acreage, value_per_acre, and demand_mm_per_acre or
// volume_acre_ft (both columns may exist; each row fills exactly one).
// Plain comma separation, no quoting.
inline std::vector<WaterRightRecord> parse_water_rights_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty water rights CSV");
  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
        cell.erase(cell.begin());
      while (!cell.empty() &&
             (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
        cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  std::map<std::string, std::size_t> col;
  auto header = split(line);
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"right_id", "priority_rank", "stream_id",
                           "stream_pos", "acreage", "value_per_acre"})
    if (!col.count(need))
      throw IoError(std::string("water rights CSV is missing column ") + need);
  if (!col.count("demand_mm_per_acre") && !col.count("volume_acre_ft"))
    throw IoError(
        "water rights CSV needs demand_mm_per_acre or volume_acre_ft");

  std::vector<WaterRightRecord> records;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    auto cell = [&](const char* name) -> std::string {
      auto it = col.find(name);
      if (it == col.end() || it->second >= cells.size()) return "";
      return cells[it->second];
    };
    try {
      WaterRightRecord r;
      r.right_id = cell("right_id");
      r.priority_rank = std::stoi(cell("priority_rank"));
      r.stream_id = cell("stream_id");
      r.stream_position = std::stoi(cell("stream_pos"));
      r.acreage = Rat::parse(cell("acreage"));
      r.value_per_acre = Rat::parse(cell("value_per_acre"));
      std::string demand = cell("demand_mm_per_acre");
      std::string volume = cell("volume_acre_ft");
      if (!demand.empty()) r.demand_mm_per_acre = Rat::parse(demand);
      if (!volume.empty()) r.volume_acre_ft = Rat::parse(volume);
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw IoError("water rights CSV row " + std::to_string(row) + ": " +
                    e.what());
    }
  }
  return records;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

}  // namespace watertrade::io
