#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "watertrade/corpus.hpp"
#include "watertrade/io.hpp"
#include "watertrade/reductions.hpp"

using namespace watertrade;

TEST_CASE("instance JSON round-trips exactly", "[io]") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    MarketInstance m = corpus::random_monotone_instance(rng, 8);
    auto j = io::instance_to_json(m);
    MarketInstance back = io::instance_from_json(j);
    CHECK(io::instance_to_json(back) == j);
    REQUIRE(back.sellers.size() == m.sellers.size());
    for (std::size_t i = 0; i < m.sellers.size(); ++i) {
      CHECK(back.sellers[i].id == m.sellers[i].id);
      CHECK(back.sellers[i].units == m.sellers[i].units);
    }
    CHECK(back.compat_edges == m.compat_edges);
  }
}

TEST_CASE("gadget instances round-trip with unit edges", "[io]") {
  X3CInstance x;
  x.universe_size = 3;
  x.sets = {{1, 2, 3}};
  auto gadget = x3c_to_maxwelfare(x, 4);
  auto j = io::instance_to_json(gadget.instance);
  MarketInstance back = io::instance_from_json(j);
  REQUIRE(back.unit_edges);
  CHECK(*back.unit_edges == *gadget.instance.unit_edges);
  CHECK_FALSE(back.monotone);
}

TEST_CASE("non-decimal values serialize as fractions", "[io]") {
  MarketInstance m;
  m.sellers.push_back({"s", 1, {Rat(200, 3)}});
  m.buyers.push_back({"b", 2, {Rat(100)}});
  m.compat_edges = {{"s", "b"}};
  auto j = io::instance_to_json(m);
  CHECK(j["sellers"][0]["units"][0] == "200/3");
  CHECK(io::instance_from_json(j).sellers[0].units[0] == Rat(200, 3));
}

TEST_CASE("malformed JSON is an IoError", "[io]") {
  CHECK_THROWS_AS(io::instance_from_json(io::json{{"sellers", 5}}),
                  io::IoError);
  CHECK_THROWS_AS(io::fairness_spec_from_json(io::json::object()),
                  io::IoError);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/path.json"), io::IoError);
}

TEST_CASE("fairness spec and leximin instance JSON", "[io]") {
  FairnessSpec spec;
  spec.groups.push_back({{"b1", "b2"}, 2});
  auto j = io::fairness_spec_to_json(spec);
  auto back = io::fairness_spec_from_json(j);
  REQUIRE(back.groups.size() == 1);
  CHECK(back.groups[0].buyers == std::vector<std::string>{"b1", "b2"});
  CHECK(back.groups[0].lower_bound == 2);

  LeximinInstance inst;
  inst.unit_count = 2;
  inst.buyers = {{"b1", 1}, {"b2", 2}};
  inst.edges = {{1, "b2"}, {2, "b1"}};
  auto lj = io::leximin_instance_to_json(inst);
  auto lb = io::leximin_instance_from_json(lj);
  CHECK(lb.unit_count == 2);
  CHECK(lb.buyers.size() == 2);
  CHECK(lb.edges == inst.edges);
}

TEST_CASE("x3c and vertex cover JSON", "[io]") {
  X3CInstance x;
  x.universe_size = 6;
  x.sets = {{1, 2, 3}, {4, 5, 6}};
  auto back = io::x3c_from_json(io::x3c_to_json(x));
  CHECK(back.universe_size == 6);
  CHECK(back.sets == x.sets);

  VCInstance g;
  g.vertex_count = 3;
  g.edges = {{1, 2}, {2, 3}};
  g.budget = 1;
  auto gb = io::vc_from_json(io::vc_to_json(g));
  CHECK(gb.vertex_count == 3);
  CHECK(gb.edges == g.edges);
  CHECK(gb.budget == 1);
}

TEST_CASE("water rights CSV parsing", "[io]") {
  SECTION("demand and volume columns") {
    std::istringstream in(
        "right_id,priority_rank,stream_id,stream_pos,acreage,value_per_acre,"
        "demand_mm_per_acre,volume_acre_ft\n"
        "R1,5,main,1,10,200,914.4,\n"
        "R3,3,main,3,40,150,,100\n");
    auto recs = io::parse_water_rights_csv(in);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].right_id == "R1");
    CHECK(recs[0].demand_mm_per_acre == Rat::parse("914.4"));
    CHECK_FALSE(recs[0].volume_acre_ft);
    CHECK(recs[1].volume_acre_ft == Rat(100));
    CHECK_FALSE(recs[1].demand_mm_per_acre);
  }
  SECTION("bad rows carry their row number") {
    std::istringstream in(
        "right_id,priority_rank,stream_id,stream_pos,acreage,value_per_acre,"
        "demand_mm_per_acre\n"
        "R1,5,main,1,10,200,914.4\n"
        "R2,not_a_rank,main,2,5,100,100\n");
    try {
      io::parse_water_rights_csv(in);
      FAIL("expected IoError");
    } catch (const io::IoError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SECTION("missing columns are rejected") {
    std::istringstream in("right_id,acreage\nR1,10\n");
    CHECK_THROWS_AS(io::parse_water_rights_csv(in), io::IoError);
  }
}

TEST_CASE("stream topology JSON", "[io]") {
  auto j = io::json::parse(R"({"segments":[
    {"id":"main","parent":null},
    {"id":"forkA","parent":"main"},
    {"id":"forkB","parent":"main"}]})");
  auto topo = io::topology_from_json(j);
  CHECK(topo.related("main", "forkA"));
  CHECK(topo.related("forkA", "main"));
  CHECK_FALSE(topo.related("forkA", "forkB"));
}
