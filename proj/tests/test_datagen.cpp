#include <catch2/catch_amalgamated.hpp>

#include "watertrade/datagen.hpp"
#include "watertrade/welfare.hpp"

using namespace watertrade;

TEST_CASE("synthetic seller rule", "[datagen]") {
  SyntheticConfig cfg;
  cfg.agents = 10;
  cfg.units_per_agent = 5;
  cfg.seed = 42;

  SECTION("delta 0.5 makes a5..a10 sellers (non-strict rule)") {
    cfg.availability = Rat(1, 2);
    auto m = gen_synthetic(cfg);
    CHECK(m.sellers.size() == 6);
    std::set<std::string> ids;
    for (const auto& s : m.sellers) ids.insert(s.id);
    for (int i = 5; i <= 10; ++i)
      CHECK(ids.count("a" + std::to_string(i)) == 1);
  }
  SECTION("full availability leaves no buyers, zero leaves no sellers") {
    cfg.availability = Rat(1);
    auto all = gen_synthetic(cfg);
    CHECK(all.buyers.empty());
    CHECK(all.sellers.size() == 10);
    cfg.availability = Rat(0);
    auto none = gen_synthetic(cfg);
    CHECK(none.sellers.empty());
    CHECK(none.buyers.size() == 10);
    // either way there is nothing to trade
    CHECK(solve_max_welfare(none).welfare_value == Rat(0));
    CHECK(solve_max_welfare(all).welfare_value == Rat(0));
  }
  SECTION("value lists follow the linear shapes") {
    cfg.availability = Rat(1, 2);
    cfg.beta_high = Rat(9, 10);
    auto m = gen_synthetic(cfg);
    CHECK(validate_instance(m).empty());  // monotone flag holds
    for (const auto& s : m.sellers) {
      REQUIRE(s.unit_count() == 5);
      Rat beta = s.units[0];  // f_s(1) = beta
      CHECK((beta == Rat(9, 10) || beta == Rat(1, 10)));
      for (int l = 1; l <= 5; ++l) CHECK(s.unit_value(l) == beta * Rat(l));
    }
    for (const auto& b : m.buyers) {
      Rat beta = b.unit_value(5);  // f_b(k) = beta
      for (int l = 1; l <= 5; ++l)
        CHECK(b.unit_value(l) == beta * Rat(5 - l + 1));
    }
    // complete bipartite compatibility
    CHECK(m.compat_edges.size() == m.sellers.size() * m.buyers.size());
  }
  SECTION("lambda one half gives a fifty-fifty class draw") {
    cfg.availability = Rat(1, 2);
    cfg.value_correlation = Rat(1, 2);
    int high = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
      cfg.seed = seed;
      auto m = gen_synthetic(cfg);
      for (const auto& s : m.sellers) {
        ++total;
        if (s.units[0] == cfg.beta_high) ++high;
      }
    }
    double freq = double(high) / total;
    CHECK(freq > 0.45);
    CHECK(freq < 0.55);
  }
  SECTION("identical seeds give identical instances") {
    cfg.seed = 7;
    auto a = gen_synthetic(cfg);
    auto b = gen_synthetic(cfg);
    REQUIRE(a.sellers.size() == b.sellers.size());
    for (std::size_t i = 0; i < a.sellers.size(); ++i)
      CHECK(a.sellers[i].units == b.sellers[i].units);
  }
  SECTION("bad ranges are rejected") {
    cfg.beta_high = Rat(1, 4);
    CHECK_THROWS_AS(gen_synthetic(cfg), ValidationError);
  }
}

namespace {

std::vector<WaterRightRecord> fixture_records() {
  // volumes: 30, 51, 100, 20, 2 acre-feet; W = 203
  std::vector<WaterRightRecord> recs;
  recs.push_back({"R1", 5, "main", 1, Rat::parse("10"), Rat::parse("200"),
                  Rat::parse("914.4"), std::nullopt});
  recs.push_back({"R2", 4, "main", 2, Rat::parse("25.5"), Rat::parse("400"),
                  Rat::parse("609.6"), std::nullopt});
  recs.push_back({"R3", 3, "main", 3, Rat::parse("40"), Rat::parse("150"),
                  std::nullopt, Rat::parse("100")});
  recs.push_back({"R4", 2, "forkA", 1, Rat::parse("12.3"), Rat::parse("800"),
                  Rat::parse("500"), std::nullopt});
  recs.push_back({"R5", 1, "forkB", 1, Rat::parse("1"), Rat::parse("1000"),
                  Rat::parse("762"), std::nullopt});
  return recs;
}

}  // namespace

TEST_CASE("ingestion formulas on the hand-built fixture", "[datagen]") {
  auto recs = fixture_records();

  SECTION("volume conversion, including the half-to-even tie") {
    CHECK(right_volume_acre_ft(recs[0]) == 30);  // 10*914.4/304.8 = 30
    CHECK(right_volume_acre_ft(recs[1]) == 51);  // 25.5*2
    CHECK(right_volume_acre_ft(recs[2]) == 100); // direct volume
    CHECK(right_volume_acre_ft(recs[3]) == 20);  // 20.177... rounds down
    CHECK(right_volume_acre_ft(recs[4]) == 2);   // 2.5 ties to even = 2
  }
  SECTION("unit counts and per-unit values at unit size 10") {
    auto res = ingest_water_rights(recs, 10, Rat(1, 2));
    CHECK(res.total_volume == Rat(203));
    std::map<std::string, const Agent*> agents;
    for (const auto& a : res.instance.sellers) agents[a.id] = &a;
    for (const auto& a : res.instance.buyers) agents[a.id] = &a;
    CHECK(agents.at("R1")->unit_count() == 3);   // ceil(30/10)
    CHECK(agents.at("R2")->unit_count() == 6);   // ceil(5.1) = 6
    CHECK(agents.at("R3")->unit_count() == 10);
    CHECK(agents.at("R4")->unit_count() == 2);
    CHECK(agents.at("R5")->unit_count() == 1);   // partial unit rounds up
    CHECK(agents.at("R1")->units[0] == Rat(2000, 3));  // 10*200/30 * 10
    CHECK(agents.at("R2")->units[0] == Rat(2000));     // 200 * 10
    CHECK(agents.at("R3")->units[0] == Rat(600));      // 60 * 10
    CHECK(agents.at("R4")->units[0] == Rat(4920));     // 492 * 10
    CHECK(agents.at("R5")->units[0] == Rat(5000));     // 500 * 10
    CHECK(validate_instance(res.instance).empty());
  }
  SECTION("seller split by availability") {
    auto at = [&](const char* d) {
      auto res = ingest_water_rights(recs, 10, Rat::parse(d));
      std::set<std::string> ids;
      for (const auto& s : res.instance.sellers) ids.insert(s.id);
      return ids;
    };
    CHECK(at("0.1").empty());  // R1 alone would exceed 20.3
    CHECK(at("0.5") == std::set<std::string>{"R1", "R2"});   // 81 <= 101.5
    CHECK(at("0.9") == std::set<std::string>{"R1", "R2", "R3"});  // 181<=182.7
    CHECK(at("0").empty());
  }
  SECTION("unit count bound") {
    for (int unit_size : {5, 10, 20}) {
      auto res = ingest_water_rights(recs, unit_size, Rat(1, 2));
      long long units = 0;
      for (const auto& a : res.instance.sellers) units += a.unit_count();
      for (const auto& a : res.instance.buyers) units += a.unit_count();
      Rat lower = res.total_volume / Rat(unit_size);
      CHECK(Rat(units) >= lower);
      CHECK(Rat(units) < lower + Rat(static_cast<long long>(recs.size())));
    }
  }
  SECTION("per acre-foot price formula") {
    // A=100 acres at $500/acre over 200 acre-feet: $250 per acre-foot
    WaterRightRecord r{"P",  1,  "main", 1, Rat(100), Rat(500), std::nullopt,
                       Rat(200)};
    auto res = ingest_water_rights({r}, 10, Rat(1));
    REQUIRE(res.instance.sellers.size() == 1);
    CHECK(res.instance.sellers[0].units[0] == Rat(2500));  // 250 * 10
  }
  SECTION("record validation points at the row") {
    auto bad = recs;
    bad[2].acreage = Rat(0);
    try {
      ingest_water_rights(bad, 10, Rat(1, 2));
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("record 3") != std::string::npos);
    }
  }
}

TEST_CASE("geographic compatibility", "[datagen]") {
  StreamTopology topo;
  topo.parent["main"] = std::nullopt;
  topo.parent["forkA"] = "main";
  topo.parent["forkB"] = "main";

  auto recs = fixture_records();
  auto res = ingest_water_rights(recs, 10, Rat(1, 2));
  // sellers R1,R2 on main; buyers R3 (main), R4 (forkA), R5 (forkB)

  SECTION("fork agents reach the mainstem but not each other") {
    auto geo = build_geo_compatibility(res.instance, res.agent_streams, topo);
    std::set<std::pair<std::string, std::string>> edges(
        geo.compat_edges.begin(), geo.compat_edges.end());
    CHECK(edges.count({"R1", "R3"}) == 1);  // same stream
    CHECK(edges.count({"R1", "R4"}) == 1);  // mainstem to fork
    CHECK(edges.count({"R2", "R5"}) == 1);
    CHECK(edges.size() == res.instance.sellers.size() *
                              res.instance.buyers.size());
  }
  SECTION("agents on separate forks are incompatible") {
    // make R4 a seller by raising availability so it crosses the cutoff
    auto res9 = ingest_water_rights(recs, 10, Rat::parse("0.995"));
    std::set<std::string> sellers;
    for (const auto& s : res9.instance.sellers) sellers.insert(s.id);
    REQUIRE(sellers.count("R4") == 1);
    auto geo = build_geo_compatibility(res9.instance, res9.agent_streams, topo);
    for (const auto& [s, b] : geo.compat_edges)
      CHECK_FALSE((s == "R4" && b == "R5"));  // forkA vs forkB
  }
  SECTION("one stream means complete compatibility") {
    StreamTopology one;
    one.parent["main"] = std::nullopt;
    std::map<std::string, std::string> streams;
    MarketInstance m;
    m.sellers.push_back({"s", 1, {Rat(1)}});
    m.buyers.push_back({"b", 2, {Rat(2)}});
    streams["s"] = "main";
    streams["b"] = "main";
    auto geo = build_geo_compatibility(m, streams, one);
    CHECK(geo.compat_edges.size() == 1);
  }
  SECTION("unknown stream is an error") {
    std::map<std::string, std::string> streams = res.agent_streams;
    streams["R1"] = "nowhere";
    CHECK_THROWS_AS(
        build_geo_compatibility(res.instance, streams, topo), ValidationError);
  }
}
