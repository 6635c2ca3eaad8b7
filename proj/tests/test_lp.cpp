#include <catch2/catch_amalgamated.hpp>

#include "watertrade/corpus.hpp"
#include "watertrade/fairness.hpp"
#include "watertrade/lp.hpp"
#include "watertrade/welfare.hpp"

using namespace watertrade;

TEST_CASE("simplex solves small hand programs", "[lp]") {
  SECTION("max x+y, x<=2, y<=3") {
    lp::Problem<Rat> p;
    p.num_vars = 2;
    p.objective = {Rat(1), Rat(1)};
    int r0 = p.add_row(lp::Sense::LessEq, Rat(2));
    p.add_coeff(r0, 0, Rat(1));
    int r1 = p.add_row(lp::Sense::LessEq, Rat(3));
    p.add_coeff(r1, 1, Rat(1));
    auto sol = lp::maximize(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == Rat(5));
    CHECK(sol.x[0] == Rat(2));
    CHECK(sol.x[1] == Rat(3));
  }
  SECTION("greater-equal rows use phase one") {
    // max -x subject to x >= 3  ->  x = 3
    lp::Problem<Rat> p;
    p.num_vars = 1;
    p.objective = {Rat(-1)};
    int r = p.add_row(lp::Sense::GreaterEq, Rat(3));
    p.add_coeff(r, 0, Rat(1));
    auto sol = lp::maximize(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.x[0] == Rat(3));
    CHECK(sol.objective == Rat(-3));
  }
  SECTION("equality row") {
    // max x + 2y, x + y = 2, y <= 1 -> x=1, y=1
    lp::Problem<Rat> p;
    p.num_vars = 2;
    p.objective = {Rat(1), Rat(2)};
    int r0 = p.add_row(lp::Sense::Eq, Rat(2));
    p.add_coeff(r0, 0, Rat(1));
    p.add_coeff(r0, 1, Rat(1));
    int r1 = p.add_row(lp::Sense::LessEq, Rat(1));
    p.add_coeff(r1, 1, Rat(1));
    auto sol = lp::maximize(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == Rat(3));
  }
  SECTION("infeasible system") {
    // x <= 1 and x >= 2
    lp::Problem<Rat> p;
    p.num_vars = 1;
    p.objective = {Rat(1)};
    int r0 = p.add_row(lp::Sense::LessEq, Rat(1));
    p.add_coeff(r0, 0, Rat(1));
    int r1 = p.add_row(lp::Sense::GreaterEq, Rat(2));
    p.add_coeff(r1, 0, Rat(1));
    auto sol = lp::maximize(p);
    CHECK(sol.status == lp::Status::Infeasible);
  }
  SECTION("unbounded program is an internal error") {
    lp::Problem<Rat> p;
    p.num_vars = 1;
    p.objective = {Rat(1)};
    CHECK_THROWS_AS(lp::maximize(p), std::logic_error);
  }
  SECTION("degenerate program terminates (Bland)") {
    lp::Problem<Rat> p;
    p.num_vars = 2;
    p.objective = {Rat(1), Rat(1)};
    int r0 = p.add_row(lp::Sense::LessEq, Rat(0));
    p.add_coeff(r0, 0, Rat(1));
    p.add_coeff(r0, 1, Rat(-1));
    int r1 = p.add_row(lp::Sense::LessEq, Rat(0));
    p.add_coeff(r1, 0, Rat(2));
    p.add_coeff(r1, 1, Rat(-2));
    int r2 = p.add_row(lp::Sense::LessEq, Rat(4));
    p.add_coeff(r2, 0, Rat(1));
    p.add_coeff(r2, 1, Rat(1));
    auto sol = lp::maximize(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == Rat(4));
  }
  SECTION("negative rhs rows are normalized") {
    // max -x-y subject to -x - y <= -2  (i.e. x + y >= 2)
    lp::Problem<Rat> p;
    p.num_vars = 2;
    p.objective = {Rat(-1), Rat(-1)};
    int r = p.add_row(lp::Sense::LessEq, Rat(-2));
    p.add_coeff(r, 0, Rat(-1));
    p.add_coeff(r, 1, Rat(-1));
    auto sol = lp::maximize(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == Rat(-2));
  }
}

TEST_CASE("double instantiation agrees with the exact one", "[lp]") {
  lp::Problem<double> p;
  p.num_vars = 2;
  p.objective = {3.0, 5.0};
  int r0 = p.add_row(lp::Sense::LessEq, 4.0);
  p.add_coeff(r0, 0, 1.0);
  int r1 = p.add_row(lp::Sense::LessEq, 12.0);
  p.add_coeff(r1, 1, 2.0);
  int r2 = p.add_row(lp::Sense::LessEq, 18.0);
  p.add_coeff(r2, 0, 3.0);
  p.add_coeff(r2, 1, 2.0);
  auto sol = lp::maximize(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Catch::Approx(36.0).epsilon(1e-9));
}

// With no groups the polytope is integral, so the LP optimum must equal the
// maximum-weight matching value and the basic optimal solution is integral.
TEST_CASE("matching LP is integral and matches the kernel", "[lp]") {
  SplitMix64 rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    MarketInstance m = corpus::random_monotone_instance(rng, 8);
    auto flp = build_fairness_lp(m, FairnessSpec{});
    auto frac = solve_fairness_lp(flp);
    REQUIRE(frac);
    for (const Rat& v : frac->z) CHECK((v == Rat(0) || v == Rat(1)));
    auto fast = solve_max_welfare(m);
    CHECK(frac->objective(flp.graph) == fast.welfare_value);
  }
}

TEST_CASE("fairness LP examples", "[lp]") {
  MarketInstance m;
  m.sellers.push_back({"s", 2, {Rat(1), Rat(2)}});
  m.buyers.push_back({"b", 1, {Rat(3), Rat(2)}});
  m.compat_edges.push_back({"s", "b"});

  SECTION("the 2x2 instance with no groups has LP optimum 2") {
    auto flp = build_fairness_lp(m, FairnessSpec{});
    auto frac = solve_fairness_lp(flp);
    REQUIRE(frac);
    CHECK(frac->objective(flp.graph) == Rat(2));
  }
  SECTION("group on a buyer with no incident edges is infeasible") {
    MarketInstance m2 = m;
    m2.buyers.push_back({"lonely", 9, {Rat(0)}});
    FairnessSpec spec;
    spec.groups.push_back({{"lonely"}, 1});
    auto flp = build_fairness_lp(m2, spec);
    CHECK_FALSE(solve_fairness_lp(flp));
  }
  SECTION("group referencing an unknown buyer is a validation error") {
    FairnessSpec spec;
    spec.groups.push_back({{"ghost"}, 1});
    CHECK_THROWS_AS(build_fairness_lp(m, spec), ValidationError);
  }
  SECTION("symmetric two-edge instance with a group bound") {
    MarketInstance m2;
    m2.sellers.push_back({"s1", 1, {Rat(1)}});
    m2.sellers.push_back({"s2", 2, {Rat(1)}});
    m2.buyers.push_back({"b", 3, {Rat(2)}});
    m2.compat_edges = {{"s1", "b"}, {"s2", "b"}};
    FairnessSpec spec;
    spec.groups.push_back({{"b"}, 1});
    auto flp = build_fairness_lp(m2, spec);
    auto frac = solve_fairness_lp(flp);
    REQUIRE(frac);
    CHECK(frac->objective(flp.graph) == Rat(1));
    CHECK(frac->z[0] + frac->z[1] == Rat(1));
  }
}
