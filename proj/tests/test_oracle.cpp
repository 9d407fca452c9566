#include <doctest.h>

#include <chrono>

#include "fixtures_util.hpp"
#include "mta/oracle.hpp"
#include "mta/solver.hpp"

using namespace mta;

TEST_CASE("two parallel links with unit demand have two optima") {
  Scenario s = load_scenario(read_fixture("parallel_links.json"));
  PathCatalog cat = PathCatalog::build(s);
  OracleResult res = brute_force_solve(s, cat, Principle::UE);
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.optima == 2);

  MathProgram mp = build_program(s, cat, Principle::UE, {});
  Solution sol = branch_and_bound(mp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.objective - res.objective) <= mp.pwl_gap_bound + 1e-9);
}

TEST_CASE("zero demand gives the single empty optimum") {
  auto doc = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "demand":[],
    "toggles":{"modes":["car"]}})";
  Scenario s = load_scenario(doc);
  PathCatalog cat = PathCatalog::build(s);
  OracleResult res = brute_force_solve(s, cat, Principle::SO);
  CHECK(res.objective == doctest::Approx(0.0));
  CHECK(res.optima == 1);
}

TEST_CASE("enumeration refuses past the cap") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  CHECK_THROWS_WITH_AS(brute_force_solve(s, cat, Principle::UE, 5), doctest::Contains("cap"),
                       ModelError);
}

TEST_CASE("solver matches the oracle on the matching-heavy chain") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  for (Principle pr : {Principle::UE, Principle::SO}) {
    INFO("principle ", to_string(pr));
    auto t0 = std::chrono::steady_clock::now();
    OracleResult oracle = brute_force_solve(s, cat, pr);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    INFO("oracle candidates ", oracle.candidates, " in ", secs, "s");
    MathProgram mp = build_program(s, cat, pr, {});
    Solution sol = branch_and_bound(mp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    // The solver optimizes the chord surrogate, which can only overestimate.
    CHECK(sol.objective >= oracle.objective - 1e-6);
    CHECK(sol.objective <= oracle.objective + mp.pwl_gap_bound + 1e-6);
  }
}
