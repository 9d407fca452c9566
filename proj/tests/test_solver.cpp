#include <doctest.h>
#include <cmath>

#include "fixtures_util.hpp"
#include "mta/analysis.hpp"
#include "mta/solver.hpp"

using namespace mta;

TEST_CASE("one-variable linear programs") {
  MathProgram mp;
  int x = mp.add_var("x", 0.0, 10.0, false, 1.0, 0, {});
  mp.add_row("lo", Sense::GE, 3.0, {{x, 1.0}}, {});
  Solution s = solve_lp_relaxation(mp);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.value(x) == doctest::Approx(3.0));

  MathProgram bad;
  int y = bad.add_var("y", 0.0, 10.0, false, 1.0, 0, {});
  bad.add_row("lo", Sense::GE, 2.0, {{y, 1.0}}, {});
  bad.add_row("hi", Sense::LE, 1.0, {{y, 1.0}}, {});
  CHECK(solve_lp_relaxation(bad).status == SolveStatus::Infeasible);
}

TEST_CASE("parallel links split under the relaxation and commit as integers") {
  Scenario s = load_scenario(read_fixture("parallel_links.json"));
  PathCatalog cat = PathCatalog::build(s);
  REQUIRE(cat.od_modes().size() == 1);
  REQUIRE(cat.od_modes()[0].path_ids.size() == 2);

  BuildOptions continuous;
  continuous.integer = false;
  MathProgram lp = build_program(s, cat, Principle::UE, continuous);
  Solution rel = solve_lp_relaxation(lp);
  REQUIRE(rel.status == SolveStatus::Optimal);
  CHECK(rel.objective == doctest::Approx(0.5).epsilon(1e-9));
  FlowDecomposition fd = decode_solution(lp, rel);
  for (const auto& [pid, f] : fd.path_flow) CHECK(f == doctest::Approx(0.5));

  MathProgram ip = build_program(s, cat, Principle::UE, {});
  Solution fix = branch_and_bound(ip);
  REQUIRE(fix.status == SolveStatus::Optimal);
  CHECK(fix.objective == doctest::Approx(1.0).epsilon(1e-9));
  FlowDecomposition fi = decode_solution(ip, fix);
  double whole = 0.0, used = 0.0;
  for (const auto& [pid, f] : fi.path_flow) {
    whole += f;
    used += f > 0.5 ? 1 : 0;
  }
  CHECK(whole == doctest::Approx(1.0));
  CHECK(used == 1);  // all of the demand on one link

  // Weak duality held at the end of the search.
  CHECK(fix.best_bound <= fix.objective + 1e-9);
  CHECK(fix.gap <= 1e-6);
}

TEST_CASE("zero demand solves to the empty optimum in one node") {
  auto doc = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "demand":[],
    "toggles":{"modes":["car"]}})";
  Scenario s = load_scenario(doc);
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  Solution sol = branch_and_bound(mp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(sol.nodes == 1);
}

TEST_CASE("identical inputs give identical runs") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  Solution a = branch_and_bound(mp);
  Solution b = branch_and_bound(mp);
  REQUIRE(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.nodes == b.nodes);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t j = 0; j < a.values.size(); ++j) CHECK(a.values[j] == b.values[j]);
}

TEST_CASE("chain scenario solves under both principles with feasible incumbents") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  for (Principle pr : {Principle::UE, Principle::SO}) {
    MathProgram mp = build_program(s, cat, pr, {});
    Solution sol = branch_and_bound(mp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(max_constraint_violation(mp, sol.values) <= 1e-6);
    // Integer-flagged variables are integral.
    for (std::size_t j = 0; j < mp.vars.size(); ++j)
      if (mp.vars[j].integer)
        CHECK(std::abs(sol.values[j] - std::round(sol.values[j])) <= 1e-6);
  }
}
