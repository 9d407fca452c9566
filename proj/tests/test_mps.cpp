#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/mps.hpp"
#include "mta/solver.hpp"

using namespace mta;

TEST_CASE("single variable program round trips") {
  MathProgram mp;
  int x = mp.add_var("x", 1.0, 4.0, false, 2.5, 0, {});
  mp.add_row("cap", Sense::LE, 3.0, {{x, 1.0}}, {});
  std::string text = to_mps(mp);
  CHECK(text.find("COLUMNS") != std::string::npos);
  MathProgram back = parse_mps(text);
  REQUIRE(back.vars.size() == 1);
  REQUIRE(back.rows.size() == 1);
  CHECK(program_hash(back) == program_hash(mp));
}

TEST_CASE("integer markers bracket exactly the integer columns") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  std::string text = to_mps(mp);
  MathProgram back = parse_mps(text);
  REQUIRE(back.vars.size() == mp.vars.size());
  for (std::size_t j = 0; j < mp.vars.size(); ++j) {
    CHECK(back.vars[j].name == mp.vars[j].name);
    CHECK(back.vars[j].integer == mp.vars[j].integer);
  }
}

TEST_CASE("built programs round trip hash-identically under both principles") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  for (Principle pr : {Principle::UE, Principle::SO}) {
    MathProgram mp = build_program(s, cat, pr, {});
    MathProgram back = parse_mps(to_mps(mp));
    CHECK(back.principle == pr);
    CHECK(program_hash(back) == program_hash(mp));
  }
}

TEST_CASE("round-tripped programs solve to the same optimum") {
  Scenario s = load_scenario(read_fixture("parallel_links.json"));
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  MathProgram back = parse_mps(to_mps(mp));
  Solution a = branch_and_bound(mp);
  Solution b = branch_and_bound(back);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
}

TEST_CASE("objective offset survives the trip") {
  MathProgram mp;
  mp.add_var("x", 0.0, 1.0, true, 1.0, 0, {});
  mp.obj_offset = 12.5;
  MathProgram back = parse_mps(to_mps(mp));
  CHECK(back.obj_offset == doctest::Approx(12.5));
  CHECK(program_hash(back) == program_hash(mp));
}
