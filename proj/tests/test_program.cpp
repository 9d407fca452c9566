#include <doctest.h>

#include <cmath>

#include "fixtures_util.hpp"
#include "mta/program.hpp"
#include "mta/solver.hpp"

using namespace mta;

TEST_CASE("chord cuts reproduce the power exactly at breakpoints") {
  auto cuts = power_chords(4.0, 200.0, 8);
  REQUIRE(cuts.size() == 8);
  for (int k = 0; k <= 8; ++k) {
    double x = 200.0 * k / 8;
    CHECK(pwl_value(cuts, x) == doctest::Approx(std::pow(x, 5.0)).epsilon(1e-12));
  }
  // Overestimates in between, never under.
  for (double x = 0.0; x <= 200.0; x += 3.7)
    CHECK(pwl_value(cuts, x) >= std::pow(x, 5.0) - 1e-9);
  CHECK_THROWS_AS(power_chords(4.0, 200.0, 1), ModelError);
}

TEST_CASE("congestion integral approximation error stays below two percent") {
  // Relative error of the full congestion primitive with the spec's shape.
  double t0 = 1.0, c = 100.0, eta = 0.15, beta = 4.0, xmax = 200.0;
  auto cuts = power_chords(beta, xmax, 8);
  double worst_rel = 0.0;
  for (int i = 1; i <= 400; ++i) {
    double x = xmax * i / 400;
    double exact = t0 * (x + eta * std::pow(x, beta + 1) / ((beta + 1) * std::pow(c, beta)));
    double approx = t0 * (x + eta * pwl_value(cuts, x) / ((beta + 1) * std::pow(c, beta)));
    worst_rel = std::max(worst_rel, (approx - exact) / exact);
  }
  CHECK(worst_rel < 0.02);
  CHECK(worst_rel > 0.0);
}

TEST_CASE("degenerate curve reduces to the linear term") {
  Scenario s = load_scenario(chain3_doc());
  s.params.eta = 0.0;
  MathProgram mp;
  int x = mp.add_var("x", 0.0, 10.0, false, 0.0, 0, {});
  int y = linearize_bpr_integral(mp, s, 0, x, 8, 10.0, Principle::UE);
  CHECK(mp.vars[x].obj == doctest::Approx(s.params.alpha * s.links[0].t0));
  CHECK(mp.vars[y].obj == 0.0);
  CHECK(mp.rows.empty());  // no cuts needed when the curve is flat
  CHECK(mp.pwl_gap_bound == 0.0);
}

TEST_CASE("bilinear product expands exactly over the digit system") {
  // q = 5, x = 3 with bound 7 forces z = 15 at every feasible point.
  MathProgram mp;
  int q = mp.add_var("q", 5.0, 5.0, true, 0.0, 0, {});
  int x = mp.add_var("x", 3.0, 3.0, true, 0.0, 0, {});
  int z = linearize_bilinear_product(mp, q, x, 7, 7.0, 0.0, "t");
  REQUIRE(z >= 0);

  SolverOptions opts;
  for (double dir : {1.0, -1.0}) {
    MathProgram probe = mp;
    probe.vars[z].obj = dir;
    Solution sol = branch_and_bound(probe, opts);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.value(z) == doctest::Approx(15.0));
  }

  // Annihilator: q fixed to zero kills the product whatever x does.
  MathProgram mp0;
  int q0 = mp0.add_var("q", 0.0, 0.0, true, 0.0, 0, {});
  int x0 = mp0.add_var("x", 0.0, 7.0, true, 0.0, 0, {});
  int z0 = linearize_bilinear_product(mp0, q0, x0, 7, 7.0, 0.0, "t");
  mp0.vars[z0].obj = -1.0;  // push z up as hard as possible
  Solution sol0 = branch_and_bound(mp0, {});
  REQUIRE(sol0.status == SolveStatus::Optimal);
  CHECK(sol0.value(z0) == doctest::Approx(0.0));

  // Continuous build declares the product instead of expanding it.
  MathProgram cont;
  cont.integer_mode = false;
  int qc = cont.add_var("q", 0.0, 7.0, true, 0.0, 0, {});
  int zc = linearize_bilinear_product(cont, qc, qc, 7, 7.0, 1.0, "t");
  CHECK(zc == -1);
  REQUIRE(cont.bilinear.size() == 1);
  CHECK(cont.bilinear[0].coef == doctest::Approx(1.0));
  CHECK_THROWS_AS(branch_and_bound(cont, {}), ModelError);
}

TEST_CASE("mode elimination drops matching machinery") {
  Scenario s = load_scenario(chain3_doc());
  s.toggles.modes = {Mode{{BaseMode::car}}, Mode{{BaseMode::bus}}, Mode{{BaseMode::metro}},
                     Mode{{BaseMode::walk}}};
  s.toggles.intermodality = false;
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  for (const auto& v : mp.vars) {
    CHECK(v.info.kind != VarKind::RsPairFlow);
    CHECK(v.info.kind != VarKind::EhVehFlow);
    CHECK(v.info.kind != VarKind::OccCount);
    CHECK(v.info.kind != VarKind::EmptyCount);
  }
  for (int fam : {9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22})
    CHECK(!mp.has_family(fam));
  for (int fam : {7, 8, 23, 26}) CHECK(mp.has_family(fam));
}

TEST_CASE("full build covers every formulation family") {
  Scenario s = load_scenario(chain3_doc());
  // Enable every service family: door-to-door SMS plus intermodal legs.
  s.toggles.modes = {Mode{{BaseMode::car}},  Mode{{BaseMode::bus}}, Mode{{BaseMode::metro}},
                     Mode{{BaseMode::walk}}, Mode{{BaseMode::CD}},  Mode{{BaseMode::CP}},
                     Mode{{BaseMode::EH}},   Mode{{BaseMode::RS}},
                     mode_from_string("car&M"), mode_from_string("CD&M"),
                     mode_from_string("CP&M"), mode_from_string("RS&M"),
                     mode_from_string("EH&M")};
  PathCatalog cat = PathCatalog::build(s);
  MathProgram mp = build_program(s, cat, Principle::UE, {});
  for (int fam = 7; fam <= 35; ++fam) {
    INFO("family ", fam);
    CHECK(mp.has_family(fam));
  }
  // Every linearized program is linear: finite bounds everywhere and no
  // declared bilinear leftovers.
  CHECK(mp.bilinear.empty());
  for (const auto& v : mp.vars) {
    CHECK(std::isfinite(v.lb));
    CHECK(std::isfinite(v.ub));
  }
}

TEST_CASE("program hash is stable and order sensitive") {
  Scenario s = load_scenario(chain3_doc());
  PathCatalog cat = PathCatalog::build(s);
  MathProgram a = build_program(s, cat, Principle::UE, {});
  MathProgram b = build_program(s, cat, Principle::UE, {});
  CHECK(program_hash(a) == program_hash(b));
  MathProgram c = build_program(s, cat, Principle::SO, {});
  CHECK(program_hash(a) != program_hash(c));
}
