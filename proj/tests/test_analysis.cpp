#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/oracle.hpp"
#include "mta/runner.hpp"

using namespace mta;

namespace {

struct Solved {
  Scenario s;
  PathCatalog cat;
  MathProgram mp;
  Solution sol;
};

Solved solve_doc(const std::string& doc, Principle pr) {
  Solved r{load_scenario(doc), PathCatalog{}, MathProgram{}, Solution{}};
  r.cat = PathCatalog::build(r.s);
  r.mp = build_program(r.s, r.cat, pr, {});
  r.sol = branch_and_bound(r.mp);
  REQUIRE(r.sol.status == SolveStatus::Optimal);
  return r;
}

}  // namespace

TEST_CASE("closed forms of the inefficiency bound") {
  CHECK(poa_curve_bound(1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(poa_curve_bound(4.0) == doctest::Approx(2.1505).epsilon(1e-3));
  CHECK(poa_upper_bound(1.0, 2, 1, 1) == doctest::Approx(4.0 / 3.0 + 2.0 + 2.0));
  CHECK(poa_upper_bound(4.0, 0, 5, 7) == doctest::Approx(poa_curve_bound(4.0)));
}

TEST_CASE("carpooling counts the driver vehicle only; ridesharing counts cars") {
  Solved r = solve_doc(chain3_doc(), Principle::UE);
  FlowDecomposition fd = decode_solution(r.mp, r.sol);
  LinkFlows lf = aggregate_link_flows(r.s, r.cat, fd);

  // Reconstruct x_a from scratch and compare with the program variables.
  for (std::size_t j = 0; j < r.mp.vars.size(); ++j)
    if (r.mp.vars[j].info.kind == VarKind::TotalFlow)
      CHECK(lf.total[r.mp.vars[j].info.idx1] == doctest::Approx(r.sol.value((int)j)).epsilon(1e-7));

  // Hand-built pattern: one driver with one passenger on a single link.
  FlowDecomposition hand;
  int cd = r.cat.find_by_links(1, 3, "CD", {0, 1});
  int cp = r.cat.find_by_links(1, 3, "CP", {0, 1});
  REQUIRE(cd >= 0);
  REQUIRE(cp >= 0);
  hand.path_flow[cd] = 1.0;
  hand.path_flow[cp] = 1.0;
  LinkFlows hf = aggregate_link_flows(r.s, r.cat, hand);
  double pt_units = r.s.pt_units_on_link(0);
  CHECK(hf.total[0] == doctest::Approx(pt_units + 1.0));  // driver only
  CHECK(hf.modal[{0, "CD"}] == doctest::Approx(1.0));
  CHECK(hf.modal[{0, "CP"}] == doctest::Approx(1.0));

  // Two ridesharing passengers sharing one vehicle.
  FlowDecomposition rs;
  int ride = r.cat.find_by_links(2, 3, "RS", {1});
  REQUIRE(ride >= 0);
  rs.path_flow[ride] = 2.0;
  rs.rs_veh[ride] = 1.0;
  LinkFlows rf = aggregate_link_flows(r.s, r.cat, rs);
  CHECK(rf.total[1] == doctest::Approx(r.s.pt_units_on_link(1) + 1.0));
  CHECK(rf.modal[{1, "RS"}] == doctest::Approx(2.0));
}

TEST_CASE("system cost of the empty network is the scheduled traffic only") {
  auto doc = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":60,"subnetwork":"RN","t0":1,"capacity":10}],
    "pt_lines":[{"id":"L","mode":"bus","links":["a"],"frequency":2,"veh_capacity":10}],
    "demand":[],
    "params":{"alpha":5,"bus_pce":3},
    "toggles":{"modes":["bus"]}})";
  Scenario s = load_scenario(doc);
  PathCatalog cat = PathCatalog::build(s);
  FlowDecomposition fd;
  double c = total_system_cost(s, cat, fd);
  double x = 6.0;  // two buses of three car units
  double expect = 5.0 * link_travel_time(s, s.links[0], x) * x;
  CHECK(c == doctest::Approx(expect));

  auto no_pt = doc;
  Scenario s2 = load_scenario(R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":60,"subnetwork":"RN","t0":1,"capacity":10}],
    "demand":[],
    "toggles":{"modes":["car"]}})");
  PathCatalog cat2 = PathCatalog::build(s2);
  CHECK(total_system_cost(s2, cat2, fd) == doctest::Approx(0.0));
}

TEST_CASE("modal shares partition the demand") {
  Solved r = solve_doc(chain3_doc(), Principle::UE);
  FlowDecomposition fd = decode_solution(r.mp, r.sol);
  auto share = modal_share(r.s, r.cat, fd);
  double total = 0.0;
  for (auto& [mode, v] : share) {
    CHECK(v >= -1e-12);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("efficiency ratio basics") {
  Solved ue = solve_doc(chain3_doc(), Principle::UE);
  FlowDecomposition fd = decode_solution(ue.mp, ue.sol);
  PoaResult same = price_of_anarchy(ue.s, ue.cat, fd, fd);
  REQUIRE(same.defined);
  CHECK(same.poa == doctest::Approx(1.0));

  Solved so = solve_doc(chain3_doc(), Principle::SO);
  FlowDecomposition sd = decode_solution(so.mp, so.sol);
  PoaResult poa = price_of_anarchy(ue.s, ue.cat, fd, sd);
  REQUIRE(poa.defined);
  CHECK(poa.poa >= 1.0 - 1e-6);
  CHECK(poa.poa <= poa.bound);
  CHECK(poa.c_ue >= poa.c_so - 1e-9);
}

TEST_CASE("single-option OD is trivially at equilibrium") {
  auto doc = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":10,"subnetwork":"RN","t0":1,"capacity":10}],
    "demand":[{"o":1,"d":2,"q":3}],
    "params":{"alpha":5,"gamma":0.25},
    "toggles":{"modes":["car"]}})";
  Solved r = solve_doc(doc, Principle::UE);
  auto rep = verify_equilibrium(r.s, r.cat, r.mp, r.sol, 1e-6);
  CHECK(rep.passed);
  REQUIRE(rep.options.size() == 1);
  CHECK(rep.options[0].used);
}

TEST_CASE("capacity-bound split reproduces the added-unit deviation cost") {
  Solved r = solve_doc(read_fixture("synth_b1.json"), Principle::UE);
  FlowDecomposition fd = decode_solution(r.mp, r.sol);

  // 90 passengers on the short line, the 10 spilled onto the detour.
  int p1 = r.cat.find_by_links(1, 2, "bus", {0});
  int p2 = r.cat.find_by_links(1, 2, "bus", {1, 2});
  REQUIRE(p1 >= 0);
  REQUIRE(p2 >= 0);
  CHECK(fd.path_flow.at(p1) == doctest::Approx(90.0));
  CHECK(fd.path_flow.at(p2) == doctest::Approx(10.0));

  auto rep = verify_equilibrium(r.s, r.cat, r.mp, r.sol, 1e-6);
  CHECK(rep.passed);
  bool saw_interesting = false;
  for (const auto& oc : rep.options) {
    if (oc.path != p2 || !oc.used) continue;
    for (auto& [label, cost] : oc.deviations)
      if (label.find("1-2") != std::string::npos && label.find("1-3-2") == std::string::npos) {
        CHECK(cost == doctest::Approx(14.668).epsilon(1e-3 / 14.668));
        saw_interesting = true;
      }
  }
  CHECK(saw_interesting);
}

TEST_CASE("system-optimal flows on a congested bottleneck leave a profitable deviation") {
  // Two-route net where selfish and social optima differ.
  auto doc = R"({"nodes":[1,2],
    "links":[
      {"id":"fast","tail":1,"head":2,"length":10,"subnetwork":"RN","t0":1,"capacity":2},
      {"id":"wide","tail":1,"head":2,"length":10,"subnetwork":"RN","t0":2.2,"capacity":50}],
    "demand":[{"o":1,"d":2,"q":6}],
    "params":{"alpha":5,"gamma":0.0,"P":{"car":0},"PF":{"car":0},"eta":0.15,"beta":4},
    "toggles":{"modes":["car"],"max_paths":4}})";
  Solved ue = solve_doc(doc, Principle::UE);
  Solved so = solve_doc(doc, Principle::SO);
  FlowDecomposition fu = decode_solution(ue.mp, ue.sol);
  FlowDecomposition fs = decode_solution(so.mp, so.sol);
  PoaResult poa = price_of_anarchy(ue.s, ue.cat, fu, fs);
  REQUIRE(poa.defined);
  CHECK(poa.poa > 1.0 + 1e-9);

  auto rep_ue = verify_equilibrium(ue.s, ue.cat, ue.mp, ue.sol, 1e-6);
  CHECK(rep_ue.passed);
  auto rep_so = verify_equilibrium(so.s, so.cat, so.mp, so.sol, 1e-6);
  CHECK(!rep_so.passed);  // someone on the wide road wants the fast one
}
