#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/costs.hpp"

using namespace mta;

namespace {

Scenario walk_pair_scenario() {
  return load_scenario(R"({
    "nodes": [1, 2, 3],
    "links": [
      {"id": "w1", "tail": 1, "head": 2, "length": 3, "subnetwork": "WN"},
      {"id": "w2", "tail": 2, "head": 3, "length": 3, "subnetwork": "WN"}
    ],
    "demand": [{"o": 1, "d": 3, "q": 1}],
    "params": {"alpha": 5, "gamma": 0.25, "Sp": {"W": 3}},
    "toggles": {"modes": ["W"]}
  })");
}

}  // namespace

TEST_CASE("road travel time follows the volume-delay curve") {
  Scenario s = load_scenario(chain3_doc());
  Link l;
  l.subnet = Subnet::RN;
  l.t0 = 1.0;
  l.capacity = 100.0;
  s.params.eta = 0.15;
  s.params.beta = 4.0;
  CHECK(link_travel_time(s, l, 0.0) == doctest::Approx(1.0));
  CHECK(link_travel_time(s, l, 100.0) == doctest::Approx(1.15));
  // Strictly increasing in flow.
  double prev = link_travel_time(s, l, 0.0);
  for (double x : {10.0, 50.0, 120.0, 300.0}) {
    double t = link_travel_time(s, l, x);
    CHECK(t > prev);
    prev = t;
  }
  Link m;
  m.subnet = Subnet::MN;
  m.length = 60.0;
  s.params.speed[Subnet::MN] = 60.0;
  CHECK(link_travel_time(s, m, 0.0) == doctest::Approx(1.0));
  CHECK(link_travel_time(s, m, 500.0) == doctest::Approx(1.0));  // flow independent
}

TEST_CASE("waiting time cases") {
  Scenario s = load_scenario(chain3_doc());
  CHECK(waiting_time(s, BaseMode::car, true, 123.0, -1) == 0.0);
  CHECK(waiting_time(s, BaseMode::CD, true, 123.0, -1) == 0.0);
  s.pt_lines[0].frequency = 3.0;
  CHECK(waiting_time(s, BaseMode::bus, true, 0.0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(waiting_time(s, BaseMode::bus, false, 0.0, 0) == 0.0);
  s.params.meeting_rate[BaseMode::CP] = 100.0;
  CHECK(waiting_time(s, BaseMode::CP, true, 50.0, -1) == doctest::Approx(0.5));
  CHECK(waiting_time(s, BaseMode::CP, false, 50.0, -1) == 0.0);
}

TEST_CASE("service time cases") {
  Scenario s = load_scenario(chain3_doc());
  s.params.service_time[BaseMode::CD] = 0.04;
  s.params.parking_time[BaseMode::CD] = 0.17;
  s.params.service_time[BaseMode::bus] = 0.04;
  CHECK(service_time(s, BaseMode::walk, true, true) == 0.0);
  CHECK(service_time(s, BaseMode::CD, false, true) == doctest::Approx(0.21));
  CHECK(service_time(s, BaseMode::bus, false, false) == doctest::Approx(0.04));
}

TEST_CASE("monetary cost cases") {
  Scenario s = load_scenario(chain3_doc());
  Link l;
  l.length = 100.0;
  s.params.gamma = 0.25;
  s.params.parking_fare[BaseMode::car] = 1.0;
  CHECK(monetary_cost(s, BaseMode::walk, l, true, true) == 0.0);
  CHECK(monetary_cost(s, BaseMode::car, l, false, true) == doctest::Approx(26.0));
  Link short_link;
  short_link.length = 10.0;
  s.params.trip_fare[BaseMode::CD] = 0.7;
  CHECK(monetary_cost(s, BaseMode::CD, short_link, false, false) == doctest::Approx(1.8));
}

TEST_CASE("generalized path cost on a two-link walk") {
  Scenario s = walk_pair_scenario();
  auto paths = enumerate_paths(s, 1, 3, Mode{{BaseMode::walk}}, 4, 1);
  REQUIRE(paths.size() == 1);
  auto gc = generalized_path_cost(s, paths[0], FlowState::zero(s), Principle::UE);
  CHECK(gc.total == doctest::Approx(10.0));  // two unit-time links at alpha 5
  s.params.alpha = 0.0;
  auto gc0 = generalized_path_cost(s, paths[0], FlowState::zero(s), Principle::UE);
  CHECK(gc0.total == doctest::Approx(0.0));  // walking carries no monetary cost
}

TEST_CASE("generalized cost adds over legs and carries the SMS delay under UE") {
  Scenario s = load_scenario(chain3_doc());
  auto car_leg = enumerate_paths(s, 1, 2, Mode{{BaseMode::car}}, 4, 1)[0];
  auto metro_leg = enumerate_paths(s, 2, 3, Mode{{BaseMode::metro}}, 4, 1)[0];
  Path both = compose_intermodal(s, car_leg, metro_leg);
  FlowState st = FlowState::zero(s);
  st.link_flow[0] = 30.0;
  double whole = generalized_path_cost(s, both, st, Principle::SO).total;
  double part1 = generalized_path_cost(s, car_leg, st, Principle::SO).total;
  double part2 = generalized_path_cost(s, metro_leg, st, Principle::SO).total;
  CHECK(whole == doctest::Approx(part1 + part2));

  auto rs = enumerate_paths(s, 2, 3, Mode{{BaseMode::RS}}, 4, 1);
  REQUIRE(!rs.empty());
  st.mode_demand[BaseMode::RS] = 40.0;
  auto ue = generalized_path_cost(s, rs[0], st, Principle::UE);
  auto so = generalized_path_cost(s, rs[0], st, Principle::SO);
  CHECK(ue.delay == doctest::Approx(s.params.alpha * 40.0 / s.params.R(BaseMode::RS)));
  CHECK(so.delay == 0.0);
  CHECK(ue.total == doctest::Approx(so.total + ue.delay));

  // Non-SMS costs ignore the mode demand entirely.
  auto bus = enumerate_paths(s, 1, 3, Mode{{BaseMode::bus}}, 4, 1)[0];
  double with_q = generalized_path_cost(s, bus, st, Principle::UE).total;
  st.mode_demand[BaseMode::RS] = 0.0;
  double without_q = generalized_path_cost(s, bus, st, Principle::UE).total;
  CHECK(with_q == doctest::Approx(without_q));
}
