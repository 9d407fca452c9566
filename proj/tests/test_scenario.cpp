#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/scenario.hpp"

using namespace mta;

TEST_CASE("chain scenario loads with defaults applied") {
  Scenario s = load_scenario(chain3_doc());
  CHECK(s.nodes.size() == 3);
  CHECK(s.total_demand() == 6);
  CHECK(s.transfers.count(2) == 1);
  CHECK(s.params.R(BaseMode::CP) == doctest::Approx(100.0));
  CHECK(s.params.S(BaseMode::CD) == doctest::Approx(0.04));   // inherits the CP value
  CHECK(s.params.PF(BaseMode::CD) == doctest::Approx(1.0));   // parks like a car
  CHECK(s.params.Sp(Subnet::WN) == doctest::Approx(3.0));
  CHECK(s.params.beta == doctest::Approx(4.0));
  CHECK(s.fleet_size == 4);
  // Origins and destinations fall back to the demand table.
  CHECK(s.origins == std::set<NodeId>{1, 2});
  CHECK(s.destinations == std::set<NodeId>{3});
}

TEST_CASE("empty demand loads with zero total") {
  auto doc = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "demand":[],
    "toggles":{"modes":["car"]}})";
  Scenario s = load_scenario(doc);
  CHECK(s.total_demand() == 0);
  CHECK(validate_scenario(s).ok());
}

TEST_CASE("parse errors carry the field path") {
  CHECK_THROWS_WITH_AS(load_scenario("{}"), doctest::Contains("nodes"), ParseError);
  auto bad_node = R"({"nodes":[1],
    "links":[{"id":"a","tail":1,"head":9,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "toggles":{"modes":["car"]}})";
  CHECK_THROWS_WITH_AS(load_scenario(bad_node), doctest::Contains("unknown node"), ParseError);
  auto negative = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "demand":[{"o":1,"d":2,"q":-3}],
    "toggles":{"modes":["car"]}})";
  CHECK_THROWS_WITH_AS(load_scenario(negative), doctest::Contains("negative"), ParseError);
  auto cp_only = R"({"nodes":[1,2],
    "links":[{"id":"a","tail":1,"head":2,"length":1,"subnetwork":"RN","t0":1,"capacity":1}],
    "toggles":{"modes":["car","CP"]}})";
  CHECK_THROWS_AS(load_scenario(cp_only), ParseError);
}

TEST_CASE("serialize then load is the identity") {
  Scenario s = load_scenario(chain3_doc());
  Scenario t = load_scenario(serialize_scenario(s));
  CHECK(serialize_scenario(s) == serialize_scenario(t));
  CHECK(t.demand == s.demand);
  CHECK(t.links.size() == s.links.size());
  for (std::size_t i = 0; i < s.links.size(); ++i) {
    CHECK(t.links[i].id == s.links[i].id);
    CHECK(t.links[i].length == s.links[i].length);
    CHECK(t.links[i].t0 == s.links[i].t0);
  }
  CHECK(t.toggles.modes == s.toggles.modes);
  CHECK(t.params.trip_fare == s.params.trip_fare);
  CHECK(t.parking_capacity == s.parking_capacity);
}

TEST_CASE("validation flags constructed defects and stays quiet otherwise") {
  Scenario s = load_scenario(chain3_doc());
  CHECK(validate_scenario(s).ok());

  SUBCASE("transfer node without metro") {
    Scenario bad = s;
    bad.transfers = {1};
    auto rep = validate_scenario(bad);
    REQUIRE(!rep.ok());
    bool found = false;
    for (auto& v : rep.violations) found |= v.rule == "transfer_no_metro";
    CHECK(found);
  }
  SUBCASE("zero capacity road link") {
    Scenario bad = s;
    bad.links[0].capacity = 0.0;
    auto rep = validate_scenario(bad);
    bool found = false;
    for (auto& v : rep.violations) found |= v.rule == "zero_capacity_link";
    CHECK(found);
  }
  SUBCASE("disconnected OD") {
    Scenario bad = s;
    bad.demand[{3, 1}] = 5;  // nothing drives backwards in the chain
    auto rep = validate_scenario(bad);
    bool found = false;
    for (auto& v : rep.violations) found |= v.rule == "disconnected_od";
    CHECK(found);
  }
  SUBCASE("carpooling passengers without drivers") {
    Scenario bad = s;
    std::erase(bad.toggles.modes, Mode{{BaseMode::CD}});
    auto rep = validate_scenario(bad);
    bool found = false;
    for (auto& v : rep.violations) found |= v.rule == "cp_without_cd";
    CHECK(found);
  }
}

TEST_CASE("shipped fixtures parse and validate cleanly") {
  for (const char* name : {"parallel_links.json"}) {
    Scenario s = load_scenario(read_fixture(name));
    CHECK(validate_scenario(s).ok());
  }
}
