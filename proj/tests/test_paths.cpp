#include <doctest.h>

#include "fixtures_util.hpp"
#include "mta/costs.hpp"
#include "mta/paths.hpp"

using namespace mta;

namespace {
Scenario chain() { return load_scenario(chain3_doc()); }
}  // namespace

TEST_CASE("car paths come out loop-free and cost ordered") {
  Scenario s = chain();
  auto paths = enumerate_paths(s, 1, 3, Mode{{BaseMode::car}}, 4, 1);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].node_seq_string(s) == "1-2-3");  // cheaper than the long direct link
  CHECK(paths[1].node_seq_string(s) == "1-3");
  CHECK(freeflow_path_cost(s, paths[0]) <= freeflow_path_cost(s, paths[1]));
  for (const auto& p : paths) {
    CHECK(p.origin == 1);
    CHECK(p.dest == 3);
    CHECK(p.legs.size() == 1);
  }
}

TEST_CASE("degenerate OD is rejected") {
  Scenario s = chain();
  CHECK_THROWS_AS(enumerate_paths(s, 2, 2, Mode{{BaseMode::car}}, 4, 1), ModelError);
}

TEST_CASE("bus paths are contiguous line segments") {
  Scenario s = chain();
  auto full = enumerate_paths(s, 1, 3, Mode{{BaseMode::bus}}, 4, 1);
  REQUIRE(full.size() == 1);
  CHECK(full[0].node_seq_string(s) == "1-2-3");
  CHECK(full[0].legs[0].pt_line == 0);
  auto seg = enumerate_paths(s, 2, 3, Mode{{BaseMode::bus}}, 4, 1);
  REQUIRE(seg.size() == 1);
  CHECK(seg[0].all_links.size() == 1);
  // No metro infrastructure from node 1.
  CHECK(enumerate_paths(s, 1, 3, Mode{{BaseMode::metro}}, 4, 1).empty());
  CHECK(enumerate_paths(s, 1, 2, Mode{{BaseMode::walk}}, 4, 1).size() == 1);
}

TEST_CASE("intermodal composition joins at a transfer node") {
  Scenario s = chain();
  auto car_leg = enumerate_paths(s, 1, 2, Mode{{BaseMode::car}}, 4, 1);
  auto metro_leg = enumerate_paths(s, 2, 3, Mode{{BaseMode::metro}}, 4, 1);
  REQUIRE(!car_leg.empty());
  REQUIRE(!metro_leg.empty());
  Path pr = compose_intermodal(s, car_leg[0], metro_leg[0]);
  CHECK(pr.mode.name() == "car&M");
  CHECK(pr.node_seq_string(s) == "1-2-3");
  CHECK(pr.transfer_after(s, 0) == 2);
  CHECK(pr.length == doctest::Approx(220.0));

  // Junction must be a transfer node.
  Scenario t = chain();
  t.transfers.clear();
  CHECK_THROWS_AS(compose_intermodal(t, car_leg[0], metro_leg[0]), ModelError);

  auto composed = enumerate_paths(s, 1, 3, mode_from_string("car&M"), 4, 1);
  REQUIRE(composed.size() == 1);
  CHECK(composed[0].legs.size() == 2);
}

TEST_CASE("carpool legs respect the minimum trip length") {
  Scenario s = chain();
  s.toggles.carpool_min_distance = 150.0;
  auto cp = enumerate_paths(s, 1, 2, Mode{{BaseMode::CP}}, 4, 1);
  CHECK(cp.empty());  // single link of length 100 is below the threshold
  auto cp13 = enumerate_paths(s, 1, 3, Mode{{BaseMode::CP}}, 4, 1);
  CHECK(cp13.size() == 2);  // 200 and 250 both qualify
}

TEST_CASE("catalog relations mirror each other") {
  Scenario s = chain();
  PathCatalog cat = PathCatalog::build(s);

  int outer = cat.find_by_links(1, 3, "CP", {0, 1});
  int inner = cat.find_by_links(2, 3, "CP", {1});
  REQUIRE(outer >= 0);
  REQUIRE(inner >= 0);

  auto supers = cat.superpaths_containing(cat.path(inner), 1, 3, "CP");
  CHECK(std::find(supers.begin(), supers.end(), outer) != supers.end());
  auto subs = cat.subpaths_of(cat.path(outer), 2, 3, "CP");
  CHECK(std::find(subs.begin(), subs.end(), inner) != subs.end());

  // A path is a sub-path of itself.
  auto self = cat.subpaths_of(cat.path(outer), 1, 3, "CP");
  CHECK(std::find(self.begin(), self.end(), outer) != self.end());

  // Duality on every cataloged pair of the same mode.
  for (const auto& p : cat.all())
    for (const auto& l : cat.all()) {
      if (p.mode.name() != "CP" || l.mode.name() != "CP") continue;
      auto q = cat.superpaths_containing(p, l.origin, l.dest, "CP");
      bool in_q = std::find(q.begin(), q.end(), l.id) != q.end();
      auto r = cat.subpaths_of(l, p.origin, p.dest, "CP");
      bool in_r = std::find(r.begin(), r.end(), p.id) != r.end();
      CHECK(in_q == in_r);
    }
  // Empty when the nodes are not on the path in order.
  CHECK(cat.subpaths_of(cat.path(outer), 3, 1, "CP").empty());
}

TEST_CASE("position flags mark leg boundaries") {
  Scenario s = chain();
  auto composed = enumerate_paths(s, 1, 3, mode_from_string("car&M"), 4, 1);
  REQUIRE(composed.size() == 1);
  auto pos = link_positions(composed[0]);
  REQUIRE(pos.size() == 2);
  CHECK(pos[0].leg_origin);
  CHECK(pos[0].leg_dest);  // one-link leg is both
  CHECK(pos[1].leg == 1);
  CHECK(pos[1].leg_origin);  // waiting and boarding attach to the metro leg here
  // Row sums of the incidence equal the link count.
  CHECK(composed[0].all_links.size() == 2);
}

TEST_CASE("enumeration is deterministic") {
  Scenario s = chain();
  PathCatalog a = PathCatalog::build(s);
  PathCatalog b = PathCatalog::build(s);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.path(i).key() == b.path(i).key());
}

TEST_CASE("ridesharing matching candidates cover nested and staggered pairs") {
  Scenario s = chain();
  PathCatalog cat = PathCatalog::build(s);
  auto uses = rs_ride_uses(s, cat);
  REQUIRE(!uses.empty());
  auto pairs = rs_pair_candidates(s, cat, uses);
  REQUIRE(!pairs.empty());
  int ride13 = cat.find_by_links(1, 3, "RS", {0, 1});
  int ride23 = cat.find_by_links(2, 3, "RS", {1});
  REQUIRE(ride13 >= 0);
  REQUIRE(ride23 >= 0);
  bool same_od = false, nested = false;
  for (const auto& pc : pairs) {
    if (pc.ride_a == ride13 && pc.ride_b == ride13) same_od = true;
    if (pc.ride_a == std::min(ride13, ride23) && pc.ride_b == std::max(ride13, ride23)) {
      nested = true;
      CHECK(cat.path(pc.vehicle_path).node_seq_string(s) == "1-2-3");
      CHECK(pc.mid1 == 2);  // second pickup at node 2
      CHECK(pc.mid2 == 3);  // shared drop-off
    }
  }
  CHECK(same_od);
  CHECK(nested);
  // Disjoint rides never pair: every candidate's rides share a link.
  for (const auto& pc : pairs) {
    const auto& a = cat.path(pc.ride_a).all_links;
    const auto& b = cat.path(pc.ride_b).all_links;
    bool share = false;
    for (int la : a)
      for (int lb : b) share |= la == lb;
    CHECK(share);
  }
}

TEST_CASE("carpool stop candidates serve exact sub-paths") {
  Scenario s = chain();
  PathCatalog cat = PathCatalog::build(s);
  auto cands = cd_stop_candidates(s, cat);
  REQUIRE(!cands.empty());
  for (const auto& c : cands) {
    const Path& drv = cat.path(c.driver_path);
    const Path& ride = cat.path(c.ride_path);
    CHECK(ride.origin == c.r);
    CHECK(ride.dest == c.s);
    CHECK(PathCatalog::slice(s, drv, c.r, c.s) == ride.all_links);
  }
  // The (1,3) driver can stop for the (2,3) passenger over the chain.
  bool cross = false;
  for (const auto& c : cands) cross |= (c.r == 2 && c.s == 3);
  CHECK(cross);
}
