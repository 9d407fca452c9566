#pragma once

#include <map>
#include <string>
#include <vector>

#include "mta/scenario.hpp"

namespace mta {

// One mode leg of a trip. Simple paths have exactly one leg.
struct Leg {
  BaseMode mode = BaseMode::car;
  std::vector<int> links;  // scenario link indices, tail-to-head connected
  int pt_line = -1;        // serving line for bus/metro legs
  int path_id = -1;        // catalog id of this leg as a standalone path
};

struct Path {
  int id = -1;
  NodeId origin = 0;
  NodeId dest = 0;
  Mode mode;
  std::vector<Leg> legs;
  std::vector<int> all_links;  // legs concatenated
  double length = 0.0;

  bool intermodal() const { return legs.size() > 1; }
  // Transfer node between leg k and leg k+1.
  NodeId transfer_after(const Scenario& s, std::size_t k) const;
  std::vector<NodeId> node_seq(const Scenario& s) const;
  std::string node_seq_string(const Scenario& s) const;
  bool uses_link(int link) const;
  std::string key() const;  // mode + line + link ids, identity for dedup
};

// Flags attached to each link position of a path; waiting/boarding terms bind
// to the first link of a leg, alighting/parking to the last one.
struct LinkPosition {
  int link = -1;
  int leg = 0;
  bool leg_origin = false;
  bool leg_dest = false;
};

std::vector<LinkPosition> link_positions(const Path& p);

// Enumerates up to max_paths loop-free paths for one OD and mode, ordered by
// free-flow generalized cost (ties by lexicographic link-id sequence).
std::vector<Path> enumerate_paths(const Scenario& s, NodeId i, NodeId j, const Mode& m,
                                  int max_paths, int max_transfers);

// Concatenates two paths at a transfer node into an intermodal path.
Path compose_intermodal(const Scenario& s, const Path& p1, const Path& p2);

class PathCatalog {
 public:
  static PathCatalog build(const Scenario& s);

  const Scenario& scenario() const { return *scenario_; }
  const Path& path(int id) const { return paths_[id]; }
  std::size_t size() const { return paths_.size(); }
  const std::vector<Path>& all() const { return paths_; }

  // Cataloged paths between (o, d) of a mode; mode_name "e" holds the empty
  // service-vehicle repositioning paths (plus one idle loop per node).
  const std::vector<int>& paths_for(NodeId o, NodeId d, const std::string& mode_name) const;

  // Demanded (o, d, mode) triples in deterministic order.
  struct OdMode {
    NodeId o, d;
    Mode mode;
    std::vector<int> path_ids;
  };
  const std::vector<OdMode>& od_modes() const { return od_modes_; }

  // Q_p^{(r,s)}: cataloged paths between (r, s) of the given mode that contain
  // p's link sequence as a contiguous subsequence.
  std::vector<int> superpaths_containing(const Path& p, NodeId r, NodeId s,
                                         const std::string& mode_name) const;
  // R_p^{(r,s)}: cataloged paths between (r, s) whose link sequence is a
  // contiguous subsequence of p's.
  std::vector<int> subpaths_of(const Path& p, NodeId r, NodeId s,
                               const std::string& mode_name) const;

  // Contiguous sub-path of p from r to s, as link indices; empty when r or s
  // is not on p in that order.
  static std::vector<int> slice(const Scenario& s, const Path& p, NodeId r, NodeId ss);

  int find_by_links(NodeId o, NodeId d, const std::string& mode_name,
                    const std::vector<int>& links) const;

 private:
  const Scenario* scenario_ = nullptr;
  std::vector<Path> paths_;
  std::map<std::tuple<NodeId, NodeId, std::string>, std::vector<int>> by_key_;
  std::vector<OdMode> od_modes_;

  int insert(Path p);
  void catalog_legs(Path& p);
  friend PathCatalog build_catalog_impl(const Scenario&);
};

// Shared matching structure: a carpooling driver path with a qualifying
// pickup/drop-off stop pair and the passenger ride path it serves.
struct CdStopCandidate {
  int driver_path = -1;  // door-to-door CD path
  NodeId r = 0, s = 0;   // stop pair, in driving order
  int ride_path = -1;    // cataloged CP path equal to the (r,s) sub-path
};

std::vector<CdStopCandidate> cd_stop_candidates(const Scenario& s, const PathCatalog& cat);

// Shared matching structure for ridesharing: a vehicle path serving exactly
// two passenger groups whose ride paths are contiguous sub-paths of it. The
// stop visit order follows path positions; nested ride pairs realize the
// last-in-first-out pattern and staggered pairs the first-in-first-out one.
struct RsPairCandidate {
  int vehicle_path = -1;
  int ride_a = -1;  // ride path ids, ride_a <= ride_b
  int ride_b = -1;
  NodeId mid1 = 0, mid2 = 0;  // interior stops in visit order

  int count_ride(int ride) const { return (ride_a == ride) + (ride_b == ride); }
};

// Ride paths eligible to carry ridesharing passengers: door-to-door RS paths
// of demanded ODs and RS legs of demanded intermodal paths.
struct RsRideUse {
  int ride_path = -1;
  std::vector<int> door_paths;        // == {ride_path} when demanded door-to-door
  std::vector<int> intermodal_paths;  // demanded composite paths with this RS leg
};

std::vector<RsRideUse> rs_ride_uses(const Scenario& s, const PathCatalog& cat);
std::vector<RsPairCandidate> rs_pair_candidates(const Scenario& s, const PathCatalog& cat,
                                                const std::vector<RsRideUse>& uses);

}  // namespace mta
