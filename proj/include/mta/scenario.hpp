#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mta/common.hpp"

namespace mta {

struct Link {
  std::string id;
  NodeId tail = 0;
  NodeId head = 0;
  double length = 0.0;
  Subnet subnet = Subnet::RN;
  double t0 = 0.0;        // free-flow travel time, road links only
  double capacity = 0.0;  // vehicles, road links only
};

struct PtLine {
  std::string id;
  BaseMode mode = BaseMode::bus;  // bus or metro
  std::vector<int> links;         // link indices, consecutive tail-to-head
  double frequency = 0.0;         // vehicles per time unit
  double veh_capacity = 0.0;      // passengers per vehicle
};

struct ModeParams {
  std::map<BaseMode, double> meeting_rate;   // R_m, SMS only
  std::map<BaseMode, double> service_time;   // S_m
  std::map<BaseMode, double> parking_time;   // P_m
  std::map<BaseMode, double> trip_fare;      // TF_m, applied per link
  std::map<BaseMode, double> parking_fare;   // PF_m
  std::map<BaseMode, double> capacity;       // CAP_m, seats per vehicle
  std::map<Subnet, double> speed;            // Sp_n for MN/WN/BN
  double alpha = 5.0;                        // value of time
  double gamma = 0.25;                       // distance cost
  double eta = 0.15;                         // BPR multiplier
  double beta = 4.0;                         // BPR exponent
  double bus_pce = 3.0;                      // car equivalents of one bus unit

  double get(const std::map<BaseMode, double>& m, BaseMode k, double dflt = 0.0) const {
    auto it = m.find(k);
    return it == m.end() ? dflt : it->second;
  }
  double R(BaseMode m) const { return get(meeting_rate, m); }
  double S(BaseMode m) const { return get(service_time, m); }
  double P(BaseMode m) const { return get(parking_time, m); }
  double TF(BaseMode m) const { return get(trip_fare, m); }
  double PF(BaseMode m) const { return get(parking_fare, m); }
  double CAP(BaseMode m) const { return get(capacity, m, 1.0); }
  double Sp(Subnet n) const {
    auto it = speed.find(n);
    return it == speed.end() ? 1.0 : it->second;
  }
};

struct ScenarioToggles {
  std::vector<Mode> modes;
  bool intermodality = false;
  double carpool_min_distance = 0.0;  // CP/CD legs shorter than this are dropped
  int max_paths = 5;
  int max_transfers = 1;

  bool enabled(const Mode& m) const;
  bool enabled(BaseMode m) const;  // as a simple door-to-door mode
};

struct Scenario {
  std::vector<NodeId> nodes;
  std::set<NodeId> origins;
  std::set<NodeId> destinations;
  std::set<NodeId> transfers;
  std::vector<Link> links;
  std::vector<PtLine> pt_lines;
  std::map<std::pair<NodeId, NodeId>, long long> demand;
  ModeParams params;
  long long fleet_size = 0;
  std::map<NodeId, double> parking_capacity;
  ScenarioToggles toggles;

  long long total_demand() const;
  bool has_node(NodeId n) const;
  int link_index(const std::string& id) const;  // -1 when missing
  std::vector<int> out_links(NodeId n, Subnet sn) const;
  // Scheduled PT units crossing a link, in car equivalents on road links.
  double pt_units_on_link(int link) const;
  bool fleet_active() const {
    return toggles.enabled(BaseMode::RS) || toggles.enabled(BaseMode::EH);
  }
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& s);
ValidationReport validate_scenario(const Scenario& s);

}  // namespace mta
