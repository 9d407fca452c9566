#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef MTA_FIXTURE_DIR
#define MTA_FIXTURE_DIR "fixtures"
#endif

inline std::string fixture_path(const std::string& name) {
  return std::string(MTA_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A 3-node chain 1 -> 2 -> 3 with road, walk and metro infrastructure; the
// building block most unit tests perturb.
inline std::string chain3_doc() {
  return R"({
    "nodes": [1, 2, 3],
    "transfers": [2],
    "links": [
      {"id": "r12", "tail": 1, "head": 2, "length": 100, "subnetwork": "RN", "t0": 4, "capacity": 50},
      {"id": "r23", "tail": 2, "head": 3, "length": 100, "subnetwork": "RN", "t0": 4, "capacity": 50},
      {"id": "r13", "tail": 1, "head": 3, "length": 250, "subnetwork": "RN", "t0": 10, "capacity": 50},
      {"id": "w12", "tail": 1, "head": 2, "length": 100, "subnetwork": "WN"},
      {"id": "w23", "tail": 2, "head": 3, "length": 100, "subnetwork": "WN"},
      {"id": "m23", "tail": 2, "head": 3, "length": 120, "subnetwork": "MN"}
    ],
    "pt_lines": [
      {"id": "L1", "mode": "bus", "links": ["r12", "r23"], "frequency": 2, "veh_capacity": 10},
      {"id": "M1", "mode": "M", "links": ["m23"], "frequency": 6, "veh_capacity": 20}
    ],
    "demand": [{"o": 1, "d": 3, "q": 4}, {"o": 2, "d": 3, "q": 2}],
    "params": {"alpha": 5, "gamma": 0.25},
    "fleet_size": 4,
    "parking_capacity": {"2": 10},
    "toggles": {
      "modes": ["car", "bus", "M", "W", "CD", "CP", "EH", "RS", "car&M"],
      "intermodality": true,
      "carpool_min_distance": 0,
      "max_paths": 4,
      "max_transfers": 1
    }
  })";
}
