#pragma once

#include <map>

#include "mta/paths.hpp"
#include "mta/scenario.hpp"

namespace mta {

enum class Principle { UE, SO };

inline const char* to_string(Principle p) { return p == Principle::UE ? "ue" : "so"; }

// Travel time on a link at a given total flow: BPR on road links, constant
// length/speed elsewhere.
double link_travel_time(const Scenario& s, const Link& l, double total_flow);

// Antiderivative of the BPR curve from 0 to x (road links), or t * x for the
// flow-independent networks. Both in alpha-weighted cost units per link.
double beckmann_link_integral(const Scenario& s, const Link& l, double x);

// Waiting time attached to a leg-origin link. q_m is the system-wide demand
// of the mode, pt_line the serving line for bus/metro legs.
double waiting_time(const Scenario& s, BaseMode m, bool leg_origin, double q_m, int pt_line);

double service_time(const Scenario& s, BaseMode m, bool leg_origin, bool leg_dest);

double monetary_cost(const Scenario& s, BaseMode m, const Link& l, bool leg_origin, bool leg_dest);

struct LinkCostBreakdown {
  double travel_time = 0.0;
  double waiting = 0.0;
  double service = 0.0;
  double money = 0.0;
};

// Network state a path cost is evaluated against.
struct FlowState {
  std::vector<double> link_flow;               // x_a, total vehicle units
  std::map<BaseMode, double> mode_demand;      // q_m, passengers incl. legs

  static FlowState zero(const Scenario& s);
  double q(BaseMode m) const {
    auto it = mode_demand.find(m);
    return it == mode_demand.end() ? 0.0 : it->second;
  }
};

struct GeneralizedPathCost {
  double total = 0.0;
  double time = 0.0;    // travel + waiting + service, time units
  double money = 0.0;
  double delay = 0.0;   // SMS-induced delay term, cost units (UE only)
};

// Sums alpha-weighted time and money over the path's links with leg-position
// terms applied per leg. Under UE the shared-mobility delay term
// alpha * q_m / R_m is added once per SMS leg.
GeneralizedPathCost generalized_path_cost(const Scenario& s, const Path& p, const FlowState& st,
                                          Principle principle);

// Generalized cost on an empty network; used to rank enumerated paths.
double freeflow_path_cost(const Scenario& s, const Path& p);

}  // namespace mta
