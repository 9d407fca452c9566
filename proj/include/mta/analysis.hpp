#pragma once

#include <map>
#include <string>

#include "mta/solver.hpp"

namespace mta {

// Solution values keyed by their modeling role.
struct FlowDecomposition {
  std::map<int, double> path_flow;                      // demanded path id -> travelers
  std::map<int, double> cd_stop;                        // stop-candidate index -> drivers
  std::map<int, double> rs_pair;                        // pair-candidate index -> vehicles
  std::map<int, double> rs_veh;                         // carrier path id -> vehicles
  std::map<int, double> eh_veh;                         // ride path id -> vehicles
  std::map<int, double> empty_flow;                     // repositioning path id -> vehicles
  std::map<std::pair<NodeId, NodeId>, double> q_o;      // occupied vehicles per OD
  std::map<std::pair<NodeId, NodeId>, double> q_e;      // empty vehicles per OD
};

FlowDecomposition decode_solution(const MathProgram& mp, const Solution& sol);

struct LinkFlows {
  std::vector<double> total;                            // x_a incl. PT units
  std::map<std::pair<int, std::string>, double> modal;  // (link, mode) -> x_{a,m}
};

LinkFlows aggregate_link_flows(const Scenario& s, const PathCatalog& cat,
                               const FlowDecomposition& fd);

FlowState flow_state(const Scenario& s, const PathCatalog& cat, const FlowDecomposition& fd);

// Exact objective of a flow pattern (no piecewise approximation). The UE form
// integrates the congestion curve, the SO form prices it at volume.
double exact_objective(const Scenario& s, const PathCatalog& cat, const FlowDecomposition& fd,
                       Principle principle);

// Total system cost per the SO objective; the quantity the price of anarchy
// compares.
double total_system_cost(const Scenario& s, const PathCatalog& cat, const FlowDecomposition& fd);

struct PoaResult {
  bool defined = false;
  double poa = 0.0;
  double c_ue = 0.0;
  double c_so = 0.0;
  double bound = 0.0;
};

PoaResult price_of_anarchy(const Scenario& s, const PathCatalog& cat, const FlowDecomposition& ue,
                           const FlowDecomposition& so);

double poa_curve_bound(double beta);  // congestion-curve factor of the upper bound
double poa_upper_bound(double beta, int link_count, int mode_count, long long total_demand);

// Fraction of travelers per mode name; intermodal composites are their own
// categories.
std::map<std::string, double> modal_share(const Scenario& s, const PathCatalog& cat,
                                          const FlowDecomposition& fd);

struct OptionCheck {
  NodeId o = 0, d = 0;
  std::string mode;
  int path = -1;
  double flow = 0.0;
  double cost = 0.0;      // generalized cost at the solution, incl. SMS delay
  double min_cost = 0.0;  // cheapest capacity-feasible option of the OD
  double best_gain = 0.0; // best feasible unilateral one-unit improvement
  std::string best_target;
  // Post-move cost of every feasible one-unit deviation, keyed mode:path.
  std::vector<std::pair<std::string, double>> deviations;
  bool used = false;
  bool ok = true;
};

struct EquilibriumReport {
  std::vector<OptionCheck> options;
  bool passed = true;
  int skipped_rematching = 0;  // deviations needing partner re-matching (informational)
};

// Checks Wardrop cost-minimality over capacity-feasible options and the
// one-unit deviation test with scheduled-unit augmentation on full PT paths.
EquilibriumReport verify_equilibrium(const Scenario& s, const PathCatalog& cat,
                                     const MathProgram& mp, const Solution& sol, double tol);

}  // namespace mta
