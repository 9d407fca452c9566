#pragma once

#include <string>
#include <vector>

#include "mta/costs.hpp"

namespace mta {

enum class VarKind {
  PathFlow,      // f: travelers on a path
  CdStopFlow,    // carpool drivers with a given stop pair
  RsPairFlow,    // ridesharing vehicles serving one passenger-group pair
  RsVehFlow,     // ridesharing vehicles per carrier path
  EhVehFlow,     // occupied e-hailing vehicles per ride path
  EmptyFlow,     // empty fleet vehicles per repositioning path
  OccCount,      // occupied vehicles per OD
  OccStopCount,  // occupied vehicles per OD and first interior stop
  EmptyCount,    // empty vehicles per OD
  ModalFlow,     // x_{a,m}
  TotalFlow,     // x_a on road links
  PwlEpigraph,   // congestion-integral epigraph variable per road link
  ModeDemand,    // q_m
  ExpansionBit,  // binary digit of a linearized product factor
  BitProduct,    // digit times the other factor
  Product,       // linearized bilinear product value
};

struct VarInfo {
  VarKind kind = VarKind::PathFlow;
  int idx1 = -1;  // path id / candidate index / link index / bit position
  int idx2 = -1;
  NodeId o = 0, d = 0;
  std::string mode;
};

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool integer = false;
  double obj = 0.0;
  int bound_family = 0;  // formulation family id of the sign/integrality bound
  VarInfo info;
};

enum class Sense : char { LE = 'L', GE = 'G', EQ = 'E' };

struct Constraint {
  std::string name;
  Sense sense = Sense::EQ;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> terms;  // variable index, coefficient
  std::vector<int> families;
  int defines_var = -1;  // equality defining this variable, eliminable
};

struct BilinearDecl {
  int x = -1, y = -1;
  double coef = 0.0;
};

struct MathProgram {
  Principle principle = Principle::UE;
  bool integer_mode = true;
  std::vector<Variable> vars;
  std::vector<Constraint> rows;
  double obj_offset = 0.0;
  std::vector<BilinearDecl> bilinear;  // declared, continuous builds only
  double pwl_gap_bound = 0.0;          // objective error bound of the congestion PWL

  int add_var(const std::string& name, double lb, double ub, bool integer, double obj,
              int bound_family, VarInfo info);
  int add_row(const std::string& name, Sense sense, double rhs,
              std::vector<std::pair<int, double>> terms, std::vector<int> families,
              int defines_var = -1);
  bool has_family(int f) const;
  std::vector<int> family_ids() const;
};

// Chord cuts for g(x) = x^(beta+1) on [0, xmax] with K uniform segments.
// Minimizing an epigraph variable above all cuts reproduces g exactly at the
// breakpoints and overestimates by at most the largest chord gap in between.
struct PwlCut {
  double slope = 0.0;
  double intercept = 0.0;
};

std::vector<PwlCut> power_chords(double beta, double xmax, int K);
double pwl_value(const std::vector<PwlCut>& cuts, double x);
double pwl_max_gap(double beta, double xmax, int K);

// Adds the epigraph representation of the congestion term of one road link:
// a variable y_a with K cuts, plus the linear flow term, to the objective.
// Returns the index of y_a. total_flow_var must already exist.
int linearize_bpr_integral(MathProgram& mp, const Scenario& s, int link, int total_flow_var,
                           int K, double xmax, Principle principle);

// Exact linearization of z = q * x for integer q in [0, q_ub]: binary digits
// of q, bounded products per digit, and their weighted sum. Returns the index
// of z. In continuous mode no variables are added and the product is only
// declared.
int linearize_bilinear_product(MathProgram& mp, int q_var, int x_var, long long q_ub,
                               double x_ub, double obj_coef, const std::string& tag);

struct BuildOptions {
  bool integer = true;
  int pwl_segments = 8;
  double pwl_xmax = 0.0;  // 0 = per-link default
};

MathProgram build_program(const Scenario& s, const PathCatalog& cat, Principle principle,
                          const BuildOptions& opts);

// Canonical FNV hash over the constraint matrix, bounds and objective.
std::string program_hash(const MathProgram& mp);

}  // namespace mta
