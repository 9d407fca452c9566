#pragma once

#include <map>
#include <string>
#include <vector>

#include "mta/program.hpp"

namespace mta {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, Limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Limit: return "Limit";
  }
  return "?";
}

struct Solution {
  SolveStatus status = SolveStatus::Limit;
  std::vector<double> values;  // one per program variable
  double objective = 0.0;      // includes the program's constant offset
  double best_bound = 0.0;
  double gap = 0.0;
  long long nodes = 0;
  double wall_seconds = 0.0;

  double value(int var) const { return var >= 0 && var < (int)values.size() ? values[var] : 0.0; }
};

struct SolverOptions {
  double gap_tol = 1e-6;
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  long long node_limit = 2000000;
  double time_limit = 600.0;
  int threads = 1;
  unsigned seed = 0;
};

// Optimal basic solution of the continuous relaxation.
Solution solve_lp_relaxation(const MathProgram& mp, const SolverOptions& opts = {});

// Best-bound branch and bound over the LP relaxation; deterministic given
// fixed options.
Solution branch_and_bound(const MathProgram& mp, const SolverOptions& opts = {});

// Residual check of a solution against every row of the program; exact in
// 64-bit integer arithmetic when the row data and solution are integral.
double max_constraint_violation(const MathProgram& mp, const std::vector<double>& values);

}  // namespace mta
