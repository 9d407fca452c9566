#pragma once

#include "mta/analysis.hpp"

namespace mta {

struct OracleResult {
  double objective = 0.0;
  long long optima = 0;        // distinct optimal full assignments
  long long candidates = 0;    // leaves visited
  FlowDecomposition best;      // lexicographically smallest optimum
};

// Exhaustive search over integer assignments satisfying the mode, matching
// and fleet constraints, scoring the exact objective (no piecewise error).
// Throws when more than `cap` assignments would have to be visited.
OracleResult brute_force_solve(const Scenario& s, const PathCatalog& cat, Principle principle,
                               long long cap = 10000000);

}  // namespace mta
