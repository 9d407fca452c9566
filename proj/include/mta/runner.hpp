#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mta/analysis.hpp"
#include "mta/mps.hpp"
#include "mta/oracle.hpp"

namespace mta {

struct RunOptions {
  std::string scenario_path;
  std::vector<std::string> overrides;  // dotted.path=value edits of the document
  Principle principle = Principle::UE;
  bool continuous = false;
  std::string out_dir = "out";
  SolverOptions solver;
  BuildOptions build;
  std::string export_mps;   // write the program here when nonempty
  std::string dump_model;   // constraint/family audit CSV when nonempty
  long long demand_multiplier = 1;
};

// Applies dotted-path overrides to the raw scenario document.
std::string apply_overrides(const std::string& text, const std::vector<std::string>& sets,
                            long long demand_multiplier = 1);

std::string manifest_hash(const std::string& document, const RunOptions& opts);

struct RunResult {
  Scenario scenario;
  PathCatalog catalog;
  MathProgram program;
  Solution solution;
  std::string hash;
};

// Ingest -> paths -> model -> solve; writes solution.json, link_flows.csv,
// modal_share.csv, paths_used.csv and manifest.json under out_dir.
RunResult run_scenario(const RunOptions& opts);

// Solves both principles and writes poa.json plus modal_share.csv; with a
// demand sweep writes poa_sweep.csv (multiplier, C_ue, C_so, poa).
struct CompareResult {
  PoaResult poa;
  std::vector<std::array<double, 4>> sweep;  // multiplier, c_ue, c_so, poa
};
CompareResult compare_principles(const RunOptions& opts, int sweep_from, int sweep_to);

// UE solve plus equilibrium verification; writes equilibrium.csv.
EquilibriumReport run_verify(const RunOptions& opts);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mta
