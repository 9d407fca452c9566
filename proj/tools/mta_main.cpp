#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mta/parallel.hpp"
#include "mta/runner.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::vector<std::string> sets;
  std::string principle = "ue";
  std::string out_dir = "out";
  double gap = 1e-6;
  double time_limit = 600.0;
  long long nodes = 2000000;
  int threads = 1;
  int pwl_k = 8;
  double pwl_xmax = 0.0;
  bool continuous = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--scenario", a.scenario, "scenario document")->required();
  cmd->add_option("--set", a.sets, "override, e.g. params.TF.RS=0.9")->take_all();
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--gap", a.gap, "relative optimality gap");
  cmd->add_option("--time-limit", a.time_limit, "seconds");
  cmd->add_option("--nodes", a.nodes, "node limit");
  cmd->add_option("--threads", a.threads, "worker threads");
  cmd->add_option("--pwl-k", a.pwl_k, "congestion PWL segments");
  cmd->add_option("--pwl-xmax", a.pwl_xmax, "congestion PWL range override");
}

mta::RunOptions to_options(const CommonArgs& a) {
  mta::RunOptions o;
  o.scenario_path = a.scenario;
  o.overrides = a.sets;
  o.principle = a.principle == "so" ? mta::Principle::SO : mta::Principle::UE;
  o.continuous = a.continuous;
  o.out_dir = a.out_dir;
  o.solver.gap_tol = a.gap;
  o.solver.time_limit = a.time_limit;
  o.solver.node_limit = a.nodes;
  o.solver.threads = a.threads;
  o.build.pwl_segments = a.pwl_k;
  o.build.pwl_xmax = a.pwl_xmax;
  mta::parallel::set_threads(a.threads);
  return o;
}

int fail_json(const std::string& out_dir, const std::string& what) {
  nlohmann::json err{{"error", what}};
  std::cerr << err.dump() << "\n";
  try {
    mta::write_text_file(out_dir + "/error.json", err.dump(2) + "\n");
  } catch (...) {
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimodal traffic assignment"};
  app.require_subcommand(1);

  CommonArgs va;
  auto* validate = app.add_subcommand("validate", "check a scenario document");
  validate->add_option("--scenario", va.scenario)->required();

  CommonArgs pa;
  std::string pa_od, pa_mode;
  auto* paths = app.add_subcommand("paths", "print the path catalog as CSV");
  paths->add_option("--scenario", pa.scenario)->required();
  paths->add_option("--od", pa_od, "filter i,j");
  paths->add_option("--mode", pa_mode, "filter mode");

  CommonArgs sa;
  std::string sa_export, sa_dump;
  auto* solve = app.add_subcommand("solve", "build and solve one principle");
  add_common(solve, sa);
  solve->add_option("--principle", sa.principle)->check(CLI::IsMember({"ue", "so"}));
  solve->add_flag("--continuous", sa.continuous, "solve the relaxation");
  solve->add_option("--export-mps", sa_export, "write the program as MPS");
  solve->add_option("--dump-model", sa_dump, "write constraint audit CSV");

  CommonArgs ca;
  std::string ca_sweep;
  auto* compare = app.add_subcommand("compare", "solve UE and SO, report the efficiency gap");
  add_common(compare, ca);
  compare->add_option("--sweep", ca_sweep, "demand sweep, e.g. demand:1..10");

  CommonArgs ve;
  auto* verify = app.add_subcommand("verify", "equilibrium verification of the UE solve");
  add_common(verify, ve);

  CommonArgs oa;
  auto* oracle = app.add_subcommand("oracle", "exhaustive reference optimum (micro instances)");
  add_common(oracle, oa);
  oracle->add_option("--principle", oa.principle)->check(CLI::IsMember({"ue", "so"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      mta::Scenario s = mta::load_scenario_file(va.scenario);
      auto rep = mta::validate_scenario(s);
      for (const auto& v : rep.violations)
        std::cout << v.rule << ": " << v.detail << "\n";
      std::cout << (rep.ok() ? "valid" : "invalid") << " (" << rep.violations.size()
                << " violations)\n";
      return rep.ok() ? 0 : 1;
    }
    if (*paths) {
      mta::Scenario s = mta::load_scenario_file(pa.scenario);
      auto cat = mta::PathCatalog::build(s);
      std::cout << "od,mode,path_links,length,transfer_node\n";
      for (const auto& om : cat.od_modes()) {
        std::string od = std::to_string(om.o) + "-" + std::to_string(om.d);
        if (!pa_od.empty() && od != pa_od) {
          std::string alt = pa_od;
          std::replace(alt.begin(), alt.end(), ',', '-');
          if (od != alt) continue;
        }
        if (!pa_mode.empty() && om.mode.name() != pa_mode) continue;
        for (int pid : om.path_ids) {
          const auto& p = cat.path(pid);
          std::string tr = p.intermodal() ? std::to_string(p.transfer_after(s, 0)) : "";
          std::cout << od << "," << om.mode.name() << "," << p.node_seq_string(s) << ","
                    << mta::format_double(p.length) << "," << tr << "\n";
        }
      }
      return 0;
    }
    if (*solve) {
      auto o = to_options(sa);
      o.export_mps = sa_export;
      o.dump_model = sa_dump;
      auto rr = mta::run_scenario(o);
      std::cout << "status=" << to_string(rr.solution.status)
                << " objective=" << mta::format_double(rr.solution.objective)
                << " bound=" << mta::format_double(rr.solution.best_bound)
                << " nodes=" << rr.solution.nodes << "\n";
      return rr.solution.status == mta::SolveStatus::Optimal ||
                     rr.solution.status == mta::SolveStatus::Feasible
                 ? 0
                 : 1;
    }
    if (*compare) {
      auto o = to_options(ca);
      int from = 0, to = 0;
      if (!ca_sweep.empty()) {
        if (ca_sweep.rfind("demand:", 0) != 0)
          throw mta::ParseError("sweep must look like demand:1..10");
        std::string range = ca_sweep.substr(7);
        auto dots = range.find("..");
        if (dots == std::string::npos) throw mta::ParseError("sweep must look like demand:1..10");
        from = std::stoi(range.substr(0, dots));
        to = std::stoi(range.substr(dots + 2));
        if (from < 1) throw mta::ParseError("sweep multipliers start at 1; zero demand has no ratio");
      }
      auto res = mta::compare_principles(o, from, to);
      if (res.poa.defined)
        std::cout << "poa=" << mta::format_double(res.poa.poa)
                  << " C_ue=" << mta::format_double(res.poa.c_ue)
                  << " C_so=" << mta::format_double(res.poa.c_so) << "\n";
      else
        std::cout << "poa undefined (zero system cost)\n";
      return 0;
    }
    if (*verify) {
      auto rep = mta::run_verify(to_options(ve));
      std::cout << (rep.passed ? "equilibrium verified" : "equilibrium violated") << " ("
                << rep.options.size() << " options, " << rep.skipped_rematching
                << " re-matching deviations skipped)\n";
      return rep.passed ? 0 : 1;
    }
    if (*oracle) {
      auto o = to_options(oa);
      std::string doc = mta::apply_overrides(
          [&] {
            std::ifstream in(o.scenario_path);
            std::stringstream ss;
            ss << in.rdbuf();
            return ss.str();
          }(),
          o.overrides);
      mta::Scenario s = mta::load_scenario(doc);
      auto cat = mta::PathCatalog::build(s);
      auto res = mta::brute_force_solve(s, cat, o.principle);
      std::cout << "objective=" << mta::format_double(res.objective) << " optima=" << res.optima
                << " candidates=" << res.candidates << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::string dir = "out";
    if (*solve) dir = sa.out_dir;
    if (*compare) dir = ca.out_dir;
    if (*verify) dir = ve.out_dir;
    return fail_json(dir, e.what());
  }
  return 0;
}
