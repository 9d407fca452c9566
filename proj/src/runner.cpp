#include "mta/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mta {

using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

std::string apply_overrides(const std::string& text, const std::vector<std::string>& sets,
                            long long demand_multiplier) {
  json doc = json::parse(text);
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("override '" + kv + "' is not key=value");
    std::string path = kv.substr(0, eq), raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // bare strings
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      auto dot = path.find('.', start);
      std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  if (demand_multiplier != 1) {
    for (auto& entry : doc["demand"])
      entry["q"] = entry["q"].get<long long>() * demand_multiplier;
  }
  return doc.dump(2);
}

std::string manifest_hash(const std::string& document, const RunOptions& opts) {
  Fnv64 h;
  h.feed(document);
  for (const auto& o : opts.overrides) h.feed(o);
  h.feed(to_string(opts.principle));
  h.feed(opts.continuous ? "cont" : "int");
  h.feed(format_double(opts.solver.gap_tol));
  h.feed(std::to_string(opts.build.pwl_segments));
  h.feed(format_double(opts.build.pwl_xmax));
  h.feed(std::to_string(opts.demand_multiplier));
  return h.hex();
}

namespace {

std::string timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_manifest(const RunOptions& opts, const std::string& hash) {
  json m;
  m["scenario"] = opts.scenario_path;
  m["hash"] = hash;
  m["overrides"] = opts.overrides;
  m["principle"] = to_string(opts.principle);
  m["continuous"] = opts.continuous;
  m["demand_multiplier"] = opts.demand_multiplier;
  m["solver"] = {{"gap_tol", opts.solver.gap_tol},
                 {"feas_tol", opts.solver.feas_tol},
                 {"int_tol", opts.solver.int_tol},
                 {"node_limit", opts.solver.node_limit},
                 {"time_limit", opts.solver.time_limit},
                 {"threads", opts.solver.threads}};
  m["build"] = {{"pwl_segments", opts.build.pwl_segments}, {"pwl_xmax", opts.build.pwl_xmax}};
  m["created"] = timestamp();
  write_text_file(opts.out_dir + "/manifest.json", m.dump(2) + "\n");
}

void write_solution_json(const std::string& dir, const MathProgram& mp, const Solution& sol,
                         const std::string& hash) {
  json out;
  out["manifest_hash"] = hash;
  out["status"] = to_string(sol.status);
  out["objective"] = sol.objective;
  out["best_bound"] = sol.best_bound;
  out["gap"] = sol.gap;
  out["nodes"] = sol.nodes;
  json vars = json::object();
  for (std::size_t j = 0; j < mp.vars.size(); ++j)
    if (sol.value(static_cast<int>(j)) != 0.0) vars[mp.vars[j].name] = sol.value(static_cast<int>(j));
  out["values"] = vars;
  write_text_file(dir + "/solution.json", out.dump(2) + "\n");
}

void write_link_flows(const std::string& dir, const Scenario& s, const LinkFlows& lf,
                      const std::string& hash) {
  std::ostringstream out;
  out << "# manifest=" << hash << "\n";
  out << "link,tail,head,subnetwork,mode,flow\n";
  for (std::size_t a = 0; a < s.links.size(); ++a) {
    const Link& l = s.links[a];
    out << l.id << "," << l.tail << "," << l.head << "," << to_string(l.subnet) << ",total,"
        << format_double(lf.total[a]) << "\n";
  }
  for (const auto& [key, v] : lf.modal) {
    const Link& l = s.links[key.first];
    out << l.id << "," << l.tail << "," << l.head << "," << to_string(l.subnet) << ","
        << key.second << "," << format_double(v) << "\n";
  }
  write_text_file(dir + "/link_flows.csv", out.str());
}

void write_modal_share(const std::string& dir, const Scenario& s,
                       const std::map<std::string, double>& share, Principle pr,
                       const std::string& hash, bool append) {
  std::ostringstream out;
  if (!append) {
    out << "# manifest=" << hash << "\n";
    out << "mode,principle,share\n";
  }
  for (const auto& [mode, v] : share)
    out << mode << "," << to_string(pr) << "," << format_double(v) << "\n";
  std::string path = dir + "/modal_share.csv";
  if (append) {
    std::ofstream f(path, std::ios::app);
    f << out.str();
  } else {
    write_text_file(path, out.str());
  }
}

void write_paths_used(const std::string& dir, const Scenario& s, const PathCatalog& cat,
                      const FlowDecomposition& fd, const FlowState& st, const std::string& hash) {
  std::ostringstream out;
  out << "# manifest=" << hash << "\n";
  out << "od,mode,path,flow,generalized_cost\n";
  for (const auto& om : cat.od_modes()) {
    for (int pid : om.path_ids) {
      double f = fd.path_flow.count(pid) ? fd.path_flow.at(pid) : 0.0;
      const Path& p = cat.path(pid);
      double cost = generalized_path_cost(s, p, st, Principle::UE).total;
      out << om.o << "-" << om.d << "," << om.mode.name() << "," << p.node_seq_string(s) << ","
          << format_double(f) << "," << format_double(cost) << "\n";
    }
  }
  write_text_file(dir + "/paths_used.csv", out.str());
}

void write_model_dump(const std::string& path, const MathProgram& mp) {
  std::ostringstream out;
  out << "constraint,sense,rhs,families,terms\n";
  for (const auto& r : mp.rows) {
    out << r.name << "," << static_cast<char>(r.sense) << "," << format_double(r.rhs) << ",";
    for (std::size_t i = 0; i < r.families.size(); ++i) out << (i ? ";" : "") << r.families[i];
    out << "," << r.terms.size() << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace

RunResult run_scenario(const RunOptions& opts) {
  std::string doc = apply_overrides(read_file(opts.scenario_path), opts.overrides,
                                    opts.demand_multiplier);
  std::string hash = manifest_hash(doc, opts);

  RunResult rr{load_scenario(doc), PathCatalog{}, MathProgram{}, Solution{}, hash};
  rr.catalog = PathCatalog::build(rr.scenario);
  BuildOptions build = opts.build;
  build.integer = !opts.continuous;
  rr.program = build_program(rr.scenario, rr.catalog, opts.principle, build);

  if (!opts.export_mps.empty()) export_mps(rr.program, opts.export_mps);
  if (!opts.dump_model.empty()) write_model_dump(opts.dump_model, rr.program);

  rr.solution = opts.continuous ? solve_lp_relaxation(rr.program, opts.solver)
                                : branch_and_bound(rr.program, opts.solver);

  write_manifest(opts, hash);
  write_solution_json(opts.out_dir, rr.program, rr.solution, hash);
  if (rr.solution.status == SolveStatus::Optimal || rr.solution.status == SolveStatus::Feasible) {
    FlowDecomposition fd = decode_solution(rr.program, rr.solution);
    LinkFlows lf = aggregate_link_flows(rr.scenario, rr.catalog, fd);
    write_link_flows(opts.out_dir, rr.scenario, lf, hash);
    FlowState st = flow_state(rr.scenario, rr.catalog, fd);
    write_paths_used(opts.out_dir, rr.scenario, rr.catalog, fd, st, hash);
    if (rr.scenario.total_demand() > 0)
      write_modal_share(opts.out_dir, rr.scenario, modal_share(rr.scenario, rr.catalog, fd),
                        opts.principle, hash, false);
  }
  return rr;
}

CompareResult compare_principles(const RunOptions& opts, int sweep_from, int sweep_to) {
  CompareResult res;
  std::string base_doc = read_file(opts.scenario_path);

  auto solve_one = [&](Principle pr, long long mult) {
    RunOptions o = opts;
    o.principle = pr;
    o.demand_multiplier = mult;
    std::string doc = apply_overrides(base_doc, o.overrides, mult);
    Scenario s = load_scenario(doc);
    PathCatalog cat = PathCatalog::build(s);
    BuildOptions build = o.build;
    build.integer = !o.continuous;
    MathProgram mp = build_program(s, cat, pr, build);
    Solution sol = o.continuous ? solve_lp_relaxation(mp, o.solver)
                                : branch_and_bound(mp, o.solver);
    if (sol.status != SolveStatus::Optimal)
      throw ModelError(std::string("solve under ") + to_string(pr) + " at multiplier " +
                       std::to_string(mult) + " ended " + to_string(sol.status));
    return std::tuple<Scenario, PathCatalog, MathProgram, Solution>{
        std::move(s), std::move(cat), std::move(mp), std::move(sol)};
  };

  std::string doc = apply_overrides(base_doc, opts.overrides, opts.demand_multiplier);
  std::string hash = manifest_hash(doc, opts);

  auto [s_ue, cat_ue, mp_ue, sol_ue] = solve_one(Principle::UE, opts.demand_multiplier);
  auto [s_so, cat_so, mp_so, sol_so] = solve_one(Principle::SO, opts.demand_multiplier);
  FlowDecomposition ue = decode_solution(mp_ue, sol_ue);
  FlowDecomposition so = decode_solution(mp_so, sol_so);
  res.poa = price_of_anarchy(s_ue, cat_ue, ue, so);

  write_manifest(opts, hash);
  json pj;
  pj["manifest_hash"] = hash;
  pj["poa"] = res.poa.defined ? json(res.poa.poa) : json();
  pj["bound"] = res.poa.bound;
  pj["C_ue"] = res.poa.c_ue;
  pj["C_so"] = res.poa.c_so;
  write_text_file(opts.out_dir + "/poa.json", pj.dump(2) + "\n");

  if (s_ue.total_demand() > 0) {
    write_modal_share(opts.out_dir, s_ue, modal_share(s_ue, cat_ue, ue), Principle::UE, hash,
                      false);
    write_modal_share(opts.out_dir, s_so, modal_share(s_so, cat_so, so), Principle::SO, hash,
                      true);
  }

  if (sweep_from > 0) {
    std::ostringstream out;
    out << "# manifest=" << hash << "\n";
    out << "multiplier,C_ue,C_so,poa\n";
    for (int mult = sweep_from; mult <= sweep_to; ++mult) {
      auto [su, cu, mu, du] = solve_one(Principle::UE, mult);
      auto [ss, cs, ms, ds] = solve_one(Principle::SO, mult);
      PoaResult pr = price_of_anarchy(su, cu, decode_solution(mu, du), decode_solution(ms, ds));
      res.sweep.push_back({static_cast<double>(mult), pr.c_ue, pr.c_so, pr.poa});
      out << mult << "," << format_double(pr.c_ue) << "," << format_double(pr.c_so) << ","
          << format_double(pr.poa) << "\n";
    }
    write_text_file(opts.out_dir + "/poa_sweep.csv", out.str());
  }
  return res;
}

EquilibriumReport run_verify(const RunOptions& opts) {
  RunOptions o = opts;
  o.principle = Principle::UE;
  RunResult rr = run_scenario(o);
  if (rr.solution.status != SolveStatus::Optimal)
    throw ModelError(std::string("verification needs an Optimal solve, got ") +
                     to_string(rr.solution.status));
  EquilibriumReport rep =
      verify_equilibrium(rr.scenario, rr.catalog, rr.program, rr.solution, opts.solver.gap_tol);

  std::ostringstream out;
  out << "# manifest=" << rr.hash << "\n";
  out << "od,option,cost,min_cost,deviation_best_gain,verdict\n";
  for (const auto& oc : rep.options) {
    out << oc.o << "-" << oc.d << "," << oc.mode << ":" << rr.catalog.path(oc.path).node_seq_string(rr.scenario)
        << "," << format_double(oc.cost) << "," << format_double(oc.min_cost) << ","
        << format_double(oc.best_gain) << "," << (oc.ok ? "ok" : "improvable") << "\n";
  }
  write_text_file(opts.out_dir + "/equilibrium.csv", out.str());
  return rep;
}

}  // namespace mta
