#include "mta/mps.hpp"

#include <fstream>
#include <sstream>

namespace mta {

std::string to_mps(const MathProgram& mp) {
  std::ostringstream out;
  out << "NAME mta_" << to_string(mp.principle) << "\n";
  out << "ROWS\n N COST\n";
  for (const auto& r : mp.rows) out << " " << static_cast<char>(r.sense) << " " << r.name << "\n";

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  // Row membership per variable.
  std::vector<std::vector<std::pair<int, double>>> col_terms(mp.vars.size());
  for (std::size_t r = 0; r < mp.rows.size(); ++r)
    for (auto& [v, c] : mp.rows[r].terms) col_terms[v].push_back({static_cast<int>(r), c});

  for (std::size_t j = 0; j < mp.vars.size(); ++j) {
    const auto& v = mp.vars[j];
    if (v.integer != in_int) {
      out << "    MARKER" << marker++ << " 'MARKER' " << (v.integer ? "'INTORG'" : "'INTEND'")
          << "\n";
      in_int = v.integer;
    }
    out << "    " << v.name << " COST " << format_double(v.obj) << "\n";
    for (auto& [r, c] : col_terms[j])
      out << "    " << v.name << " " << mp.rows[r].name << " " << format_double(c) << "\n";
  }
  if (in_int) out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  if (mp.obj_offset != 0.0) out << "    RHS COST " << format_double(-mp.obj_offset) << "\n";
  for (const auto& r : mp.rows)
    if (r.rhs != 0.0) out << "    RHS " << r.name << " " << format_double(r.rhs) << "\n";

  out << "BOUNDS\n";
  for (const auto& v : mp.vars) {
    if (v.lb == v.ub) {
      out << " FX BND " << v.name << " " << format_double(v.lb) << "\n";
    } else {
      out << " LO BND " << v.name << " " << format_double(v.lb) << "\n";
      out << " UP BND " << v.name << " " << format_double(v.ub) << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

void export_mps(const MathProgram& mp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write MPS file '" + path + "'");
  out << to_mps(mp);
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

MathProgram parse_mps(const std::string& text) {
  MathProgram mp;
  mp.integer_mode = true;
  std::istringstream in(text);
  std::string line, section;
  std::map<std::string, int> row_index;
  std::map<std::string, Sense> row_sense;
  std::vector<std::string> row_order;
  std::map<std::string, int> var_index;
  std::map<std::string, std::vector<std::pair<int, double>>> row_terms;
  std::map<std::string, double> row_rhs;
  bool in_int = false;

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ' && line[0] != '\t') {
      auto tk = tokens(line);
      section = tk[0];
      if (section == "NAME" && tk.size() > 1 && tk[1].size() > 4)
        mp.principle = tk[1].substr(tk[1].size() - 2) == "so" ? Principle::SO : Principle::UE;
      continue;
    }
    auto tk = tokens(line);
    if (tk.empty()) continue;

    if (section == "ROWS") {
      if (tk.size() != 2) throw ParseError("bad ROWS line: " + line);
      if (tk[0] == "N") continue;  // objective row
      Sense s;
      if (tk[0] == "L") s = Sense::LE;
      else if (tk[0] == "G") s = Sense::GE;
      else if (tk[0] == "E") s = Sense::EQ;
      else throw ParseError("bad row sense: " + tk[0]);
      row_index[tk[1]] = static_cast<int>(row_order.size());
      row_sense[tk[1]] = s;
      row_order.push_back(tk[1]);
    } else if (section == "COLUMNS") {
      if (tk.size() >= 3 && tk[1] == "'MARKER'") {
        in_int = tk[2] == "'INTORG'";
        continue;
      }
      if (tk.size() < 3 || tk.size() % 2 == 0) throw ParseError("bad COLUMNS line: " + line);
      if (!var_index.count(tk[0])) {
        var_index[tk[0]] = mp.add_var(tk[0], 0.0, 0.0, in_int, 0.0, 0, {});
      }
      int v = var_index[tk[0]];
      for (std::size_t i = 1; i + 1 < tk.size(); i += 2) {
        double c = std::stod(tk[i + 1]);
        if (tk[i] == "COST")
          mp.vars[v].obj += c;
        else if (row_index.count(tk[i]))
          row_terms[tk[i]].push_back({v, c});
        else
          throw ParseError("unknown row '" + tk[i] + "'");
      }
    } else if (section == "RHS") {
      for (std::size_t i = 1; i + 1 < tk.size(); i += 2) {
        if (tk[i] == "COST")
          mp.obj_offset = -std::stod(tk[i + 1]);
        else
          row_rhs[tk[i]] = std::stod(tk[i + 1]);
      }
    } else if (section == "BOUNDS") {
      if (tk.size() < 3) throw ParseError("bad BOUNDS line: " + line);
      auto it = var_index.find(tk[2]);
      if (it == var_index.end()) throw ParseError("bound on unknown column '" + tk[2] + "'");
      auto& v = mp.vars[it->second];
      double val = tk.size() > 3 ? std::stod(tk[3]) : 0.0;
      if (tk[0] == "LO") v.lb = val;
      else if (tk[0] == "UP") v.ub = val;
      else if (tk[0] == "FX") v.lb = v.ub = val;
      else if (tk[0] == "BV") { v.lb = 0; v.ub = 1; v.integer = true; }
      else throw ParseError("unsupported bound type '" + tk[0] + "'");
    } else if (section == "RANGES") {
      throw ParseError("RANGES section not supported");
    }
  }
  for (const auto& name : row_order) {
    double rhs = row_rhs.count(name) ? row_rhs[name] : 0.0;
    mp.add_row(name, row_sense[name], rhs, row_terms[name], {});
  }
  return mp;
}

MathProgram parse_mps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open MPS file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mps(ss.str());
}

}  // namespace mta
