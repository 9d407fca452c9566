#include "mta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mta {

using nlohmann::json;

std::string to_string(Subnet n) {
  switch (n) {
    case Subnet::RN: return "RN";
    case Subnet::MN: return "MN";
    case Subnet::WN: return "WN";
    case Subnet::BN: return "BN";
  }
  return "?";
}

Subnet subnet_from_string(const std::string& s) {
  if (s == "RN") return Subnet::RN;
  if (s == "MN") return Subnet::MN;
  if (s == "WN") return Subnet::WN;
  if (s == "BN") return Subnet::BN;
  throw ParseError("unknown subnetwork tag '" + s + "'");
}

std::string to_string(BaseMode m) {
  switch (m) {
    case BaseMode::car: return "car";
    case BaseMode::bus: return "bus";
    case BaseMode::metro: return "M";
    case BaseMode::walk: return "W";
    case BaseMode::bike: return "B";
    case BaseMode::CD: return "CD";
    case BaseMode::CP: return "CP";
    case BaseMode::EH: return "EH";
    case BaseMode::RS: return "RS";
  }
  return "?";
}

BaseMode base_mode_from_string(const std::string& s) {
  if (s == "car") return BaseMode::car;
  if (s == "bus" || s == "Bus") return BaseMode::bus;
  if (s == "M" || s == "metro") return BaseMode::metro;
  if (s == "W" || s == "walk") return BaseMode::walk;
  if (s == "B" || s == "bike") return BaseMode::bike;
  if (s == "CD") return BaseMode::CD;
  if (s == "CP") return BaseMode::CP;
  if (s == "EH") return BaseMode::EH;
  if (s == "RS") return BaseMode::RS;
  throw ParseError("unknown mode '" + s + "'");
}

Subnet subnet_of(BaseMode m) {
  switch (m) {
    case BaseMode::metro: return Subnet::MN;
    case BaseMode::walk: return Subnet::WN;
    case BaseMode::bike: return Subnet::BN;
    default: return Subnet::RN;
  }
}

std::string Mode::name() const {
  std::string out;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (i) out += "&";
    out += to_string(legs[i]);
  }
  return out;
}

Mode mode_from_string(const std::string& s) {
  Mode m;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find('&', start);
    std::string part = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    m.legs.push_back(base_mode_from_string(part));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (m.legs.empty()) throw ParseError("empty mode name");
  return m;
}

std::string Fnv64::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // merge the two signed zeros
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = std::strtod(buf, nullptr);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[32];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == back) return probe;
  }
  return buf;
}

bool ScenarioToggles::enabled(const Mode& m) const {
  return std::find(modes.begin(), modes.end(), m) != modes.end();
}

bool ScenarioToggles::enabled(BaseMode m) const { return enabled(Mode{{m}}); }

long long Scenario::total_demand() const {
  long long q = 0;
  for (auto& [od, d] : demand) q += d;
  return q;
}

bool Scenario::has_node(NodeId n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

int Scenario::link_index(const std::string& id) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<int> Scenario::out_links(NodeId n, Subnet sn) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].tail == n && links[i].subnet == sn) out.push_back(static_cast<int>(i));
  return out;
}

double Scenario::pt_units_on_link(int link) const {
  double units = 0.0;
  for (const auto& line : pt_lines) {
    for (int a : line.links) {
      if (a != link) continue;
      units += line.frequency * (line.mode == BaseMode::bus ? params.bus_pce : 1.0);
    }
  }
  return units;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

double require_positive(double v, const std::string& where) {
  if (!(v > 0)) fail(where, "must be strictly positive");
  return v;
}

double require_nonneg(double v, const std::string& where) {
  if (v < 0) fail(where, "negative parameter");
  return v;
}

std::map<BaseMode, double> parse_mode_map(const json& j, const std::string& where) {
  std::map<BaseMode, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    BaseMode m = base_mode_from_string(it.key());
    out[m] = require_nonneg(it.value().get<double>(), where + "." + it.key());
  }
  return out;
}

void apply_param_defaults(ModeParams& p) {
  auto put = [](std::map<BaseMode, double>& m, BaseMode k, double v) {
    if (!m.count(k)) m[k] = v;
  };
  put(p.meeting_rate, BaseMode::CP, 100.0);
  put(p.meeting_rate, BaseMode::RS, 200.0);
  put(p.meeting_rate, BaseMode::EH, 200.0);
  put(p.service_time, BaseMode::bus, 0.04);
  put(p.service_time, BaseMode::metro, 0.02);
  put(p.service_time, BaseMode::CP, 0.04);
  put(p.service_time, BaseMode::RS, 0.05);
  put(p.service_time, BaseMode::EH, 0.03);
  // A carpooling driver performs the same pickup/drop-off actions as the
  // passenger side, and parks a private car like a solo driver does.
  put(p.service_time, BaseMode::CD, p.get(p.service_time, BaseMode::CP));
  put(p.parking_time, BaseMode::car, 0.17);
  put(p.parking_time, BaseMode::bike, 0.08);
  put(p.parking_time, BaseMode::CD, p.get(p.parking_time, BaseMode::car));
  put(p.trip_fare, BaseMode::bus, 0.3);
  put(p.trip_fare, BaseMode::metro, 0.3);
  put(p.trip_fare, BaseMode::CP, 0.7);
  put(p.trip_fare, BaseMode::CD, 0.7);
  put(p.trip_fare, BaseMode::RS, 0.9);
  put(p.trip_fare, BaseMode::EH, 1.1);
  put(p.parking_fare, BaseMode::car, 1.0);
  put(p.parking_fare, BaseMode::CD, p.get(p.parking_fare, BaseMode::car));
  put(p.capacity, BaseMode::CP, 1.0);
  put(p.capacity, BaseMode::RS, 2.0);
  if (!p.speed.count(Subnet::MN)) p.speed[Subnet::MN] = 60.0;
  if (!p.speed.count(Subnet::BN)) p.speed[Subnet::BN] = 10.0;
  if (!p.speed.count(Subnet::WN)) p.speed[Subnet::WN] = 3.0;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario document: ") + e.what());
  }

  Scenario s;
  if (!doc.contains("nodes")) fail("nodes", "missing section");
  for (const auto& n : doc["nodes"]) s.nodes.push_back(n.get<NodeId>());

  auto node_set = [&](const char* key, std::set<NodeId>& out) {
    if (!doc.contains(key)) return false;
    for (const auto& n : doc[key]) {
      NodeId id = n.get<NodeId>();
      if (!s.has_node(id)) fail(key, "unknown node " + std::to_string(id));
      out.insert(id);
    }
    return true;
  };
  bool has_o = node_set("origins", s.origins);
  bool has_d = node_set("destinations", s.destinations);
  node_set("transfers", s.transfers);

  for (const auto& jl : doc.value("links", json::array())) {
    Link l;
    l.tail = jl.at("tail").get<NodeId>();
    l.head = jl.at("head").get<NodeId>();
    l.subnet = subnet_from_string(jl.value("subnetwork", "RN"));
    l.id = jl.value("id", to_string(l.subnet) + ":" + std::to_string(l.tail) + ">" + std::to_string(l.head));
    if (!s.has_node(l.tail) || !s.has_node(l.head))
      fail("links." + l.id, "unknown node reference");
    l.length = require_positive(jl.at("length").get<double>(), "links." + l.id + ".length");
    if (l.subnet == Subnet::RN) {
      l.t0 = require_nonneg(jl.at("t0").get<double>(), "links." + l.id + ".t0");
      l.capacity = require_positive(jl.at("capacity").get<double>(), "links." + l.id + ".capacity");
    }
    s.links.push_back(l);
  }

  if (doc.contains("params")) {
    const auto& jp = doc["params"];
    ModeParams& p = s.params;
    if (jp.contains("R")) p.meeting_rate = parse_mode_map(jp["R"], "params.R");
    if (jp.contains("S")) p.service_time = parse_mode_map(jp["S"], "params.S");
    if (jp.contains("P")) p.parking_time = parse_mode_map(jp["P"], "params.P");
    if (jp.contains("TF")) p.trip_fare = parse_mode_map(jp["TF"], "params.TF");
    if (jp.contains("PF")) p.parking_fare = parse_mode_map(jp["PF"], "params.PF");
    if (jp.contains("CAP")) p.capacity = parse_mode_map(jp["CAP"], "params.CAP");
    if (jp.contains("Sp"))
      for (auto it = jp["Sp"].begin(); it != jp["Sp"].end(); ++it)
        p.speed[subnet_of(base_mode_from_string(it.key()))] =
            require_positive(it.value().get<double>(), "params.Sp." + it.key());
    p.alpha = require_nonneg(jp.value("alpha", p.alpha), "params.alpha");
    p.gamma = require_nonneg(jp.value("gamma", p.gamma), "params.gamma");
    p.eta = require_nonneg(jp.value("eta", p.eta), "params.eta");
    p.beta = jp.value("beta", p.beta);
    if (p.beta < 1.0) fail("params.beta", "must be >= 1");
    p.bus_pce = require_positive(jp.value("bus_pce", p.bus_pce), "params.bus_pce");
  }
  apply_param_defaults(s.params);

  for (const auto& jl : doc.value("pt_lines", json::array())) {
    PtLine line;
    line.mode = base_mode_from_string(jl.at("mode").get<std::string>());
    if (!is_pt(line.mode)) fail("pt_lines", "mode must be bus or M");
    line.id = jl.value("id", to_string(line.mode) + std::to_string(s.pt_lines.size()));
    for (const auto& lid : jl.at("links")) {
      int idx = s.link_index(lid.get<std::string>());
      if (idx < 0) fail("pt_lines." + line.id, "unknown link '" + lid.get<std::string>() + "'");
      Subnet want = line.mode == BaseMode::bus ? Subnet::RN : Subnet::MN;
      if (s.links[idx].subnet != want)
        fail("pt_lines." + line.id, "link '" + s.links[idx].id + "' not on " + to_string(want));
      if (!line.links.empty() && s.links[line.links.back()].head != s.links[idx].tail)
        fail("pt_lines." + line.id, "links are not consecutive");
      line.links.push_back(idx);
    }
    line.frequency = require_positive(jl.at("frequency").get<double>(), "pt_lines." + line.id + ".frequency");
    line.veh_capacity = require_positive(jl.at("veh_capacity").get<double>(), "pt_lines." + line.id + ".veh_capacity");
    s.pt_lines.push_back(line);
  }

  for (const auto& jd : doc.value("demand", json::array())) {
    NodeId o = jd.at("o").get<NodeId>();
    NodeId d = jd.at("d").get<NodeId>();
    long long q = jd.at("q").get<long long>();
    if (!s.has_node(o) || !s.has_node(d)) fail("demand", "unknown node reference");
    if (q < 0) fail("demand", "negative parameter");
    s.demand[{o, d}] += q;
    if (!has_o) s.origins.insert(o);
    if (!has_d) s.destinations.insert(d);
  }

  s.fleet_size = doc.value("fleet_size", 0LL);
  if (s.fleet_size < 0) fail("fleet_size", "negative parameter");

  if (doc.contains("parking_capacity")) {
    for (auto it = doc["parking_capacity"].begin(); it != doc["parking_capacity"].end(); ++it) {
      NodeId n = std::stoi(it.key());
      if (!s.has_node(n)) fail("parking_capacity", "unknown node " + it.key());
      s.parking_capacity[n] = require_nonneg(it.value().get<double>(), "parking_capacity." + it.key());
    }
  } else {
    for (NodeId n : s.transfers) s.parking_capacity[n] = 100.0;
  }

  if (!doc.contains("toggles")) fail("toggles", "missing section");
  const auto& jt = doc["toggles"];
  for (const auto& m : jt.at("modes")) s.toggles.modes.push_back(mode_from_string(m.get<std::string>()));
  s.toggles.intermodality = jt.value("intermodality", false);
  s.toggles.carpool_min_distance = require_nonneg(jt.value("carpool_min_distance", 0.0), "toggles.carpool_min_distance");
  s.toggles.max_paths = jt.value("max_paths", 5);
  s.toggles.max_transfers = jt.value("max_transfers", 1);
  if (s.toggles.max_paths < 1) fail("toggles.max_paths", "must be >= 1");

  if (s.toggles.enabled(BaseMode::CP) != s.toggles.enabled(BaseMode::CD))
    fail("toggles.modes", "CP and CD must be enabled together");
  for (const auto& m : s.toggles.modes) {
    if (m.simple()) continue;
    if (static_cast<int>(m.legs.size()) - 1 > s.toggles.max_transfers)
      fail("toggles.modes", "mode " + m.name() + " exceeds max_transfers");
    if (!s.toggles.intermodality) fail("toggles.modes", "intermodal mode " + m.name() + " requires intermodality");
    for (BaseMode leg : m.legs)
      if (!s.toggles.enabled(leg))
        fail("toggles.modes", "mode " + m.name() + " requires base mode " + to_string(leg));
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["nodes"] = s.nodes;
  doc["origins"] = std::vector<NodeId>(s.origins.begin(), s.origins.end());
  doc["destinations"] = std::vector<NodeId>(s.destinations.begin(), s.destinations.end());
  doc["transfers"] = std::vector<NodeId>(s.transfers.begin(), s.transfers.end());
  doc["links"] = json::array();
  for (const auto& l : s.links) {
    json jl{{"id", l.id}, {"tail", l.tail}, {"head", l.head}, {"length", l.length},
            {"subnetwork", to_string(l.subnet)}};
    if (l.subnet == Subnet::RN) {
      jl["t0"] = l.t0;
      jl["capacity"] = l.capacity;
    }
    doc["links"].push_back(jl);
  }
  doc["pt_lines"] = json::array();
  for (const auto& line : s.pt_lines) {
    json jl{{"id", line.id}, {"mode", to_string(line.mode)}, {"frequency", line.frequency},
            {"veh_capacity", line.veh_capacity}};
    jl["links"] = json::array();
    for (int a : line.links) jl["links"].push_back(s.links[a].id);
    doc["pt_lines"].push_back(jl);
  }
  doc["demand"] = json::array();
  for (const auto& [od, q] : s.demand)
    doc["demand"].push_back({{"o", od.first}, {"d", od.second}, {"q", q}});
  json jp;
  auto dump_map = [](const std::map<BaseMode, double>& m) {
    json j = json::object();
    for (auto& [k, v] : m) j[to_string(k)] = v;
    return j;
  };
  jp["R"] = dump_map(s.params.meeting_rate);
  jp["S"] = dump_map(s.params.service_time);
  jp["P"] = dump_map(s.params.parking_time);
  jp["TF"] = dump_map(s.params.trip_fare);
  jp["PF"] = dump_map(s.params.parking_fare);
  jp["CAP"] = dump_map(s.params.capacity);
  jp["Sp"] = {{"M", s.params.Sp(Subnet::MN)}, {"B", s.params.Sp(Subnet::BN)}, {"W", s.params.Sp(Subnet::WN)}};
  jp["alpha"] = s.params.alpha;
  jp["gamma"] = s.params.gamma;
  jp["eta"] = s.params.eta;
  jp["beta"] = s.params.beta;
  jp["bus_pce"] = s.params.bus_pce;
  doc["params"] = jp;
  doc["fleet_size"] = s.fleet_size;
  doc["parking_capacity"] = json::object();
  for (auto& [n, cap] : s.parking_capacity) doc["parking_capacity"][std::to_string(n)] = cap;
  json jt;
  jt["modes"] = json::array();
  for (const auto& m : s.toggles.modes) jt["modes"].push_back(m.name());
  jt["intermodality"] = s.toggles.intermodality;
  jt["carpool_min_distance"] = s.toggles.carpool_min_distance;
  jt["max_paths"] = s.toggles.max_paths;
  jt["max_transfers"] = s.toggles.max_transfers;
  doc["toggles"] = jt;
  return doc.dump(2) + "\n";
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport rep;
  auto add = [&](const std::string& rule, const std::string& detail) {
    rep.violations.push_back({rule, detail});
  };

  for (NodeId t : s.transfers) {
    bool mn = false, rn = false;
    for (const auto& l : s.links) {
      if (l.tail != t && l.head != t) continue;
      mn |= l.subnet == Subnet::MN;
      rn |= l.subnet == Subnet::RN;
    }
    if (!mn) add("transfer_no_metro", "transfer node " + std::to_string(t) + " unreachable by metro");
    if (!rn) add("transfer_no_road", "transfer node " + std::to_string(t) + " has no road access");
  }

  for (const auto& l : s.links)
    if (l.subnet == Subnet::RN && l.capacity <= 0.0)
      add("zero_capacity_link", "road link " + l.id + " has no capacity");

  if (s.toggles.enabled(BaseMode::CP) && !s.toggles.enabled(BaseMode::CD))
    add("cp_without_cd", "carpooling passengers enabled without drivers");

  // Per-mode reachability over the subnetwork graph, ignoring frequencies.
  for (const auto& [od, q] : s.demand) {
    if (q == 0 || od.first == od.second) continue;
    bool connected = false;
    for (const auto& m : s.toggles.modes) {
      if (!m.simple()) continue;
      Subnet sn = subnet_of(m.base());
      std::set<NodeId> seen{od.first};
      std::vector<NodeId> stack{od.first};
      while (!stack.empty() && !connected) {
        NodeId n = stack.back();
        stack.pop_back();
        if (n == od.second) connected = true;
        for (int a : s.out_links(n, sn))
          if (seen.insert(s.links[a].head).second) stack.push_back(s.links[a].head);
      }
      if (connected) break;
    }
    if (!connected)
      add("disconnected_od", "no enabled mode connects " + std::to_string(od.first) + "->" +
                                 std::to_string(od.second));
  }
  return rep;
}

}  // namespace mta
