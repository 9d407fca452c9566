#include "mta/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mta {

namespace {

struct RideUsers {
  std::vector<int> door;        // demanded door-to-door paths equal to the ride
  std::vector<int> intermodal;  // demanded composites with this ride as a leg
};

struct Frame {
  const Scenario& s;
  const PathCatalog& cat;
  Principle principle;
  long long cap;

  std::vector<std::pair<NodeId, NodeId>> ods;
  std::vector<long long> od_demand;
  std::vector<std::vector<int>> od_options;  // path ids per OD

  std::vector<CdStopCandidate> cd_cands;
  std::vector<int> cd_driver_paths;                   // door CD paths
  std::vector<std::vector<int>> cd_cands_of_driver;   // driver path -> candidate idx

  std::vector<RsRideUse> rs_uses;
  std::vector<RsPairCandidate> rs_pairs;

  std::map<int, RideUsers> cp_users;  // CP ride path -> users
  std::map<int, RideUsers> eh_users;  // EH ride path -> users

  std::vector<int> e_paths;  // driving repositioning paths (no idles)
  std::vector<NodeId> hubs;
};

// Collects door and composite users of every CP or EH ride path.
std::map<int, RideUsers> ride_users(const PathCatalog& cat, BaseMode m) {
  std::map<int, RideUsers> out;
  for (const auto& om : cat.od_modes()) {
    if (om.mode.simple() && om.mode.base() == m)
      for (int pid : om.path_ids) out[pid].door.push_back(pid);
    if (!om.mode.simple() && om.mode.contains(m))
      for (int pid : om.path_ids)
        for (const auto& leg : cat.path(pid).legs)
          if (leg.mode == m) out[leg.path_id].intermodal.push_back(pid);
  }
  return out;
}

struct Assignment {
  std::map<int, double> f;          // path id -> flow
  std::vector<long long> cd;        // per stop candidate
  std::vector<long long> rs;        // per pair candidate
  std::map<int, long long> edrv;    // driving e-path -> vehicles
  std::map<int, long long> idle;    // hub node -> parked vehicles
};

struct Search {
  const Frame& fr;
  long long visited = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  long long optima = 0;
  Assignment best;
  std::vector<double> best_key;

  double pax_of(const Assignment& a, const RideUsers& u) const {
    double n = 0.0;
    for (int p : u.door) n += a.f.count(p) ? a.f.at(p) : 0.0;
    for (int p : u.intermodal) n += a.f.count(p) ? a.f.at(p) : 0.0;
    return n;
  }

  double flow_of(const Assignment& a, int pid) const {
    auto it = a.f.find(pid);
    return it == a.f.end() ? 0.0 : it->second;
  }

  // Exact objective of a complete assignment.
  double evaluate(const Assignment& a) const {
    const Scenario& s = fr.s;
    std::vector<double> x(s.links.size(), 0.0);
    for (std::size_t l = 0; l < s.links.size(); ++l) x[l] = s.pt_units_on_link((int)l);
    std::map<BaseMode, double> qm;
    for (auto& [pid, f] : a.f) {
      if (f == 0.0) continue;
      for (const auto& leg : fr.cat.path(pid).legs) {
        if (is_vehicle_mode(leg.mode))
          for (int link : leg.links) x[link] += f;
        if (is_sms(leg.mode)) qm[leg.mode] += f;
      }
    }
    for (std::size_t c = 0; c < fr.rs_pairs.size(); ++c)
      if (a.rs[c] > 0)
        for (int link : fr.cat.path(fr.rs_pairs[c].vehicle_path).all_links) x[link] += a.rs[c];
    for (auto& [ride, users] : fr.eh_users) {
      double veh = pax_of(a, users);
      if (veh > 0)
        for (int link : fr.cat.path(ride).all_links) x[link] += veh;
    }
    for (auto& [pid, n] : a.edrv)
      if (n > 0)
        for (int link : fr.cat.path(pid).all_links) x[link] += n;

    double obj = 0.0;
    for (std::size_t l = 0; l < s.links.size(); ++l) {
      const Link& link = s.links[l];
      if (fr.principle == Principle::UE)
        obj += beckmann_link_integral(s, link, x[l]);
      else
        obj += s.params.alpha * link_travel_time(s, link, x[l]) * x[l];
    }
    for (auto& [pid, f] : a.f) {
      if (f == 0.0) continue;
      const Path& p = fr.cat.path(pid);
      for (const auto& pos : link_positions(p)) {
        const Leg& leg = p.legs[pos.leg];
        double wt = is_pt(leg.mode)
                        ? waiting_time(s, leg.mode, pos.leg_origin, 0.0, leg.pt_line)
                        : waiting_time(s, leg.mode, pos.leg_origin,
                                       qm.count(leg.mode) ? qm.at(leg.mode) : 0.0, -1);
        obj += f * (s.params.alpha *
                        (wt + service_time(s, leg.mode, pos.leg_origin, pos.leg_dest)) +
                    monetary_cost(s, leg.mode, s.links[pos.link], pos.leg_origin, pos.leg_dest));
      }
    }
    return obj;
  }

  std::vector<double> key_of(const Assignment& a) const {
    std::vector<double> key;
    for (auto& [pid, f] : a.f) key.push_back(f);
    for (auto v : a.cd) key.push_back((double)v);
    for (auto v : a.rs) key.push_back((double)v);
    for (auto& [pid, n] : a.edrv) key.push_back((double)n);
    return key;
  }

  void record(const Assignment& a) {
    if (++visited > fr.cap) throw ModelError("oracle enumeration cap exceeded");
    double obj = evaluate(a);
    if (obj < best_obj - 1e-9) {
      best_obj = obj;
      optima = 1;
      best = a;
      best_key = key_of(a);
    } else if (obj <= best_obj + 1e-9) {
      ++optima;
      auto key = key_of(a);
      if (key < best_key) {
        best = a;
        best_key = key;
      }
    }
  }

  bool pt_feasible(const Assignment& a) const {
    for (std::size_t li = 0; li < fr.s.pt_lines.size(); ++li) {
      const auto& line = fr.s.pt_lines[li];
      for (int link : line.links) {
        double pax = 0.0;
        for (auto& [pid, f] : a.f) {
          if (f == 0.0) continue;
          for (const auto& leg : fr.cat.path(pid).legs)
            if (leg.pt_line == (int)li &&
                std::find(leg.links.begin(), leg.links.end(), link) != leg.links.end()) {
              pax += f;
              break;
            }
        }
        if (pax > line.frequency * line.veh_capacity + 1e-9) return false;
      }
    }
    return true;
  }

  bool parking_feasible(const Assignment& a) const {
    if (!fr.s.toggles.intermodality) return true;
    for (auto& [node, cap] : fr.s.parking_capacity) {
      double used = 0.0;
      for (auto& [pid, f] : a.f) {
        if (f == 0.0) continue;
        const Path& p = fr.cat.path(pid);
        for (std::size_t k = 0; k + 1 < p.legs.size(); ++k)
          if ((p.legs[k].mode == BaseMode::car || p.legs[k].mode == BaseMode::CD) &&
              p.transfer_after(fr.s, k) == node) {
            used += f;
            break;
          }
      }
      if (used > cap + 1e-9) return false;
    }
    return true;
  }

  bool carpool_feasible_f(const Assignment& a) const {
    // Relaxed prune before stop pairs are chosen: no single passenger side
    // can exceed the seats of every driver that could possibly serve it.
    const double cap = fr.s.params.CAP(BaseMode::CP);
    for (auto& [ride, users] : fr.cp_users) {
      double possible = 0.0;
      for (std::size_t ci = 0; ci < fr.cd_cands.size(); ++ci)
        if (fr.cd_cands[ci].ride_path == ride) possible += flow_of(a, fr.cd_cands[ci].driver_path);
      for (int k : composite_cd_users(ride)) possible += flow_of(a, k);
      for (int p : users.door)
        if (flow_of(a, p) > cap * possible + 1e-9) return false;
      for (int p : users.intermodal)
        if (flow_of(a, p) > cap * possible + 1e-9) return false;
    }
    return true;
  }

  std::vector<int> composite_cd_users(int ride) const {
    std::vector<int> out;
    const Path& rp = fr.cat.path(ride);
    for (const auto& om : fr.cat.od_modes()) {
      if (om.mode.simple() || !om.mode.contains(BaseMode::CD)) continue;
      for (int pid : om.path_ids)
        for (const auto& leg : fr.cat.path(pid).legs)
          if (leg.mode == BaseMode::CD && leg.links == rp.all_links) {
            out.push_back(pid);
            break;
          }
    }
    return out;
  }

  // Checks the carpool coupling for a full (f, cd) assignment.
  bool carpool_feasible(const Assignment& a) const {
    const double cap = fr.s.params.CAP(BaseMode::CP);
    for (std::size_t c = 0; c < fr.cd_cands.size(); ++c) {
      if (a.cd[c] == 0) continue;
      auto uit = fr.cp_users.find(fr.cd_cands[c].ride_path);
      double pax = uit == fr.cp_users.end() ? 0.0 : pax_of(a, uit->second);
      if (a.cd[c] > pax + 1e-9) return false;  // drivers without passengers
    }
    for (auto& [ride, users] : fr.cp_users) {
      double committed = 0.0;
      for (std::size_t c = 0; c < fr.cd_cands.size(); ++c)
        if (fr.cd_cands[c].ride_path == ride) committed += (double)a.cd[c];
      for (int k : composite_cd_users(ride)) committed += flow_of(a, k);
      for (int p : users.door)
        if (flow_of(a, p) > cap * committed + 1e-9) return false;
      for (int p : users.intermodal)
        if (flow_of(a, p) > cap * committed + 1e-9) return false;
    }
    // Intermodal drivers need a passenger group over their own leg.
    for (const auto& om : fr.cat.od_modes()) {
      if (om.mode.simple() || !om.mode.contains(BaseMode::CD)) continue;
      for (int pid : om.path_ids) {
        double f = flow_of(a, pid);
        if (f == 0.0) continue;
        for (const auto& leg : fr.cat.path(pid).legs) {
          if (leg.mode != BaseMode::CD) continue;
          auto uit = fr.cp_users.find(leg.path_id);
          double pax = uit == fr.cp_users.end() ? 0.0 : pax_of(a, uit->second);
          if (f > pax + 1e-9) return false;
        }
      }
    }
    return true;
  }

  bool ridesharing_feasible(const Assignment& a) const {
    const double cap = fr.s.params.CAP(BaseMode::RS);
    for (const auto& use : fr.rs_uses) {
      double committed = 0.0;
      for (std::size_t c = 0; c < fr.rs_pairs.size(); ++c)
        committed += fr.rs_pairs[c].count_ride(use.ride_path) * (double)a.rs[c];
      double door = 0.0, inter = 0.0;
      for (int p : use.door_paths) door += flow_of(a, p);
      for (int p : use.intermodal_paths) inter += flow_of(a, p);
      if (door > cap * committed + 1e-9) return false;  // seats, door side
      for (int p : use.intermodal_paths)
        if (flow_of(a, p) > cap * committed + 1e-9) return false;  // seats, leg side
      if (committed > door + inter + 1e-9) return false;           // every seat filled
    }
    return true;
  }

  // Occupied counts per OD implied by the matching layers.
  std::map<std::pair<NodeId, NodeId>, double> occupied(const Assignment& a) const {
    std::map<std::pair<NodeId, NodeId>, double> occ;
    for (std::size_t c = 0; c < fr.rs_pairs.size(); ++c)
      if (a.rs[c] > 0) {
        const Path& vp = fr.cat.path(fr.rs_pairs[c].vehicle_path);
        occ[{vp.origin, vp.dest}] += (double)a.rs[c];
      }
    for (auto& [ride, users] : fr.eh_users) {
      double veh = pax_of(a, users);
      if (veh > 0) {
        const Path& rp = fr.cat.path(ride);
        occ[{rp.origin, rp.dest}] += veh;
      }
    }
    return occ;
  }

  // Balance, pickup availability and fleet size for a given empty routing;
  // idle vehicles are placed greedily since they cost nothing.
  bool fleet_feasible(const Assignment& a, Assignment& completed) const {
    completed = a;
    if (!fr.s.fleet_active()) return true;
    auto occ = occupied(a);
    double total_occ = 0.0;
    for (auto& [od, n] : occ) total_occ += n;

    std::map<NodeId, double> occ_in, occ_out, e_in, e_out;
    for (auto& [od, n] : occ) {
      occ_out[od.first] += n;
      occ_in[od.second] += n;
    }
    double total_drv = 0.0;
    for (auto& [pid, n] : a.edrv) {
      const Path& p = fr.cat.path(pid);
      e_out[p.origin] += (double)n;
      e_in[p.dest] += (double)n;
      total_drv += (double)n;
    }
    for (NodeId d : fr.s.destinations) {
      double lhs = occ_in[d] + e_in[d];
      double rhs = occ_out[d] + e_out[d];
      if (std::abs(lhs - rhs) > 1e-9) return false;
    }
    double idle_needed = 0.0;
    for (NodeId o : fr.s.origins) {
      double deficit = occ_out[o] - e_in[o];
      if (deficit > 1e-9) {
        if (std::find(fr.hubs.begin(), fr.hubs.end(), o) == fr.hubs.end()) return false;
        completed.idle[o] = (long long)std::ceil(deficit - 1e-9);
        idle_needed += completed.idle[o];
      }
    }
    double used = total_occ + total_drv + idle_needed;
    if (used > fr.s.fleet_size + 1e-9) return false;
    // Park the remaining fleet at the first hub.
    if (!fr.hubs.empty())
      completed.idle[fr.hubs.front()] += (long long)std::llround(fr.s.fleet_size - used);
    else if (fr.s.fleet_size - used > 0.5)
      return false;
    return true;
  }

  void enumerate_empties(Assignment& a, std::size_t idx, long long budget) {
    if (idx == fr.e_paths.size()) {
      Assignment completed;
      if (fleet_feasible(a, completed)) record(completed);
      return;
    }
    for (long long n = 0; n <= budget; ++n) {
      a.edrv[fr.e_paths[idx]] = n;
      enumerate_empties(a, idx + 1, budget - n);
    }
    a.edrv.erase(fr.e_paths[idx]);
  }

  void after_matching(Assignment& a) {
    if (!fr.s.fleet_active()) {
      Assignment completed;
      if (fleet_feasible(a, completed)) record(completed);
      return;
    }
    auto occ = occupied(a);
    double total_occ = 0.0;
    for (auto& [od, n] : occ) total_occ += n;
    if (total_occ > fr.s.fleet_size + 1e-9) return;
    long long budget = (long long)std::llround(total_occ);
    enumerate_empties(a, 0, budget);
  }

  void enumerate_rs(Assignment& a, std::size_t idx) {
    if (idx == fr.rs_pairs.size()) {
      if (ridesharing_feasible(a)) after_matching(a);
      return;
    }
    // A pair vehicle needs every committed seat filled, so its count is
    // bounded by the passengers available on both rides.
    const auto& pc = fr.rs_pairs[idx];
    long long ub = (long long)fr.s.fleet_size;
    for (const auto& use : fr.rs_uses) {
      int cnt = pc.count_ride(use.ride_path);
      if (!cnt) continue;
      double pax = 0.0;
      for (int p : use.door_paths) pax += flow_of(a, p);
      for (int p : use.intermodal_paths) pax += flow_of(a, p);
      ub = std::min(ub, (long long)std::floor(pax / cnt + 1e-9));
    }
    for (long long n = 0; n <= ub; ++n) {
      a.rs[idx] = n;
      enumerate_rs(a, idx + 1);
    }
    a.rs[idx] = 0;
  }

  void enumerate_cd(Assignment& a, std::size_t driver_idx) {
    if (driver_idx == fr.cd_driver_paths.size()) {
      if (carpool_feasible(a)) {
        if (fr.s.toggles.enabled(BaseMode::RS))
          enumerate_rs(a, 0);
        else if (ridesharing_feasible(a))
          after_matching(a);
      }
      return;
    }
    int driver = fr.cd_driver_paths[driver_idx];
    long long f = (long long)std::llround(flow_of(a, driver));
    const auto& cands = fr.cd_cands_of_driver[driver_idx];
    if (f == 0) {
      for (int c : cands) a.cd[c] = 0;
      enumerate_cd(a, driver_idx + 1);
      return;
    }
    if (cands.empty()) return;  // a driver must stop for a passenger group
    // Distribute f drivers over the stop candidates.
    std::vector<long long> dist(cands.size(), 0);
    std::function<void(std::size_t, long long)> rec = [&](std::size_t i, long long left) {
      if (i + 1 == cands.size()) {
        dist[i] = left;
        for (std::size_t k = 0; k < cands.size(); ++k) a.cd[cands[k]] = dist[k];
        enumerate_cd(a, driver_idx + 1);
        return;
      }
      for (long long n = 0; n <= left; ++n) {
        dist[i] = n;
        rec(i + 1, left - n);
      }
    };
    rec(0, f);
    for (int c : cands) a.cd[c] = 0;
  }

  void enumerate_f(Assignment& a, std::size_t od_idx) {
    if (od_idx == fr.ods.size()) {
      if (!pt_feasible(a) || !parking_feasible(a)) return;
      if (!carpool_feasible_f(a)) return;
      enumerate_cd(a, 0);
      return;
    }
    const auto& opts = fr.od_options[od_idx];
    long long q = fr.od_demand[od_idx];
    if (opts.empty()) {
      if (q == 0) enumerate_f(a, od_idx + 1);
      return;
    }
    std::function<void(std::size_t, long long)> rec = [&](std::size_t i, long long left) {
      if (i + 1 == opts.size()) {
        a.f[opts[i]] = (double)left;
        enumerate_f(a, od_idx + 1);
        return;
      }
      for (long long n = 0; n <= left; ++n) {
        a.f[opts[i]] = (double)n;
        rec(i + 1, left - n);
      }
    };
    rec(0, q);
    for (int p : opts) a.f[p] = 0.0;
  }
};

}  // namespace

OracleResult brute_force_solve(const Scenario& s, const PathCatalog& cat, Principle principle,
                               long long cap) {
  Frame fr{s, cat, principle, cap};
  for (const auto& [od, q] : s.demand) {
    if (q <= 0 || od.first == od.second) continue;
    fr.ods.push_back(od);
    fr.od_demand.push_back(q);
    std::vector<int> opts;
    for (const auto& om : cat.od_modes())
      if (om.o == od.first && om.d == od.second)
        for (int pid : om.path_ids) opts.push_back(pid);
    fr.od_options.push_back(std::move(opts));
  }
  fr.cd_cands = cd_stop_candidates(s, cat);
  for (const auto& om : cat.od_modes())
    if (om.mode.simple() && om.mode.base() == BaseMode::CD)
      for (int pid : om.path_ids) fr.cd_driver_paths.push_back(pid);
  fr.cd_cands_of_driver.resize(fr.cd_driver_paths.size());
  for (std::size_t d = 0; d < fr.cd_driver_paths.size(); ++d)
    for (std::size_t c = 0; c < fr.cd_cands.size(); ++c)
      if (fr.cd_cands[c].driver_path == fr.cd_driver_paths[d])
        fr.cd_cands_of_driver[d].push_back((int)c);
  if (s.toggles.enabled(BaseMode::RS)) {
    fr.rs_uses = rs_ride_uses(s, cat);
    fr.rs_pairs = rs_pair_candidates(s, cat, fr.rs_uses);
  }
  fr.cp_users = ride_users(cat, BaseMode::CP);
  fr.eh_users = ride_users(cat, BaseMode::EH);
  if (s.fleet_active()) {
    std::set<NodeId> hubs(s.origins.begin(), s.origins.end());
    hubs.insert(s.destinations.begin(), s.destinations.end());
    hubs.insert(s.transfers.begin(), s.transfers.end());
    fr.hubs.assign(hubs.begin(), hubs.end());
    for (NodeId u : fr.hubs)
      for (NodeId v : fr.hubs) {
        if (u == v) continue;
        for (int pid : cat.paths_for(u, v, "e")) fr.e_paths.push_back(pid);
      }
  }

  Search search{fr};
  Assignment a;
  a.cd.assign(fr.cd_cands.size(), 0);
  a.rs.assign(fr.rs_pairs.size(), 0);
  search.enumerate_f(a, 0);

  OracleResult res;
  res.objective = search.best_obj;
  res.optima = search.optima;
  res.candidates = search.visited;
  if (search.optima == 0) throw ModelError("oracle found no feasible assignment");
  for (auto& [pid, f] : search.best.f) res.best.path_flow[pid] = f;
  for (std::size_t c = 0; c < search.best.cd.size(); ++c)
    res.best.cd_stop[(int)c] = (double)search.best.cd[c];
  for (std::size_t c = 0; c < search.best.rs.size(); ++c)
    res.best.rs_pair[(int)c] = (double)search.best.rs[c];
  for (auto& [pid, n] : search.best.edrv) res.best.empty_flow[pid] = (double)n;
  for (auto& [node, n] : search.best.idle) res.best.q_e[{node, node}] += (double)n;
  return res;
}

}  // namespace mta
