#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mta/program.hpp"

namespace mta {

namespace {

std::string od_tag(NodeId o, NodeId d) { return std::to_string(o) + "_" + std::to_string(d); }

struct Builder {
  const Scenario& s;
  const PathCatalog& cat;
  BuildOptions opts;
  MathProgram mp;
  long long Q = 0;

  std::map<int, int> f_var;             // demanded path id -> f variable
  std::map<int, long long> f_ub;        // demanded path id -> OD demand
  std::vector<CdStopCandidate> cd_cands;
  std::vector<int> cd_var;
  std::vector<RsRideUse> rs_uses;
  std::vector<RsPairCandidate> rs_pairs;
  std::vector<int> rs_pair_var;
  std::map<int, int> rs_veh_var;        // carrier path id -> y
  std::map<int, int> eh_veh_var;        // ride path id -> y
  std::map<int, int> e_var;             // repositioning path id -> y
  std::map<std::pair<NodeId, NodeId>, int> qo_var;
  std::map<std::pair<NodeId, NodeId>, int> qe_var;
  std::map<std::tuple<NodeId, NodeId, NodeId>, int> qos_var;

  Builder(const Scenario& sc, const PathCatalog& c, Principle pr, BuildOptions o)
      : s(sc), cat(c), opts(o) {
    mp.principle = pr;
    mp.integer_mode = opts.integer;
    Q = s.total_demand();
  }

  // Travel time enters per passenger only where the mode itself rolls on an
  // uncongested network; road in-vehicle time is priced through x_a.
  double path_cost_coef(const Path& p) const {
    double coef = 0.0;
    for (const auto& pos : link_positions(p)) {
      const Leg& leg = p.legs[pos.leg];
      const Link& l = s.links[pos.link];
      coef += s.params.alpha * service_time(s, leg.mode, pos.leg_origin, pos.leg_dest);
      coef += monetary_cost(s, leg.mode, l, pos.leg_origin, pos.leg_dest);
      if (is_pt(leg.mode))
        coef += s.params.alpha * waiting_time(s, leg.mode, pos.leg_origin, 0.0, leg.pt_line);
      if (l.subnet == Subnet::WN || l.subnet == Subnet::BN)
        coef += s.params.alpha * l.length / s.params.Sp(l.subnet);
    }
    return coef;
  }

  void add_path_flows() {
    for (const auto& om : cat.od_modes()) {
      long long q = s.demand.at({om.o, om.d});
      for (int pid : om.path_ids) {
        if (f_var.count(pid)) continue;
        const Path& p = cat.path(pid);
        f_var[pid] = mp.add_var("f_" + std::to_string(pid), 0.0, static_cast<double>(q), true,
                                path_cost_coef(p), 23,
                                {VarKind::PathFlow, pid, -1, om.o, om.d, om.mode.name()});
        f_ub[pid] = q;
      }
    }
    for (const auto& [od, q] : s.demand) {
      if (q <= 0 || od.first == od.second) continue;
      std::vector<std::pair<int, double>> terms;
      for (const auto& om : cat.od_modes())
        if (om.o == od.first && om.d == od.second)
          for (int pid : om.path_ids) terms.push_back({f_var.at(pid), 1.0});
      mp.add_row("demand_" + od_tag(od.first, od.second), Sense::EQ, static_cast<double>(q),
                 std::move(terms), {8});
    }
  }

  bool demanded(int pid) const { return f_var.count(pid) > 0; }

  // Demanded composite paths having a leg of the given mode whose links equal
  // the given sequence.
  std::vector<int> composite_users_of_leg(BaseMode m, const std::vector<int>& links) const {
    std::vector<int> out;
    for (const auto& om : cat.od_modes()) {
      if (om.mode.simple() || !om.mode.contains(m)) continue;
      for (int pid : om.path_ids)
        for (const auto& leg : cat.path(pid).legs)
          if (leg.mode == m && leg.links == links) {
            out.push_back(pid);
            break;
          }
    }
    return out;
  }

  void add_carpooling() {
    if (!s.toggles.enabled(BaseMode::CD)) return;
    cd_cands = cd_stop_candidates(s, cat);
    for (std::size_t c = 0; c < cd_cands.size(); ++c) {
      const auto& cand = cd_cands[c];
      cd_var.push_back(mp.add_var("fcd_" + std::to_string(c), 0.0,
                                  static_cast<double>(f_ub.at(cand.driver_path)), true, 0.0, 23,
                                  {VarKind::CdStopFlow, static_cast<int>(c), cand.ride_path,
                                   cand.r, cand.s, "CD"}));
    }

    // Every driver stops exactly once to serve one passenger group.
    for (const auto& om : cat.od_modes()) {
      if (!(om.mode.simple() && om.mode.base() == BaseMode::CD)) continue;
      for (int pid : om.path_ids) {
        std::vector<std::pair<int, double>> terms{{f_var.at(pid), 1.0}};
        for (std::size_t c = 0; c < cd_cands.size(); ++c)
          if (cd_cands[c].driver_path == pid) terms.push_back({cd_var[c], -1.0});
        mp.add_row("cd_stops_" + std::to_string(pid), Sense::EQ, 0.0, std::move(terms), {9});
      }
    }

    bool inter = s.toggles.intermodality;
    auto seat_families = inter ? std::vector<int>{10, 30} : std::vector<int>{10};
    auto avail_families = inter ? std::vector<int>{11, 31} : std::vector<int>{11};

    // Seats for door-to-door carpooling passengers.
    for (const auto& om : cat.od_modes()) {
      if (!(om.mode.simple() && om.mode.base() == BaseMode::CP)) continue;
      for (int pid : om.path_ids) {
        const Path& ride = cat.path(pid);
        std::vector<std::pair<int, double>> terms{{f_var.at(pid), 1.0}};
        double cap = s.params.CAP(BaseMode::CP);
        for (std::size_t c = 0; c < cd_cands.size(); ++c)
          if (cd_cands[c].ride_path == pid) terms.push_back({cd_var[c], -cap});
        for (int k : composite_users_of_leg(BaseMode::CD, ride.all_links))
          terms.push_back({f_var.at(k), -cap});
        mp.add_row("cp_seats_" + std::to_string(pid), Sense::LE, 0.0, std::move(terms),
                   seat_families);
      }
    }

    // A stopping driver needs passengers on the exact sub-path served.
    for (std::size_t c = 0; c < cd_cands.size(); ++c) {
      const Path& ride = cat.path(cd_cands[c].ride_path);
      std::vector<std::pair<int, double>> terms{{cd_var[c], 1.0}};
      if (demanded(cd_cands[c].ride_path)) terms.push_back({f_var.at(cd_cands[c].ride_path), -1.0});
      for (int k : composite_users_of_leg(BaseMode::CP, ride.all_links))
        terms.push_back({f_var.at(k), -1.0});
      mp.add_row("cd_avail_" + std::to_string(c), Sense::LE, 0.0, std::move(terms), avail_families);
    }

    if (!inter) return;
    // Intermodal carpooling passengers need a driver covering their leg, and
    // intermodal drivers need a passenger group for theirs.
    for (const auto& om : cat.od_modes()) {
      if (om.mode.simple()) continue;
      for (int pid : om.path_ids) {
        const Path& p = cat.path(pid);
        for (std::size_t k = 0; k < p.legs.size(); ++k) {
          const Leg& leg = p.legs[k];
          if (leg.mode == BaseMode::CP) {
            std::vector<std::pair<int, double>> terms{{f_var.at(pid), 1.0}};
            double cap = s.params.CAP(BaseMode::CP);
            for (std::size_t c = 0; c < cd_cands.size(); ++c)
              if (cd_cands[c].ride_path == leg.path_id) terms.push_back({cd_var[c], -cap});
            for (int u : composite_users_of_leg(BaseMode::CD, leg.links))
              terms.push_back({f_var.at(u), -cap});
            mp.add_row("icp_seats_" + std::to_string(pid) + "_" + std::to_string(k), Sense::LE,
                       0.0, std::move(terms), {28});
          }
          if (leg.mode == BaseMode::CD) {
            std::vector<std::pair<int, double>> terms{{f_var.at(pid), 1.0}};
            for (int u : composite_users_of_leg(BaseMode::CP, leg.links))
              terms.push_back({f_var.at(u), -1.0});
            int door = cat.find_by_links(s.links[leg.links.front()].tail,
                                         s.links[leg.links.back()].head, "CP", leg.links);
            if (door >= 0 && demanded(door)) terms.push_back({f_var.at(door), -1.0});
            mp.add_row("icd_avail_" + std::to_string(pid) + "_" + std::to_string(k), Sense::LE,
                       0.0, std::move(terms), {29});
          }
        }
      }
    }
  }

  void add_ehailing() {
    if (!s.toggles.enabled(BaseMode::EH)) return;
    bool inter = s.toggles.intermodality;
    // Ride paths: door-to-door EH paths plus EH legs of demanded composites.
    std::map<int, std::vector<int>> leg_users;  // ride path -> composite users
    std::set<int> rides;
    for (const auto& om : cat.od_modes()) {
      if (om.mode.simple() && om.mode.base() == BaseMode::EH)
        for (int pid : om.path_ids) rides.insert(pid);
      if (!om.mode.simple() && om.mode.contains(BaseMode::EH))
        for (int pid : om.path_ids)
          for (const auto& leg : cat.path(pid).legs)
            if (leg.mode == BaseMode::EH) {
              rides.insert(leg.path_id);
              leg_users[leg.path_id].push_back(pid);
            }
    }
    for (int ride : rides) {
      int y = mp.add_var("yeh_" + std::to_string(ride), 0.0, static_cast<double>(s.fleet_size),
                         true, 0.0, 24,
                         {VarKind::EhVehFlow, ride, -1, cat.path(ride).origin,
                          cat.path(ride).dest, "EH"});
      eh_veh_var[ride] = y;
      std::vector<std::pair<int, double>> terms{{y, 1.0}};
      if (demanded(ride)) terms.push_back({f_var.at(ride), -1.0});
      for (int u : leg_users[ride]) terms.push_back({f_var.at(u), -1.0});
      mp.add_row("eh_couple_" + std::to_string(ride), Sense::EQ, 0.0, std::move(terms),
                 inter ? std::vector<int>{12, 33} : std::vector<int>{12}, y);
    }
  }

  void add_ridesharing() {
    if (!s.toggles.enabled(BaseMode::RS)) return;
    bool inter = s.toggles.intermodality;
    rs_uses = rs_ride_uses(s, cat);
    rs_pairs = rs_pair_candidates(s, cat, rs_uses);

    for (std::size_t c = 0; c < rs_pairs.size(); ++c) {
      const auto& pc = rs_pairs[c];
      rs_pair_var.push_back(mp.add_var(
          "yrs_" + std::to_string(c), 0.0, static_cast<double>(s.fleet_size), true, 0.0, 25,
          {VarKind::RsPairFlow, static_cast<int>(c), pc.vehicle_path, pc.mid1, pc.mid2, "RS"}));
    }

    // Vehicles per carrier path decompose over the served pair patterns.
    std::set<int> carriers;
    for (const auto& pc : rs_pairs) carriers.insert(pc.vehicle_path);
    for (int l : carriers) {
      int y = mp.add_var("yv_" + std::to_string(l), 0.0, static_cast<double>(s.fleet_size), true,
                         0.0, 24,
                         {VarKind::RsVehFlow, l, -1, cat.path(l).origin, cat.path(l).dest, "RS"});
      rs_veh_var[l] = y;
      std::vector<std::pair<int, double>> terms{{y, 1.0}};
      for (std::size_t c = 0; c < rs_pairs.size(); ++c)
        if (rs_pairs[c].vehicle_path == l) terms.push_back({rs_pair_var[c], -1.0});
      mp.add_row("rs_decomp_" + std::to_string(l), Sense::EQ, 0.0, std::move(terms), {13}, y);
    }

    double cap = s.params.CAP(BaseMode::RS);
    for (const auto& use : rs_uses) {
      // Seats for passengers riding this path, door-to-door and as a leg.
      std::vector<std::pair<int, double>> committed;
      for (std::size_t c = 0; c < rs_pairs.size(); ++c) {
        int n = rs_pairs[c].count_ride(use.ride_path);
        if (n) committed.push_back({rs_pair_var[c], static_cast<double>(n)});
      }
      for (int door : use.door_paths) {
        std::vector<std::pair<int, double>> terms{{f_var.at(door), 1.0}};
        for (auto& [v, n] : committed) terms.push_back({v, -cap * n});
        mp.add_row("rs_seats_" + std::to_string(use.ride_path), Sense::LE, 0.0, std::move(terms),
                   {14});
      }
      for (int k : use.intermodal_paths) {
        std::vector<std::pair<int, double>> terms{{f_var.at(k), 1.0}};
        for (auto& [v, n] : committed) terms.push_back({v, -cap * n});
        mp.add_row("irs_seats_" + std::to_string(use.ride_path) + "_" + std::to_string(k),
                   Sense::LE, 0.0, std::move(terms), {32});
      }

      // Committed seats on one carrier path cannot exceed the passengers
      // available for this ride path.
      for (int l : carriers) {
        std::vector<std::pair<int, double>> terms;
        for (std::size_t c = 0; c < rs_pairs.size(); ++c) {
          if (rs_pairs[c].vehicle_path != l) continue;
          int n = rs_pairs[c].count_ride(use.ride_path);
          if (n) terms.push_back({rs_pair_var[c], static_cast<double>(n)});
        }
        if (terms.empty()) continue;
        for (int door : use.door_paths) terms.push_back({f_var.at(door), -1.0});
        for (int k : use.intermodal_paths) terms.push_back({f_var.at(k), -1.0});
        mp.add_row("rs_avail_" + std::to_string(use.ride_path) + "_" + std::to_string(l),
                   Sense::LE, 0.0, std::move(terms),
                   inter ? std::vector<int>{15, 34} : std::vector<int>{15});
      }

      // No vehicle runs a committed seat empty: passengers cover all seats.
      if (!committed.empty()) {
        std::vector<std::pair<int, double>> terms;
        for (int door : use.door_paths) terms.push_back({f_var.at(door), 1.0});
        for (int k : use.intermodal_paths) terms.push_back({f_var.at(k), 1.0});
        for (auto& [v, n] : committed) terms.push_back({v, -n});
        mp.add_row("rs_filled_" + std::to_string(use.ride_path), Sense::GE, 0.0, std::move(terms),
                   {16});
      }
    }
  }

  void add_fleet() {
    if (!s.fleet_active()) return;

    // Empty repositioning flows, including the idle loop at each hub.
    for (const auto& p : cat.all()) {
      // e-paths are cataloged under the "e" bucket only.
      bool is_e = false;
      for (int id : cat.paths_for(p.origin, p.dest, "e"))
        if (id == p.id) is_e = true;
      if (!is_e) continue;
      e_var[p.id] = mp.add_var("ye_" + std::to_string(p.id), 0.0,
                               static_cast<double>(s.fleet_size), true, 0.0, 24,
                               {VarKind::EmptyFlow, p.id, -1, p.origin, p.dest, "e"});
    }

    // Occupied-vehicle accounting per OD and first interior stop.
    std::set<std::pair<NodeId, NodeId>> occ_ods;
    std::set<std::tuple<NodeId, NodeId, NodeId>> stop_keys;
    for (const auto& pc : rs_pairs) {
      const Path& vp = cat.path(pc.vehicle_path);
      occ_ods.insert({vp.origin, vp.dest});
      stop_keys.insert({vp.origin, vp.dest, pc.mid1});
    }
    for (auto& [ride, y] : eh_veh_var)
      occ_ods.insert({cat.path(ride).origin, cat.path(ride).dest});

    for (const auto& key : stop_keys) {
      auto [o, d, r] = key;
      int v = mp.add_var("qos_" + od_tag(o, d) + "_" + std::to_string(r), 0.0,
                         static_cast<double>(s.fleet_size), true, 0.0, 24,
                         {VarKind::OccStopCount, r, -1, o, d, ""});
      qos_var[key] = v;
      std::vector<std::pair<int, double>> terms{{v, 1.0}};
      for (std::size_t c = 0; c < rs_pairs.size(); ++c) {
        const Path& vp = cat.path(rs_pairs[c].vehicle_path);
        if (vp.origin == o && vp.dest == d && rs_pairs[c].mid1 == r)
          terms.push_back({rs_pair_var[c], -1.0});
      }
      mp.add_row("occ_stop_" + od_tag(o, d) + "_" + std::to_string(r), Sense::EQ, 0.0,
                 std::move(terms), {17}, v);
    }

    for (auto od : occ_ods) {
      int v = mp.add_var("qo_" + od_tag(od.first, od.second), 0.0,
                         static_cast<double>(s.fleet_size), true, 0.0, 24,
                         {VarKind::OccCount, -1, -1, od.first, od.second, ""});
      qo_var[od] = v;
      std::vector<std::pair<int, double>> terms{{v, 1.0}};
      for (auto& [key, qv] : qos_var)
        if (std::get<0>(key) == od.first && std::get<1>(key) == od.second)
          terms.push_back({qv, -1.0});
      for (auto& [ride, y] : eh_veh_var) {
        const Path& rp = cat.path(ride);
        if (rp.origin == od.first && rp.dest == od.second) terms.push_back({y, -1.0});
      }
      mp.add_row("occ_" + od_tag(od.first, od.second), Sense::EQ, 0.0, std::move(terms), {18}, v);
    }

    std::set<std::pair<NodeId, NodeId>> e_ods;
    for (auto& [pid, v] : e_var) e_ods.insert({cat.path(pid).origin, cat.path(pid).dest});
    for (auto od : e_ods) {
      int v = mp.add_var("qe_" + od_tag(od.first, od.second), 0.0,
                         static_cast<double>(s.fleet_size), true, 0.0, 24,
                         {VarKind::EmptyCount, -1, -1, od.first, od.second, ""});
      qe_var[od] = v;
      std::vector<std::pair<int, double>> terms{{v, 1.0}};
      for (auto& [pid, ev] : e_var) {
        const Path& p = cat.path(pid);
        if (p.origin == od.first && p.dest == od.second) terms.push_back({ev, -1.0});
      }
      mp.add_row("empty_" + od_tag(od.first, od.second), Sense::EQ, 0.0, std::move(terms), {19},
                 v);
    }

    // Vehicle balance at destinations, pickup availability at origins.
    for (NodeId n : s.destinations) {
      std::vector<std::pair<int, double>> terms;
      for (auto& [od, v] : qo_var) {
        if (od.second == n) terms.push_back({v, 1.0});
        if (od.first == n) terms.push_back({v, -1.0});
      }
      for (auto& [od, v] : qe_var) {
        if (od.second == n && od.first != od.second) terms.push_back({v, 1.0});
        if (od.first == n && od.first != od.second) terms.push_back({v, -1.0});
      }
      if (!terms.empty())
        mp.add_row("veh_balance_" + std::to_string(n), Sense::EQ, 0.0, std::move(terms), {20});
    }
    for (NodeId n : s.origins) {
      std::vector<std::pair<int, double>> terms;
      for (auto& [od, v] : qe_var)
        if (od.second == n) terms.push_back({v, 1.0});
      bool any_dep = false;
      for (auto& [od, v] : qo_var)
        if (od.first == n) {
          terms.push_back({v, -1.0});
          any_dep = true;
        }
      if (any_dep)
        mp.add_row("pickup_" + std::to_string(n), Sense::GE, 0.0, std::move(terms), {21});
    }

    std::vector<std::pair<int, double>> fleet_terms;
    for (auto& [od, v] : qo_var) fleet_terms.push_back({v, 1.0});
    for (auto& [od, v] : qe_var) fleet_terms.push_back({v, 1.0});
    mp.add_row("fleet", Sense::EQ, static_cast<double>(s.fleet_size), std::move(fleet_terms),
               {22});
  }

  void add_modal_flow_rows() {
    std::vector<int> fams =
        s.toggles.intermodality ? std::vector<int>{7, 35} : std::vector<int>{7};
    for (int bm = 0; bm < kNumBaseModes; ++bm) {
      BaseMode m = static_cast<BaseMode>(bm);
      std::map<int, std::vector<std::pair<int, double>>> per_link;
      for (auto& [pid, fv] : f_var) {
        const Path& p = cat.path(pid);
        for (const auto& leg : p.legs)
          if (leg.mode == m)
            for (int a : leg.links) per_link[a].push_back({fv, 1.0});
      }
      for (auto& [a, terms] : per_link) {
        int v = mp.add_var("xm_" + std::to_string(a) + "_" + to_string(m), 0.0,
                           static_cast<double>(Q), true, 0.0, 0,
                           {VarKind::ModalFlow, a, bm, 0, 0, to_string(m)});
        auto row = terms;
        row.push_back({v, -1.0});
        mp.add_row("xam_" + std::to_string(a) + "_" + to_string(m), Sense::EQ, 0.0,
                   std::move(row), fams, v);
      }
    }
  }

  void add_congestion() {
    for (std::size_t a = 0; a < s.links.size(); ++a) {
      const Link& l = s.links[a];
      double units = s.pt_units_on_link(static_cast<int>(a));
      if (l.subnet != Subnet::RN) {
        // Flow-independent networks contribute linear passenger time (folded
        // into the path coefficients) plus the scheduled units' time.
        mp.obj_offset += s.params.alpha * (l.length / s.params.Sp(l.subnet)) * units;
        continue;
      }
      std::vector<std::pair<int, double>> terms;
      for (auto& [pid, fv] : f_var) {
        const Path& p = cat.path(pid);
        double count = 0.0;
        for (const auto& leg : p.legs)
          if (is_vehicle_mode(leg.mode))
            for (int link : leg.links)
              if (link == static_cast<int>(a)) count += 1.0;
        if (count > 0.0) terms.push_back({fv, count});
      }
      for (auto& [pid, y] : rs_veh_var)
        if (cat.path(pid).uses_link(static_cast<int>(a))) terms.push_back({y, 1.0});
      for (auto& [pid, y] : eh_veh_var)
        if (cat.path(pid).uses_link(static_cast<int>(a))) terms.push_back({y, 1.0});
      for (auto& [pid, y] : e_var)
        if (cat.path(pid).uses_link(static_cast<int>(a))) terms.push_back({y, 1.0});

      double xmax = opts.pwl_xmax > 0.0
                        ? opts.pwl_xmax
                        : std::max(2.0 * l.capacity,
                                   static_cast<double>(Q) + units +
                                       (s.fleet_active() ? static_cast<double>(s.fleet_size) : 0.0));
      bool integral_const = units == std::floor(units);
      int X = mp.add_var("xa_" + std::to_string(a), units, std::max(xmax, units), integral_const,
                         0.0, 0, {VarKind::TotalFlow, static_cast<int>(a), -1, 0, 0, ""});
      auto row = terms;
      row.push_back({X, -1.0});
      mp.add_row("xa_" + std::to_string(a), Sense::EQ, -units, std::move(row), {26}, X);
      linearize_bpr_integral(mp, s, static_cast<int>(a), X, opts.pwl_segments, xmax, mp.principle);
    }
  }

  void add_sms_waiting() {
    if (Q <= 0) return;
    for (BaseMode m : {BaseMode::CP, BaseMode::RS, BaseMode::EH}) {
      if (!s.toggles.enabled(m)) continue;
      std::vector<std::pair<int, double>> terms;
      for (auto& [pid, fv] : f_var) {
        const Path& p = cat.path(pid);
        double legs = 0.0;
        for (const auto& leg : p.legs)
          if (leg.mode == m) legs += 1.0;
        if (legs > 0.0) terms.push_back({fv, legs});
      }
      if (terms.empty()) continue;
      int qm = mp.add_var("qm_" + to_string(m), 0.0, static_cast<double>(Q), true, 0.0, 0,
                          {VarKind::ModeDemand, -1, -1, 0, 0, to_string(m)});
      auto row = terms;
      row.push_back({qm, -1.0});
      mp.add_row("qm_" + to_string(m), Sense::EQ, 0.0, std::move(row), {}, qm);
      // Waiting is q_m / R_m on the first link of every SMS leg; summed over
      // the mode it contributes alpha/R_m * q_m^2 to either objective.
      linearize_bilinear_product(mp, qm, qm, Q, static_cast<double>(Q),
                                 s.params.alpha / s.params.R(m), "qm_" + to_string(m));
    }
  }

  void add_pt_capacity() {
    for (std::size_t li = 0; li < s.pt_lines.size(); ++li) {
      const auto& line = s.pt_lines[li];
      double cap = line.frequency * line.veh_capacity;
      for (int a : line.links) {
        std::vector<std::pair<int, double>> terms;
        for (auto& [pid, fv] : f_var) {
          const Path& p = cat.path(pid);
          for (const auto& leg : p.legs) {
            if (leg.pt_line != static_cast<int>(li)) continue;
            if (std::find(leg.links.begin(), leg.links.end(), a) != leg.links.end()) {
              terms.push_back({fv, 1.0});
              break;
            }
          }
        }
        if (!terms.empty())
          mp.add_row("pt_cap_" + line.id + "_" + std::to_string(a), Sense::LE, cap,
                     std::move(terms), {101});
      }
    }
  }

  void add_parking() {
    if (!s.toggles.intermodality) return;
    for (auto& [node, cap] : s.parking_capacity) {
      std::vector<std::pair<int, double>> terms;
      for (auto& [pid, fv] : f_var) {
        const Path& p = cat.path(pid);
        if (p.mode.simple()) continue;
        for (std::size_t k = 0; k + 1 < p.legs.size(); ++k)
          if ((p.legs[k].mode == BaseMode::car || p.legs[k].mode == BaseMode::CD) &&
              p.transfer_after(s, k) == node) {
            terms.push_back({fv, 1.0});
            break;
          }
      }
      if (!terms.empty())
        mp.add_row("parking_" + std::to_string(node), Sense::LE, cap, std::move(terms), {27});
    }
  }

  MathProgram run() {
    add_path_flows();
    add_carpooling();
    add_ehailing();
    add_ridesharing();
    add_fleet();
    add_modal_flow_rows();
    add_congestion();
    add_sms_waiting();
    add_pt_capacity();
    add_parking();
    return std::move(mp);
  }
};

}  // namespace

MathProgram build_program(const Scenario& s, const PathCatalog& cat, Principle principle,
                          const BuildOptions& opts) {
  Builder b(s, cat, principle, opts);
  return b.run();
}

}  // namespace mta
