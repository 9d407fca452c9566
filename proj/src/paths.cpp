#include "mta/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "mta/costs.hpp"
#include "mta/parallel.hpp"

namespace mta {

NodeId Path::transfer_after(const Scenario& s, std::size_t k) const {
  return s.links[legs[k].links.back()].head;
}

std::vector<NodeId> Path::node_seq(const Scenario& s) const {
  std::vector<NodeId> seq{origin};
  for (int a : all_links) seq.push_back(s.links[a].head);
  return seq;
}

std::string Path::node_seq_string(const Scenario& s) const {
  std::string out;
  for (NodeId n : node_seq(s)) {
    if (!out.empty()) out += "-";
    out += std::to_string(n);
  }
  return out;
}

bool Path::uses_link(int link) const {
  return std::find(all_links.begin(), all_links.end(), link) != all_links.end();
}

std::string Path::key() const {
  std::string k = mode.name();
  for (const auto& leg : legs) {
    k += "|" + std::to_string(leg.pt_line) + ":";
    for (int a : leg.links) k += std::to_string(a) + ",";
  }
  return k;
}

std::vector<LinkPosition> link_positions(const Path& p) {
  std::vector<LinkPosition> out;
  for (std::size_t k = 0; k < p.legs.size(); ++k) {
    const auto& links = p.legs[k].links;
    for (std::size_t i = 0; i < links.size(); ++i)
      out.push_back({links[i], static_cast<int>(k), i == 0, i + 1 == links.size()});
  }
  return out;
}

namespace {

Path make_simple(const Scenario& s, NodeId i, NodeId j, BaseMode m, std::vector<int> links,
                 int pt_line = -1) {
  Path p;
  p.origin = i;
  p.dest = j;
  p.mode = Mode{{m}};
  Leg leg;
  leg.mode = m;
  leg.links = links;
  leg.pt_line = pt_line;
  p.legs.push_back(std::move(leg));
  p.all_links = std::move(links);
  for (int a : p.all_links) p.length += s.links[a].length;
  return p;
}

// Per-link weight used by the shortest-path searches; nonnegative projection
// of the free-flow generalized cost so Dijkstra stays valid for CD.
double rank_weight(const Scenario& s, BaseMode m, const Link& l) {
  double t = l.subnet == Subnet::RN ? l.t0 : l.length / s.params.Sp(l.subnet);
  double w = s.params.alpha * (t + service_time(s, m, false, false)) +
             monetary_cost(s, m, l, false, false);
  return std::max(w, 0.0);
}

struct Adjacency {
  std::vector<std::vector<int>> out;  // node index -> link indices
  std::map<NodeId, int> index;
  std::vector<NodeId> ids;
};

Adjacency build_adjacency(const Scenario& s, Subnet sn) {
  Adjacency adj;
  for (NodeId n : s.nodes) {
    adj.index[n] = static_cast<int>(adj.ids.size());
    adj.ids.push_back(n);
  }
  adj.out.resize(adj.ids.size());
  for (std::size_t a = 0; a < s.links.size(); ++a)
    if (s.links[a].subnet == sn) adj.out[adj.index.at(s.links[a].tail)].push_back(static_cast<int>(a));
  return adj;
}

// Deterministic Dijkstra returning the link sequence, honoring banned links
// and nodes. Empty result means unreachable.
bool dijkstra(const Scenario& s, const Adjacency& adj, BaseMode m, NodeId from, NodeId to,
              const std::set<int>& banned_links, const std::set<NodeId>& banned_nodes,
              std::vector<int>& out_links) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.ids.size(), inf);
  std::vector<int> pred(adj.ids.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  int src = adj.index.at(from), dst = adj.index.at(to);
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] + 1e-15) continue;
    for (int a : adj.out[u]) {
      if (banned_links.count(a)) continue;
      NodeId head = s.links[a].head;
      if (banned_nodes.count(head)) continue;
      int v = adj.index.at(head);
      double nd = d + rank_weight(s, m, s.links[a]);
      if (nd < dist[v] - 1e-15 || (std::abs(nd - dist[v]) <= 1e-15 && pred[v] >= 0 && a < pred[v])) {
        dist[v] = nd;
        pred[v] = a;
        pq.push({nd, v});
      }
    }
  }
  if (pred[dst] < 0 && dst != src) return false;
  out_links.clear();
  for (int v = dst; v != src;) {
    int a = pred[v];
    if (a < 0) return false;
    out_links.push_back(a);
    v = adj.index.at(s.links[a].tail);
  }
  std::reverse(out_links.begin(), out_links.end());
  return true;
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Yen's k-shortest loop-free paths over one subnetwork.
std::vector<std::vector<int>> yen_ksp(const Scenario& s, BaseMode m, NodeId i, NodeId j, int k) {
  Adjacency adj = build_adjacency(s, subnet_of(m));
  if (!adj.index.count(i) || !adj.index.count(j)) return {};
  std::vector<std::vector<int>> found;
  std::vector<int> first;
  if (!dijkstra(s, adj, m, i, j, {}, {}, first)) return {};
  found.push_back(first);

  auto cost_of = [&](const std::vector<int>& links) {
    double c = 0.0;
    for (int a : links) c += rank_weight(s, m, s.links[a]);
    return c;
  };
  auto cmp = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double ca = cost_of(a), cb = cost_of(b);
    if (std::abs(ca - cb) > 1e-12) return ca < cb;
    return lex_less(a, b);
  };
  std::vector<std::vector<int>> candidates;

  while (static_cast<int>(found.size()) < k) {
    const auto& prev = found.back();
    std::vector<NodeId> prev_nodes{i};
    for (int a : prev) prev_nodes.push_back(s.links[a].head);
    for (std::size_t spur = 0; spur < prev.size(); ++spur) {
      NodeId spur_node = prev_nodes[spur];
      std::vector<int> root(prev.begin(), prev.begin() + spur);
      std::set<int> banned_links;
      for (const auto& p : found)
        if (p.size() > spur && std::equal(root.begin(), root.end(), p.begin()))
          banned_links.insert(p[spur]);
      std::set<NodeId> banned_nodes(prev_nodes.begin(), prev_nodes.begin() + spur);
      std::vector<int> spur_links;
      if (!dijkstra(s, adj, m, spur_node, j, banned_links, banned_nodes, spur_links)) continue;
      std::vector<int> full = root;
      full.insert(full.end(), spur_links.begin(), spur_links.end());
      if (std::find(candidates.begin(), candidates.end(), full) == candidates.end() &&
          std::find(found.begin(), found.end(), full) == found.end())
        candidates.push_back(full);
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), cmp);
    found.push_back(*best);
    candidates.erase(best);
  }
  return found;
}

std::vector<Path> enumerate_pt(const Scenario& s, NodeId i, NodeId j, BaseMode m) {
  std::vector<Path> out;
  for (std::size_t li = 0; li < s.pt_lines.size(); ++li) {
    const auto& line = s.pt_lines[li];
    if (line.mode != m) continue;
    std::vector<NodeId> nodes{s.links[line.links.front()].tail};
    for (int a : line.links) nodes.push_back(s.links[a].head);
    for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
      if (nodes[pi] != i) continue;
      for (std::size_t pj = pi + 1; pj < nodes.size(); ++pj) {
        if (nodes[pj] != j) continue;
        std::vector<int> seg(line.links.begin() + pi, line.links.begin() + pj);
        out.push_back(make_simple(s, i, j, m, seg, static_cast<int>(li)));
      }
    }
  }
  return out;
}

bool is_simple(const Scenario& s, const Path& p) {
  std::set<NodeId> seen;
  for (NodeId n : p.node_seq(s))
    if (!seen.insert(n).second) return false;
  return true;
}

void sort_and_cap(const Scenario& s, std::vector<Path>& paths, int max_paths) {
  std::stable_sort(paths.begin(), paths.end(), [&](const Path& a, const Path& b) {
    double ca = freeflow_path_cost(s, a), cb = freeflow_path_cost(s, b);
    if (std::abs(ca - cb) > 1e-12) return ca < cb;
    return lex_less(a.all_links, b.all_links);
  });
  if (static_cast<int>(paths.size()) > max_paths) paths.resize(max_paths);
}

}  // namespace

Path compose_intermodal(const Scenario& s, const Path& p1, const Path& p2) {
  if (p1.dest != p2.origin) throw ModelError("legs do not meet at a common node");
  if (!s.transfers.count(p1.dest))
    throw ModelError("junction " + std::to_string(p1.dest) + " is not a transfer node");
  Path p;
  p.origin = p1.origin;
  p.dest = p2.dest;
  p.mode.legs = p1.mode.legs;
  p.mode.legs.insert(p.mode.legs.end(), p2.mode.legs.begin(), p2.mode.legs.end());
  p.legs = p1.legs;
  p.legs.insert(p.legs.end(), p2.legs.begin(), p2.legs.end());
  p.all_links = p1.all_links;
  p.all_links.insert(p.all_links.end(), p2.all_links.begin(), p2.all_links.end());
  p.length = p1.length + p2.length;
  for (const auto& leg : p.legs) {
    Subnet want = subnet_of(leg.mode);
    for (int a : leg.links)
      if (s.links[a].subnet != want)
        throw ModelError("leg mode " + to_string(leg.mode) + " illegal on " +
                         to_string(s.links[a].subnet) + " link");
  }
  return p;
}

std::vector<Path> enumerate_paths(const Scenario& s, NodeId i, NodeId j, const Mode& m,
                                  int max_paths, int max_transfers) {
  if (i == j) throw ModelError("degenerate OD (" + std::to_string(i) + "," + std::to_string(j) + ")");
  if (static_cast<int>(m.legs.size()) - 1 > max_transfers)
    throw ModelError("mode " + m.name() + " exceeds max_transfers");

  std::vector<Path> out;
  if (m.simple()) {
    BaseMode bm = m.base();
    if (is_pt(bm)) {
      out = enumerate_pt(s, i, j, bm);
    } else {
      for (auto& links : yen_ksp(s, bm, i, j, max_paths))
        out.push_back(make_simple(s, i, j, bm, std::move(links)));
    }
    if ((bm == BaseMode::CP || bm == BaseMode::CD) && s.toggles.carpool_min_distance > 0.0)
      std::erase_if(out, [&](const Path& p) { return p.length < s.toggles.carpool_min_distance; });
  } else {
    Mode head{{m.legs.front()}};
    Mode tail{std::vector<BaseMode>(m.legs.begin() + 1, m.legs.end())};
    for (NodeId t : std::set<NodeId>(s.transfers.begin(), s.transfers.end())) {
      if (t == i || t == j) continue;
      auto firsts = enumerate_paths(s, i, t, head, max_paths, max_transfers);
      if (firsts.empty()) continue;
      auto rests = enumerate_paths(s, t, j, tail, max_paths, max_transfers - 1);
      for (const auto& p1 : firsts)
        for (const auto& p2 : rests) {
          Path c = compose_intermodal(s, p1, p2);
          if (is_simple(s, c)) out.push_back(std::move(c));
        }
    }
  }
  std::erase_if(out, [&](const Path& p) { return !is_simple(s, p); });
  sort_and_cap(s, out, max_paths);
  return out;
}

int PathCatalog::insert(Path p) {
  auto key = std::make_tuple(p.origin, p.dest, p.mode.name());
  auto& bucket = by_key_[key];
  for (int id : bucket)
    if (paths_[id].key() == p.key()) return id;
  p.id = static_cast<int>(paths_.size());
  bucket.push_back(p.id);
  paths_.push_back(std::move(p));
  return paths_.back().id;
}

void PathCatalog::catalog_legs(Path& p) {
  for (auto& leg : p.legs) {
    Path lp = make_simple(*scenario_, leg.links.empty() ? p.origin : scenario_->links[leg.links.front()].tail,
                          leg.links.empty() ? p.dest : scenario_->links[leg.links.back()].head, leg.mode,
                          leg.links, leg.pt_line);
    leg.path_id = insert(std::move(lp));
  }
}

const std::vector<int>& PathCatalog::paths_for(NodeId o, NodeId d, const std::string& mode_name) const {
  static const std::vector<int> empty;
  auto it = by_key_.find(std::make_tuple(o, d, mode_name));
  return it == by_key_.end() ? empty : it->second;
}

int PathCatalog::find_by_links(NodeId o, NodeId d, const std::string& mode_name,
                               const std::vector<int>& links) const {
  for (int id : paths_for(o, d, mode_name))
    if (paths_[id].all_links == links) return id;
  return -1;
}

std::vector<int> PathCatalog::slice(const Scenario& s, const Path& p, NodeId r, NodeId ss) {
  auto nodes = p.node_seq(s);
  auto ir = std::find(nodes.begin(), nodes.end(), r);
  auto is = std::find(nodes.begin(), nodes.end(), ss);
  if (ir == nodes.end() || is == nodes.end() || is <= ir) return {};
  std::size_t a = ir - nodes.begin(), b = is - nodes.begin();
  return std::vector<int>(p.all_links.begin() + a, p.all_links.begin() + b);
}

namespace {

bool contiguous_subseq(const std::vector<int>& needle, const std::vector<int>& hay) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

// Merges two passenger ride paths into one carrier path: the second pickup
// must lie on the first ride and the overlap must agree link-for-link, so the
// passengers share at least one link. Returns false when incompatible.
bool merge_rides(const Scenario& s, const Path& first, const Path& second, std::vector<int>& merged) {
  auto nodes = first.node_seq(s);
  auto it = std::find(nodes.begin(), nodes.end(), second.origin);
  if (it == nodes.end()) return false;
  std::size_t k = it - nodes.begin();
  std::size_t tail_len = first.all_links.size() - k;
  if (tail_len == 0) return false;
  std::size_t common = std::min(tail_len, second.all_links.size());
  if (!std::equal(first.all_links.begin() + k, first.all_links.begin() + k + common,
                  second.all_links.begin()))
    return false;
  merged = first.all_links;
  for (std::size_t x = common; x < second.all_links.size(); ++x) merged.push_back(second.all_links[x]);
  return true;
}

}  // namespace

std::vector<int> PathCatalog::superpaths_containing(const Path& p, NodeId r, NodeId s,
                                                    const std::string& mode_name) const {
  std::vector<int> out;
  for (int id : paths_for(r, s, mode_name))
    if (contiguous_subseq(p.all_links, paths_[id].all_links)) out.push_back(id);
  return out;
}

std::vector<int> PathCatalog::subpaths_of(const Path& p, NodeId r, NodeId s,
                                          const std::string& mode_name) const {
  std::vector<int> out;
  for (int id : paths_for(r, s, mode_name))
    if (contiguous_subseq(paths_[id].all_links, p.all_links)) out.push_back(id);
  return out;
}

PathCatalog PathCatalog::build(const Scenario& s) {
  PathCatalog cat;
  cat.scenario_ = &s;

  // Door-to-door enumeration per demanded OD and enabled mode; independent
  // tasks run on the worker pool, results merge in deterministic order.
  struct Task {
    NodeId o, d;
    Mode mode;
  };
  std::vector<Task> tasks;
  for (const auto& [od, q] : s.demand) {
    if (q <= 0 || od.first == od.second) continue;
    for (const auto& m : s.toggles.modes) tasks.push_back({od.first, od.second, m});
  }
  std::vector<std::vector<Path>> results(tasks.size());
  parallel::for_index(tasks.size(), [&](std::size_t t) {
    results[t] =
        enumerate_paths(s, tasks[t].o, tasks[t].d, tasks[t].mode, s.toggles.max_paths, s.toggles.max_transfers);
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    OdMode om{tasks[t].o, tasks[t].d, tasks[t].mode, {}};
    for (Path& p : results[t]) {
      cat.catalog_legs(p);
      om.path_ids.push_back(cat.insert(std::move(p)));
    }
    cat.od_modes_.push_back(std::move(om));
  }

  // Ridesharing vehicle paths: merge every compatible pair of passenger ride
  // paths so the matching variables have a cataloged carrier path.
  if (s.toggles.enabled(BaseMode::RS)) {
    auto uses = rs_ride_uses(s, cat);
    std::vector<int> rides;
    for (const auto& u : uses) rides.push_back(u.ride_path);
    for (std::size_t ia = 0; ia < rides.size(); ++ia)
      for (std::size_t ib = ia; ib < rides.size(); ++ib)
        for (int order = 0; order < 2; ++order) {
          if (order == 1 && rides[ia] == rides[ib]) continue;
          const Path& first = cat.path(order == 0 ? rides[ia] : rides[ib]);
          const Path& second = cat.path(order == 0 ? rides[ib] : rides[ia]);
          std::vector<int> merged;
          if (!merge_rides(s, first, second, merged)) continue;
          NodeId md = s.links[merged.back()].head;
          Path veh = make_simple(s, first.origin, md, BaseMode::RS, merged);
          if (!is_simple(s, veh)) continue;
          cat.insert(std::move(veh));
        }
  }

  // Empty-vehicle repositioning paths (e-hailing path rules) plus an idle
  // loop per node so parked fleet vehicles need no road movement.
  if (s.fleet_active()) {
    std::set<NodeId> hubs(s.origins.begin(), s.origins.end());
    hubs.insert(s.destinations.begin(), s.destinations.end());
    hubs.insert(s.transfers.begin(), s.transfers.end());
    for (NodeId u : hubs)
      for (NodeId v : hubs) {
        if (u == v) continue;
        for (auto& links : yen_ksp(s, BaseMode::EH, u, v, s.toggles.max_paths)) {
          Path p = make_simple(s, u, v, BaseMode::EH, std::move(links));
          if (!is_simple(s, p)) continue;
          p.id = static_cast<int>(cat.paths_.size());
          cat.by_key_[{u, v, "e"}].push_back(p.id);
          cat.paths_.push_back(std::move(p));
        }
      }
    for (NodeId u : hubs) {
      Path idle = make_simple(s, u, u, BaseMode::EH, {});
      idle.id = static_cast<int>(cat.paths_.size());
      cat.by_key_[{u, u, "e"}].push_back(idle.id);
      cat.paths_.push_back(std::move(idle));
    }
  }
  return cat;
}

std::vector<CdStopCandidate> cd_stop_candidates(const Scenario& s, const PathCatalog& cat) {
  std::vector<CdStopCandidate> out;
  if (!s.toggles.enabled(BaseMode::CD)) return out;

  // Ride paths a stopping driver may serve: door-to-door CP paths of demanded
  // ODs, plus CP legs of demanded intermodal paths.
  std::set<int> usable;
  for (const auto& om : cat.od_modes()) {
    if (om.mode.simple() && om.mode.base() == BaseMode::CP)
      usable.insert(om.path_ids.begin(), om.path_ids.end());
    if (!om.mode.simple())
      for (int pid : om.path_ids)
        for (const auto& leg : cat.path(pid).legs)
          if (leg.mode == BaseMode::CP) usable.insert(leg.path_id);
  }

  for (const auto& om : cat.od_modes()) {
    if (!(om.mode.simple() && om.mode.base() == BaseMode::CD)) continue;
    for (int pid : om.path_ids) {
      const Path& drv = cat.path(pid);
      auto nodes = drv.node_seq(s);
      for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
          std::vector<int> sub(drv.all_links.begin() + a, drv.all_links.begin() + b);
          int ride = cat.find_by_links(nodes[a], nodes[b], "CP", sub);
          if (ride < 0 || !usable.count(ride)) continue;
          out.push_back({pid, nodes[a], nodes[b], ride});
        }
    }
  }
  return out;
}

std::vector<RsRideUse> rs_ride_uses(const Scenario& s, const PathCatalog& cat) {
  std::map<int, RsRideUse> uses;
  for (const auto& om : cat.od_modes()) {
    if (om.mode.simple() && om.mode.base() == BaseMode::RS)
      for (int pid : om.path_ids) {
        uses[pid].ride_path = pid;
        uses[pid].door_paths.push_back(pid);
      }
    if (!om.mode.simple())
      for (int pid : om.path_ids)
        for (const auto& leg : cat.path(pid).legs)
          if (leg.mode == BaseMode::RS) {
            uses[leg.path_id].ride_path = leg.path_id;
            uses[leg.path_id].intermodal_paths.push_back(pid);
          }
  }
  std::vector<RsRideUse> out;
  for (auto& [_, u] : uses) out.push_back(std::move(u));
  return out;
}

std::vector<RsPairCandidate> rs_pair_candidates(const Scenario& s, const PathCatalog& cat,
                                                const std::vector<RsRideUse>& uses) {
  std::vector<RsPairCandidate> out;
  std::vector<int> rides;
  for (const auto& u : uses) rides.push_back(u.ride_path);

  auto position_of = [&](const Path& veh, NodeId n) {
    auto seq = veh.node_seq(s);
    auto it = std::find(seq.begin(), seq.end(), n);
    return it == seq.end() ? -1 : static_cast<int>(it - seq.begin());
  };

  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t ia = 0; ia < rides.size(); ++ia)
    for (std::size_t ib = ia; ib < rides.size(); ++ib)
      for (int order = 0; order < 2; ++order) {
        if (order == 1 && rides[ia] == rides[ib]) continue;
        const Path& first = cat.path(order == 0 ? rides[ia] : rides[ib]);
        const Path& second = cat.path(order == 0 ? rides[ib] : rides[ia]);
        std::vector<int> merged;
        if (!merge_rides(s, first, second, merged)) continue;
        NodeId md = s.links[merged.back()].head;
        int veh = cat.find_by_links(first.origin, md, "RS", merged);
        if (veh < 0) continue;
        int ra = std::min(rides[ia], rides[ib]);
        int rb = std::max(rides[ia], rides[ib]);
        if (!seen.insert({veh, ra, rb}).second) continue;
        RsPairCandidate cand;
        cand.vehicle_path = veh;
        cand.ride_a = ra;
        cand.ride_b = rb;
        // Interior stops in visit order: second pickup then earlier drop-off.
        const Path& vp = cat.path(veh);
        cand.mid1 = second.origin;
        cand.mid2 = position_of(vp, first.dest) <= position_of(vp, second.dest) ? first.dest
                                                                                : second.dest;
        out.push_back(cand);
      }
  std::stable_sort(out.begin(), out.end(), [](const RsPairCandidate& x, const RsPairCandidate& y) {
    return std::tie(x.vehicle_path, x.ride_a, x.ride_b) < std::tie(y.vehicle_path, y.ride_a, y.ride_b);
  });
  return out;
}

}  // namespace mta
