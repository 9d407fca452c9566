#include "mta/costs.hpp"

#include <cmath>

namespace mta {

double link_travel_time(const Scenario& s, const Link& l, double total_flow) {
  if (l.subnet == Subnet::RN)
    return l.t0 * (1.0 + s.params.eta * std::pow(total_flow / l.capacity, s.params.beta));
  return l.length / s.params.Sp(l.subnet);
}

double beckmann_link_integral(const Scenario& s, const Link& l, double x) {
  const double a = s.params.alpha;
  if (l.subnet != Subnet::RN) return a * (l.length / s.params.Sp(l.subnet)) * x;
  const double b = s.params.beta;
  return a * l.t0 * (x + s.params.eta * std::pow(x, b + 1.0) / ((b + 1.0) * std::pow(l.capacity, b)));
}

double waiting_time(const Scenario& s, BaseMode m, bool leg_origin, double q_m, int pt_line) {
  if (!leg_origin) return 0.0;
  if (is_pt(m)) {
    double freq = pt_line >= 0 ? s.pt_lines[pt_line].frequency : 0.0;
    return freq > 0 ? 1.0 / (2.0 * freq) : 0.0;
  }
  if (is_sms(m)) return q_m / s.params.R(m);
  return 0.0;
}

double service_time(const Scenario& s, BaseMode m, bool leg_origin, bool leg_dest) {
  const auto& p = s.params;
  switch (m) {
    case BaseMode::walk: return 0.0;
    case BaseMode::bus:
    case BaseMode::metro: return p.S(m);
    case BaseMode::CP:
    case BaseMode::RS:
    case BaseMode::EH: return p.S(m) * (leg_origin + leg_dest);
    case BaseMode::CD: return p.S(m) * (leg_origin + leg_dest) + p.P(m) * leg_dest;
    case BaseMode::car:
    case BaseMode::bike: return p.P(m) * leg_dest;
  }
  return 0.0;
}

double monetary_cost(const Scenario& s, BaseMode m, const Link& l, bool, bool leg_dest) {
  const auto& p = s.params;
  switch (m) {
    case BaseMode::car: return p.gamma * l.length + p.PF(m) * leg_dest;
    case BaseMode::bus:
    case BaseMode::metro:
    case BaseMode::CP:
    case BaseMode::EH:
    case BaseMode::RS: return p.TF(m);
    case BaseMode::CD: return p.gamma * l.length + p.PF(m) * leg_dest - p.TF(m);
    case BaseMode::walk:
    case BaseMode::bike: return 0.0;
  }
  return 0.0;
}

FlowState FlowState::zero(const Scenario& s) {
  FlowState st;
  st.link_flow.assign(s.links.size(), 0.0);
  // Scheduled PT units run regardless of ridership.
  for (std::size_t a = 0; a < s.links.size(); ++a)
    st.link_flow[a] = s.pt_units_on_link(static_cast<int>(a));
  return st;
}

GeneralizedPathCost generalized_path_cost(const Scenario& s, const Path& p, const FlowState& st,
                                          Principle principle) {
  GeneralizedPathCost out;
  for (const auto& pos : link_positions(p)) {
    const Leg& leg = p.legs[pos.leg];
    const Link& l = s.links[pos.link];
    double x = pos.link < static_cast<int>(st.link_flow.size()) ? st.link_flow[pos.link] : 0.0;
    out.time += link_travel_time(s, l, x);
    out.time += waiting_time(s, leg.mode, pos.leg_origin, st.q(leg.mode), leg.pt_line);
    out.time += service_time(s, leg.mode, pos.leg_origin, pos.leg_dest);
    out.money += monetary_cost(s, leg.mode, l, pos.leg_origin, pos.leg_dest);
  }
  if (principle == Principle::UE) {
    for (const auto& leg : p.legs)
      if (is_sms(leg.mode))
        out.delay += s.params.alpha * st.q(leg.mode) / s.params.R(leg.mode);
  }
  out.total = s.params.alpha * out.time + out.money + out.delay;
  return out;
}

double freeflow_path_cost(const Scenario& s, const Path& p) {
  return generalized_path_cost(s, p, FlowState::zero(s), Principle::SO).total;
}

}  // namespace mta
