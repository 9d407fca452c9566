#include "mta/program.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mta {

int MathProgram::add_var(const std::string& name, double lb, double ub, bool integer, double obj,
                         int bound_family, VarInfo info) {
  if (!(lb <= ub)) throw ModelError("variable " + name + " has empty bound range");
  if (!std::isfinite(lb) || !std::isfinite(ub))
    throw ModelError("variable " + name + " must have finite bounds");
  Variable v;
  v.name = name;
  v.lb = lb;
  v.ub = ub;
  v.integer = integer && integer_mode;
  v.obj = obj;
  v.bound_family = bound_family;
  v.info = info;
  vars.push_back(std::move(v));
  return static_cast<int>(vars.size()) - 1;
}

int MathProgram::add_row(const std::string& name, Sense sense, double rhs,
                         std::vector<std::pair<int, double>> terms, std::vector<int> families,
                         int defines_var) {
  // Merge duplicate variables and drop zeros so the matrix is canonical.
  std::sort(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (auto& [v, c] : terms) {
    if (!merged.empty() && merged.back().first == v)
      merged.back().second += c;
    else
      merged.push_back({v, c});
  }
  std::erase_if(merged, [](auto& t) { return t.second == 0.0; });
  Constraint row;
  row.name = name;
  row.sense = sense;
  row.rhs = rhs;
  row.terms = std::move(merged);
  row.families = std::move(families);
  row.defines_var = defines_var;
  rows.push_back(std::move(row));
  return static_cast<int>(rows.size()) - 1;
}

bool MathProgram::has_family(int f) const {
  for (const auto& r : rows)
    if (std::find(r.families.begin(), r.families.end(), f) != r.families.end()) return true;
  for (const auto& v : vars)
    if (v.bound_family == f) return true;
  return false;
}

std::vector<int> MathProgram::family_ids() const {
  std::set<int> ids;
  for (const auto& r : rows) ids.insert(r.families.begin(), r.families.end());
  for (const auto& v : vars)
    if (v.bound_family > 0) ids.insert(v.bound_family);
  return {ids.begin(), ids.end()};
}

std::vector<PwlCut> power_chords(double beta, double xmax, int K) {
  if (K < 2) throw ModelError("piecewise approximation needs at least 2 segments");
  if (!(xmax > 0)) throw ModelError("piecewise approximation needs xmax > 0");
  std::vector<PwlCut> cuts;
  const double p = beta + 1.0;
  double step = xmax / K;
  for (int k = 0; k < K; ++k) {
    double x0 = k * step, x1 = (k + 1) * step;
    double g0 = std::pow(x0, p), g1 = std::pow(x1, p);
    PwlCut c;
    c.slope = (g1 - g0) / (x1 - x0);
    c.intercept = g0 - c.slope * x0;
    cuts.push_back(c);
  }
  return cuts;
}

double pwl_value(const std::vector<PwlCut>& cuts, double x) {
  double best = 0.0;
  for (const auto& c : cuts) best = std::max(best, c.slope * x + c.intercept);
  return best;
}

double pwl_max_gap(double beta, double xmax, int K) {
  // Chord gap of x^(beta+1) is largest on the final segment; sample densely.
  auto cuts = power_chords(beta, xmax, K);
  const double p = beta + 1.0;
  double worst = 0.0;
  const int samples = 512;
  for (int i = 0; i <= samples; ++i) {
    double x = xmax * i / samples;
    worst = std::max(worst, pwl_value(cuts, x) - std::pow(x, p));
  }
  return worst;
}

int linearize_bpr_integral(MathProgram& mp, const Scenario& s, int link, int total_flow_var,
                           int K, double xmax, Principle principle) {
  const Link& l = s.links[link];
  if (l.subnet != Subnet::RN) throw ModelError("congestion term only applies to road links");
  const double beta = s.params.beta;
  // UE integrates the volume-delay curve, SO prices it at the margin.
  double denom = principle == Principle::UE ? (beta + 1.0) * std::pow(l.capacity, beta)
                                            : std::pow(l.capacity, beta);
  double coef = s.params.alpha * l.t0 * s.params.eta / denom;
  mp.vars[total_flow_var].obj += s.params.alpha * l.t0;

  // The epigraph variable carries xmax * (x/xmax)^(beta+1); its cut slopes
  // stay in [0, beta+1] so the matrix is well conditioned for any flow range.
  double scale = std::pow(xmax, beta);
  int y = mp.add_var("ypwl_" + std::to_string(link), 0.0, xmax, false, coef * scale, 0,
                     {VarKind::PwlEpigraph, link, -1, 0, 0, ""});
  if (coef > 0.0) {
    auto cuts = power_chords(beta, 1.0, K);
    for (std::size_t k = 0; k < cuts.size(); ++k)
      mp.add_row("pwl_" + std::to_string(link) + "_" + std::to_string(k), Sense::GE,
                 cuts[k].intercept * xmax, {{y, 1.0}, {total_flow_var, -cuts[k].slope}}, {100});
    mp.pwl_gap_bound += coef * scale * pwl_max_gap(beta, 1.0, K) * xmax;
  }
  return y;
}

int linearize_bilinear_product(MathProgram& mp, int q_var, int x_var, long long q_ub,
                               double x_ub, double obj_coef, const std::string& tag) {
  if (q_ub < 0 || !(x_ub >= 0)) throw ModelError("product factors must be bounded");
  if (!mp.integer_mode) {
    mp.bilinear.push_back({q_var, x_var, obj_coef});
    return -1;
  }
  int bits = 1;
  while ((1LL << bits) <= q_ub) ++bits;
  int z = mp.add_var("z_" + tag, 0.0, static_cast<double>(q_ub) * x_ub, false, obj_coef, 0,
                     {VarKind::Product, -1, -1, 0, 0, tag});
  std::vector<std::pair<int, double>> digit_sum{{q_var, -1.0}};
  std::vector<std::pair<int, double>> weighted{{z, -1.0}};
  for (int k = 0; k < bits; ++k) {
    double w = static_cast<double>(1LL << k);
    int b = mp.add_var("b_" + tag + "_" + std::to_string(k), 0.0, 1.0, true, 0.0, 0,
                       {VarKind::ExpansionBit, k, -1, 0, 0, tag});
    int wk = mp.add_var("w_" + tag + "_" + std::to_string(k), 0.0, x_ub, false, 0.0, 0,
                        {VarKind::BitProduct, k, -1, 0, 0, tag});
    digit_sum.push_back({b, w});
    weighted.push_back({wk, w});
    mp.add_row("prod_" + tag + "_" + std::to_string(k) + "_a", Sense::LE, 0.0,
               {{wk, 1.0}, {b, -x_ub}}, {102});
    mp.add_row("prod_" + tag + "_" + std::to_string(k) + "_b", Sense::LE, 0.0,
               {{wk, 1.0}, {x_var, -1.0}}, {102});
    mp.add_row("prod_" + tag + "_" + std::to_string(k) + "_c", Sense::GE, -x_ub,
               {{wk, 1.0}, {x_var, -1.0}, {b, -x_ub}}, {102});
  }
  mp.add_row("digits_" + tag, Sense::EQ, 0.0, digit_sum, {102});
  mp.add_row("prodsum_" + tag, Sense::EQ, 0.0, weighted, {102}, z);
  if (q_var == x_var) {
    // Redundant tangent cuts of the square keep the relaxation close to the
    // convex envelope; the digit system alone admits far smaller products.
    long long cuts = std::min<long long>(q_ub, 192);
    for (long long k = 0; k <= cuts; ++k) {
      double at = static_cast<double>(q_ub) * k / cuts;
      mp.add_row("sq_" + tag + "_" + std::to_string(k), Sense::GE, -at * at,
                 {{z, 1.0}, {q_var, -2.0 * at}}, {102});
    }
  }
  return z;
}

std::string program_hash(const MathProgram& mp) {
  Fnv64 h;
  h.feed(mp.principle == Principle::UE ? "UE" : "SO");
  for (const auto& v : mp.vars) {
    h.feed(v.name);
    h.feed(format_double(v.lb));
    h.feed(format_double(v.ub));
    h.feed(v.integer ? "I" : "C");
    h.feed(format_double(v.obj));
  }
  for (const auto& r : mp.rows) {
    h.feed(r.name);
    char s = static_cast<char>(r.sense);
    h.feed(&s, 1);
    h.feed(format_double(r.rhs));
    for (auto& [v, c] : r.terms) {
      h.feed(mp.vars[v].name);
      h.feed(format_double(c));
    }
  }
  h.feed(format_double(mp.obj_offset));
  return h.hex();
}

}  // namespace mta
