#include "mta/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <queue>

#include "mta/simplex.hpp"

namespace mta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integral_value(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

// Reduced problem after substituting out definitional variables whose bounds
// are implied by the defining expression.
struct Presolved {
  const MathProgram* mp = nullptr;
  std::vector<int> keep;             // reduced index -> original var
  std::vector<int> reduced_of;       // original var -> reduced index or -1
  struct Sub {                       // original var = const + sum coef * original var
    int var;
    double constant;
    std::vector<std::pair<int, double>> terms;
  };
  std::vector<Sub> subs;             // in elimination order
  std::vector<int> row_of;           // reduced row -> original row
  Eigen::MatrixXd a;
  Eigen::VectorXd cost, lb, ub, rhs;
  std::vector<char> sense;
  double obj_offset = 0.0;
  std::vector<int> int_vars;         // reduced indices

  void expand(std::vector<double>& values) const {
    for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
      double v = it->constant;
      for (auto& [j, c] : it->terms) v += c * values[j];
      values[it->var] = v;
    }
  }
};

Presolved presolve(const MathProgram& mp) {
  Presolved ps;
  ps.mp = &mp;
  int n = static_cast<int>(mp.vars.size());
  std::vector<char> eliminated(n, 0);
  std::vector<char> row_dropped(mp.rows.size(), 0);

  // Working copy of rows as maps for substitution.
  struct Row {
    std::map<int, double> terms;
    double rhs;
  };
  std::vector<Row> rows(mp.rows.size());
  for (std::size_t r = 0; r < mp.rows.size(); ++r) {
    rows[r].rhs = mp.rows[r].rhs;
    for (auto& [v, c] : mp.rows[r].terms) rows[r].terms[v] += c;
  }
  std::vector<double> obj(n);
  for (int j = 0; j < n; ++j) obj[j] = mp.vars[j].obj;
  ps.obj_offset = mp.obj_offset;

  std::vector<std::vector<int>> var_rows(n);
  for (std::size_t r = 0; r < mp.rows.size(); ++r)
    for (auto& [v, c] : rows[r].terms) var_rows[v].push_back(static_cast<int>(r));

  for (std::size_t r = 0; r < mp.rows.size(); ++r) {
    int dv = mp.rows[r].defines_var;
    if (dv < 0 || eliminated[dv] || mp.rows[r].sense != Sense::EQ) continue;
    auto it = rows[r].terms.find(dv);
    if (it == rows[r].terms.end() || std::abs(std::abs(it->second) - 1.0) > 1e-12) continue;

    // dv = (rhs - rest) / coef with coef = +-1.
    double coef = it->second;
    double constant = rows[r].rhs / coef;
    std::vector<std::pair<int, double>> expr;
    bool ok = true;
    double lo = constant, hi = constant;
    bool integral = constant == std::floor(constant);
    for (auto& [v, c] : rows[r].terms) {
      if (v == dv) continue;
      if (eliminated[v]) {
        ok = false;
        break;
      }
      double ec = -c / coef;
      expr.push_back({v, ec});
      lo += ec > 0 ? ec * mp.vars[v].lb : ec * mp.vars[v].ub;
      hi += ec > 0 ? ec * mp.vars[v].ub : ec * mp.vars[v].lb;
      if (!(mp.vars[v].integer && ec == std::floor(ec))) integral = false;
    }
    if (!ok) continue;
    // Bounds of dv must be implied, and integrality must be inherited.
    if (lo < mp.vars[dv].lb - 1e-9 || hi > mp.vars[dv].ub + 1e-9) continue;
    if (mp.vars[dv].integer && !integral) continue;

    eliminated[dv] = 1;
    row_dropped[r] = 1;
    ps.subs.push_back({dv, constant, expr});

    // Substitute into every other row and the objective.
    for (int rr : var_rows[dv]) {
      if (rr == static_cast<int>(r) || row_dropped[rr]) continue;
      auto jt = rows[rr].terms.find(dv);
      if (jt == rows[rr].terms.end()) continue;
      double mult = jt->second;
      rows[rr].terms.erase(jt);
      rows[rr].rhs -= mult * constant;
      for (auto& [v, c] : expr) {
        rows[rr].terms[v] += mult * c;
        var_rows[v].push_back(rr);
      }
    }
    if (obj[dv] != 0.0) {
      ps.obj_offset += obj[dv] * constant;
      for (auto& [v, c] : expr) obj[v] += obj[dv] * c;
      obj[dv] = 0.0;
    }
  }

  ps.reduced_of.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (eliminated[j]) continue;
    ps.reduced_of[j] = static_cast<int>(ps.keep.size());
    ps.keep.push_back(j);
  }
  for (std::size_t r = 0; r < mp.rows.size(); ++r) {
    if (row_dropped[r]) continue;
    bool empty = true;
    for (auto& [v, c] : rows[r].terms)
      if (c != 0.0) empty = false;
    if (empty) continue;
    ps.row_of.push_back(static_cast<int>(r));
  }

  int rn = static_cast<int>(ps.keep.size());
  int rm = static_cast<int>(ps.row_of.size());
  ps.a.setZero(rm, rn);
  ps.rhs.resize(rm);
  ps.sense.resize(rm);
  for (int i = 0; i < rm; ++i) {
    const auto& row = rows[ps.row_of[i]];
    ps.rhs(i) = row.rhs;
    ps.sense[i] = static_cast<char>(mp.rows[ps.row_of[i]].sense);
    for (auto& [v, c] : row.terms)
      if (ps.reduced_of[v] >= 0) ps.a(i, ps.reduced_of[v]) = c;
  }
  ps.cost.resize(rn);
  ps.lb.resize(rn);
  ps.ub.resize(rn);
  for (int j = 0; j < rn; ++j) {
    const auto& v = mp.vars[ps.keep[j]];
    ps.cost(j) = obj[ps.keep[j]];
    ps.lb(j) = v.lb;
    ps.ub(j) = v.ub;
    if (v.integer) ps.int_vars.push_back(j);
  }
  return ps;
}

struct LpProblem {
  BoundedSimplex lp;
  int n = 0;

  void init(const Presolved& ps) {
    n = static_cast<int>(ps.keep.size());
    int m = static_cast<int>(ps.row_of.size());
    Eigen::VectorXd lb(n + m), ub(n + m);
    lb.head(n) = ps.lb;
    ub.head(n) = ps.ub;
    for (int i = 0; i < m; ++i) {
      switch (ps.sense[i]) {
        case 'L': lb(n + i) = 0.0; ub(n + i) = kInf; break;
        case 'G': lb(n + i) = -kInf; ub(n + i) = 0.0; break;
        default: lb(n + i) = 0.0; ub(n + i) = 0.0; break;
      }
    }
    lp.setup(ps.a, ps.cost, lb, ub, ps.rhs);
  }
};

Solution finish(const MathProgram& mp, const Presolved& ps, SolveStatus status,
                const std::vector<double>& reduced, double obj, double bound, long long nodes,
                double secs) {
  Solution sol;
  sol.status = status;
  sol.objective = obj;
  sol.best_bound = bound;
  sol.nodes = nodes;
  sol.wall_seconds = secs;
  if (status == SolveStatus::Optimal || status == SolveStatus::Feasible) {
    sol.values.assign(mp.vars.size(), 0.0);
    for (std::size_t j = 0; j < ps.keep.size(); ++j) sol.values[ps.keep[j]] = reduced[j];
    ps.expand(sol.values);
    double denom = std::max(1.0, std::abs(obj));
    sol.gap = std::max(0.0, (obj - bound) / denom);
  }
  return sol;
}

}  // namespace

double max_constraint_violation(const MathProgram& mp, const std::vector<double>& values) {
  double worst = 0.0;
  bool integral = true;
  for (double v : values)
    if (v != std::floor(v)) integral = false;
  for (const auto& row : mp.rows) {
    bool exact = integral && row.rhs == std::floor(row.rhs);
    if (exact)
      for (auto& [v, c] : row.terms)
        if (c != std::floor(c)) exact = false;
    double resid;
    if (exact) {
      long long acc = -static_cast<long long>(row.rhs);
      for (auto& [v, c] : row.terms) acc += static_cast<long long>(c) * static_cast<long long>(values[v]);
      resid = static_cast<double>(acc);
    } else {
      double acc = -row.rhs;
      for (auto& [v, c] : row.terms) acc += c * values[v];
      resid = acc;
    }
    switch (row.sense) {
      case Sense::LE: worst = std::max(worst, resid); break;
      case Sense::GE: worst = std::max(worst, -resid); break;
      case Sense::EQ: worst = std::max(worst, std::abs(resid)); break;
    }
  }
  for (std::size_t j = 0; j < mp.vars.size(); ++j) {
    worst = std::max(worst, mp.vars[j].lb - values[j]);
    worst = std::max(worst, values[j] - mp.vars[j].ub);
  }
  return worst;
}

Solution solve_lp_relaxation(const MathProgram& mp, const SolverOptions& opts) {
  if (!mp.bilinear.empty())
    throw ModelError("program carries declared bilinear terms; solve the integer build instead");
  auto t0 = std::chrono::steady_clock::now();
  Presolved ps = presolve(mp);
  LpProblem prob;
  prob.init(ps);
  LpStatus st = prob.lp.primal_solve();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (st == LpStatus::Infeasible)
    return finish(mp, ps, SolveStatus::Infeasible, {}, 0, 0, 0, secs);
  if (st == LpStatus::Unbounded)
    return finish(mp, ps, SolveStatus::Unbounded, {}, 0, 0, 0, secs);
  if (st == LpStatus::IterLimit) return finish(mp, ps, SolveStatus::Limit, {}, 0, 0, 0, secs);
  std::vector<double> vals(ps.keep.size());
  for (std::size_t j = 0; j < ps.keep.size(); ++j) vals[j] = prob.lp.value(static_cast<int>(j));
  double obj = prob.lp.objective() + ps.obj_offset;
  return finish(mp, ps, SolveStatus::Optimal, vals, obj, obj, 0, secs);
}

Solution branch_and_bound(const MathProgram& mp, const SolverOptions& opts) {
  if (!mp.bilinear.empty())
    throw ModelError("program carries declared bilinear terms; solve the integer build instead");
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  Presolved ps = presolve(mp);
  LpProblem prob;
  prob.init(ps);

  struct Node {
    double bound;
    long long seq;
    std::vector<std::pair<int, std::pair<double, double>>> changes;  // var -> (lb, ub)
    BoundedSimplex::BasisSnapshot basis;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  // Root solve.
  LpStatus st = prob.lp.primal_solve();
  if (st == LpStatus::Infeasible) return finish(mp, ps, SolveStatus::Infeasible, {}, 0, 0, 1, elapsed());
  if (st == LpStatus::Unbounded) return finish(mp, ps, SolveStatus::Unbounded, {}, 0, 0, 1, elapsed());
  if (st == LpStatus::IterLimit) return finish(mp, ps, SolveStatus::Limit, {}, 0, 0, 1, elapsed());

  double incumbent_obj = kInf;
  std::vector<double> incumbent;
  long long node_count = 0, seq = 0;
  double root_bound = prob.lp.objective();

  Node root;
  root.bound = root_bound;
  root.seq = seq++;
  root.basis = prob.lp.snapshot();
  open.push(std::move(root));

  SolveStatus final_status = SolveStatus::Optimal;
  std::vector<std::pair<int, std::pair<double, double>>> base_bounds;
  for (std::size_t j = 0; j < ps.keep.size(); ++j)
    base_bounds.push_back({static_cast<int>(j), {ps.lb(j), ps.ub(j)}});

  auto best_open_bound = [&]() {
    double b = incumbent_obj;
    if (!open.empty()) b = std::min(b, open.top().bound);
    return b;
  };

  while (!open.empty()) {
    if (node_count >= opts.node_limit || elapsed() > opts.time_limit) {
      final_status = incumbent.empty() ? SolveStatus::Limit : SolveStatus::Feasible;
      break;
    }
    Node node = open.top();
    open.pop();
    double denom = std::max(1.0, std::abs(incumbent_obj));
    if (!incumbent.empty() && node.bound >= incumbent_obj - opts.gap_tol * denom) continue;

    // Apply node bounds on top of the base ones.
    for (auto& [j, b] : base_bounds) prob.lp.set_bounds(j, b.first, b.second);
    bool conflict = false;
    for (auto& [j, b] : node.changes) {
      double lo = std::max(prob.lp.lower(j), b.first);
      double hi = std::min(prob.lp.upper(j), b.second);
      if (lo > hi) conflict = true;
      prob.lp.set_bounds(j, lo, hi);
    }
    if (conflict) continue;
    prob.lp.restore(node.basis);

    // Dive depth-first from this node while the subproblem stays promising.
    bool first = true;
    while (true) {
      ++node_count;
      if (node_count >= opts.node_limit || elapsed() > opts.time_limit) {
        final_status = incumbent.empty() ? SolveStatus::Limit : SolveStatus::Feasible;
        break;
      }
      LpStatus lst = first && node.seq == 0 ? LpStatus::Optimal : prob.lp.dual_resolve();
      if (lst == LpStatus::IterLimit) {
        ++prob.lp.dual_restarts;
        lst = prob.lp.primal_solve();  // numerical restart
      }
      if (const char* dbg = std::getenv("MTA_BB_TRACE"); dbg && node_count % 50 == 0)
        std::fprintf(stderr, "node %lld iters %d restarts %lld inc %.4f\n", node_count,
                     prob.lp.iterations(), prob.lp.dual_restarts, incumbent_obj);
      first = false;
      if (lst == LpStatus::IterLimit) {
        final_status = incumbent.empty() ? SolveStatus::Limit : SolveStatus::Feasible;
        break;
      }
      if (lst == LpStatus::Infeasible) break;
      double obj = prob.lp.objective();
      double dn = std::max(1.0, std::abs(incumbent_obj));
      if (!incumbent.empty() && obj >= incumbent_obj - opts.gap_tol * dn) break;

      // Most fractional integer variable, ties by lowest index.
      int branch_var = -1;
      double best_frac = opts.int_tol;
      for (int j : ps.int_vars) {
        double v = prob.lp.value(j);
        double frac = std::abs(v - std::round(v));
        if (frac > best_frac + 1e-12) {
          best_frac = frac;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        // Integer feasible: candidate incumbent, objective on rounded values.
        std::vector<double> vals(ps.keep.size());
        double rounded_obj = 0.0;
        for (std::size_t j = 0; j < ps.keep.size(); ++j) {
          double v = prob.lp.value(static_cast<int>(j));
          vals[j] = mp.vars[ps.keep[j]].integer ? std::round(v) : v;
          rounded_obj += ps.cost(j) * vals[j];
        }
        if (rounded_obj < incumbent_obj - 1e-12) {
          incumbent_obj = rounded_obj;
          incumbent = vals;
        }
        break;
      }

      double v = prob.lp.value(branch_var);
      double fl = std::floor(v + opts.int_tol);
      // Up child goes to the queue, down child is explored immediately.
      Node up;
      up.bound = obj;
      up.seq = seq++;
      up.changes = node.changes;
      up.changes.push_back({branch_var, {fl + 1.0, prob.lp.upper(branch_var)}});
      up.basis = prob.lp.snapshot();
      open.push(std::move(up));

      node.changes.push_back({branch_var, {prob.lp.lower(branch_var), fl}});
      prob.lp.set_bounds(branch_var, prob.lp.lower(branch_var), fl);
    }
    if (final_status != SolveStatus::Optimal) break;
  }

  double bound = std::min(best_open_bound(), incumbent_obj);
  if (incumbent.empty())
    return finish(mp, ps, final_status == SolveStatus::Optimal ? SolveStatus::Infeasible : final_status,
                  {}, 0, bound + ps.obj_offset, node_count, elapsed());

  double obj = incumbent_obj + ps.obj_offset;
  SolveStatus status = final_status == SolveStatus::Optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
  Solution sol = finish(mp, ps, status, incumbent, obj, bound + ps.obj_offset, node_count, elapsed());

  // Independent verification of the incumbent against the original program.
  double viol = max_constraint_violation(mp, sol.values);
  if (viol > std::max(opts.feas_tol, 1e-6))
    throw ModelError("incumbent violates a constraint by " + format_double(viol));
  return sol;
}

}  // namespace mta
