#include "mta/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "mta/parallel.hpp"

namespace mta {

namespace {
constexpr double kFeasTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefactorEvery = 100;
}  // namespace

void BoundedSimplex::setup(const Eigen::MatrixXd& a, const Eigen::VectorXd& cost,
                           const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                           const Eigen::VectorXd& rhs) {
  m_ = static_cast<int>(a.rows());
  n_ = static_cast<int>(a.cols());
  total_ = n_ + m_;
  cols_.assign(total_, {});
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < m_; ++i)
      if (a(i, j) != 0.0) cols_[j].push_back({i, a(i, j)});
  for (int i = 0; i < m_; ++i) cols_[n_ + i].push_back({i, 1.0});  // slack
  c_.setZero(total_);
  c_.head(n_) = cost;
  lb_ = lb;
  ub_ = ub;
  rhs_ = rhs;
  x_.setZero(total_);
  status_.assign(total_, AtLower);
  basic_.clear();
  basic_row_.assign(total_, -1);
  etas_.clear();
  factor_valid_ = false;
  iters_ = 0;
}

void BoundedSimplex::factorize() {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < m_; ++i)
    for (auto& [r, v] : cols_[basic_[i]]) trip.push_back({r, i, v});
  Eigen::SparseMatrix<double> b(m_, m_);
  b.setFromTriplets(trip.begin(), trip.end());
  lu_.compute(b);
  Eigen::SparseMatrix<double> bt = b.transpose();
  lut_.compute(bt);
  singular_ = lu_.info() != Eigen::Success || lut_.info() != Eigen::Success;
  etas_.clear();
  factor_valid_ = true;
}

void BoundedSimplex::ftran(Eigen::VectorXd& v) const {
  v = lu_.solve(v);
  for (const auto& e : etas_) {
    double piv = v(e.row) / e.col(e.row);
    if (piv != 0.0) {
      v -= piv * e.col;
      v(e.row) = piv;
    } else {
      v(e.row) = 0.0;
    }
  }
}

void BoundedSimplex::btran(Eigen::VectorXd& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double yr = v(it->row);
    double dot = it->col.dot(v) - it->col(it->row) * yr;
    v(it->row) = (yr - dot) / it->col(it->row);
  }
  v = lut_.solve(v);
}

void BoundedSimplex::compute_basics() {
  Eigen::VectorXd r = rhs_;
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == Basic) continue;
    double v = status_[j] == AtLower ? lb_[j] : ub_[j];
    x_[j] = v;
    if (v != 0.0)
      for (auto& [row, coef] : cols_[j]) r(row) -= v * coef;
  }
  ftran(r);
  for (int i = 0; i < m_; ++i) x_[basic_[i]] = r(i);
}

void BoundedSimplex::reduced_costs(const Eigen::VectorXd& cost, Eigen::VectorXd& d) const {
  Eigen::VectorXd y(m_);
  for (int i = 0; i < m_; ++i) y(i) = cost(basic_[i]);
  btran(y);
  d.resize(total_);
  // Pure per-index writes; merged results identical to the serial pass.
  parallel::for_index(static_cast<std::size_t>(total_), [&](std::size_t j) {
    if (status_[j] == Basic) {
      d(j) = 0.0;
      return;
    }
    double dot = 0.0;
    for (auto& [row, coef] : cols_[j]) dot += y(row) * coef;
    d(j) = cost(j) - dot;
  });
}

double BoundedSimplex::bound_violation() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    int j = basic_[i];
    worst = std::max(worst, std::max(lb_[j] - x_[j], x_[j] - ub_[j]));
  }
  return worst;
}

void BoundedSimplex::apply_pivot(int entering, int row, const Eigen::VectorXd& w, double t,
                                 int dir, char leave_status) {
  if (std::abs(w(row)) < 1e-11) throw std::runtime_error("singular simplex pivot");
  int leaving = basic_[row];
  double enter_val = (status_[entering] == AtLower ? lb_[entering] : ub_[entering]) + t * dir;
  for (int i = 0; i < m_; ++i) x_[basic_[i]] -= w(i) * t * dir;
  x_[entering] = enter_val;
  x_[leaving] = leave_status == AtLower ? lb_[leaving] : ub_[leaving];
  status_[leaving] = leave_status;
  status_[entering] = Basic;
  basic_row_[leaving] = -1;
  basic_row_[entering] = row;
  basic_[row] = entering;
  etas_.push_back({row, w});
  if (static_cast<int>(etas_.size()) > kRefactorEvery) {
    factorize();
    compute_basics();
  }
}

LpStatus BoundedSimplex::run_primal(const Eigen::VectorXd& cost, double, bool phase_one) {
  Eigen::VectorXd d;
  int degenerate_streak = 0;
  for (;; ++iters_) {
    if (iters_ > max_iterations) return LpStatus::IterLimit;
    if (const char* dbg = std::getenv("MTA_LP_TRACE"); dbg && iters_ % 500 == 0)
      std::fprintf(stderr, "iter %d phase%d viol %.3g obj %.6f streak %d\n", iters_,
                   phase_one ? 1 : 2, bound_violation(), objective(), degenerate_streak);
    bool any_infeasible = false;
    if (phase_one) {
      // Infeasibility cost: push out-of-bound basics toward their bounds.
      Eigen::VectorXd pc = Eigen::VectorXd::Zero(total_);
      for (int i = 0; i < m_; ++i) {
        int j = basic_[i];
        if (x_[j] > ub_[j] + kFeasTol) {
          pc(j) = 1.0;
          any_infeasible = true;
        } else if (x_[j] < lb_[j] - kFeasTol) {
          pc(j) = -1.0;
          any_infeasible = true;
        }
      }
      if (!any_infeasible) return LpStatus::Optimal;
      reduced_costs(pc, d);
    } else {
      reduced_costs(cost, d);
    }

    bool bland = degenerate_streak > 2 * (m_ + total_);
    int entering = -1, dir = 0;
    double best = -kDualTol;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == Basic || lb_[j] == ub_[j]) continue;
      double score = 0.0;
      int jdir = 0;
      if (status_[j] == AtLower && d(j) < -kDualTol) {
        score = d(j);
        jdir = 1;
      } else if (status_[j] == AtUpper && d(j) > kDualTol) {
        score = -d(j);
        jdir = -1;
      } else {
        continue;
      }
      if (bland) {
        entering = j;
        dir = jdir;
        break;
      }
      if (score < best) {
        best = score;
        entering = j;
        dir = jdir;
      }
    }
    if (entering < 0) return any_infeasible ? LpStatus::Infeasible : LpStatus::Optimal;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (auto& [row, coef] : cols_[entering]) w(row) = coef;
    ftran(w);

    double t = ub_[entering] - lb_[entering];  // bound-flip distance
    int block_row = -1;
    char leave_status = AtLower;
    double best_piv = 0.0;
    for (int i = 0; i < m_; ++i) {
      double rate = -w(i) * dir;  // change of basic i per unit step
      if (std::abs(rate) < kPivotTol) continue;
      int j = basic_[i];
      // A feasible basic blocks at the bound ahead; a basic beyond a bound
      // blocks when it regains it, and never blocks while drifting further
      // out (the phase-one costs already price that drift).
      double bound;
      char st;
      if (rate > 0) {
        if (x_[j] < lb_[j] - kFeasTol) {
          bound = lb_[j];
          st = AtLower;
        } else if (x_[j] <= ub_[j] + kFeasTol) {
          if (ub_[j] >= kInf) continue;
          bound = ub_[j];
          st = AtUpper;
        } else {
          continue;
        }
      } else {
        if (x_[j] > ub_[j] + kFeasTol) {
          bound = ub_[j];
          st = AtUpper;
        } else if (x_[j] >= lb_[j] - kFeasTol) {
          if (lb_[j] <= -kInf) continue;
          bound = lb_[j];
          st = AtLower;
        } else {
          continue;
        }
      }
      double ti = std::max((bound - x_[j]) / rate, 0.0);
      if (ti < t - 1e-12 || (ti < t + 1e-12 && std::abs(w(i)) > best_piv)) {
        t = ti;
        block_row = i;
        leave_status = st;
        best_piv = std::abs(w(i));
      }
    }

    if (t >= kInf) return LpStatus::Unbounded;
    degenerate_streak = t <= 1e-12 ? degenerate_streak + 1 : 0;
    if (block_row < 0) {
      // Bound flip.
      for (int i = 0; i < m_; ++i) x_[basic_[i]] -= w(i) * t * dir;
      status_[entering] = status_[entering] == AtLower ? AtUpper : AtLower;
      x_[entering] = status_[entering] == AtLower ? lb_[entering] : ub_[entering];
      continue;
    }
    apply_pivot(entering, block_row, w, t, dir, leave_status);
  }
}

LpStatus BoundedSimplex::primal_solve() {
  // Cold start from the all-slack basis; out-of-bound slack values are
  // driven in by the composite phase one.
  basic_.resize(m_);
  basic_row_.assign(total_, -1);
  for (int j = 0; j < n_; ++j) {
    if (lb_[j] <= -kInf)
      status_[j] = AtUpper;
    else if (ub_[j] >= kInf || std::abs(lb_[j]) <= std::abs(ub_[j]))
      status_[j] = AtLower;
    else
      status_[j] = AtUpper;
    x_[j] = status_[j] == AtLower ? lb_[j] : ub_[j];
  }
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    status_[n_ + i] = Basic;
    basic_row_[n_ + i] = i;
  }
  factorize();
  compute_basics();

  if (bound_violation() > kFeasTol) {
    LpStatus st = run_primal(c_, kFeasTol, true);
    if (st != LpStatus::Optimal) return st == LpStatus::Unbounded ? LpStatus::Infeasible : st;
  }
  return run_primal(c_, kFeasTol, false);
}

LpStatus BoundedSimplex::dual_resolve() {
  // Nonbasic values may have left their (possibly tightened) bounds.
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == Basic) continue;
    if (status_[j] == AtUpper && ub_[j] < kInf)
      x_[j] = ub_[j];
    else
      x_[j] = lb_[j];
    if (status_[j] == AtLower && lb_[j] <= -kInf && ub_[j] < kInf) {
      status_[j] = AtUpper;
      x_[j] = ub_[j];
    }
  }
  if (!factor_valid_) factorize();
  if (singular_) return LpStatus::IterLimit;  // caller restarts cold
  compute_basics();

  Eigen::VectorXd d;
  reduced_costs(c_, d);

  int degenerate_streak = 0;
  for (;; ++iters_) {
    if (iters_ > max_iterations) return LpStatus::IterLimit;
    int row = -1;
    double worst = kFeasTol;
    for (int i = 0; i < m_; ++i) {
      int j = basic_[i];
      double viol = std::max(lb_[j] - x_[j], x_[j] - ub_[j]);
      if (viol > worst) {
        worst = viol;
        row = i;
      }
    }
    if (row < 0) return LpStatus::Optimal;

    int leave = basic_[row];
    bool below = x_[leave] < lb_[leave];
    char leave_status = below ? AtLower : AtUpper;

    // Row of B^-1 N for the leaving basic.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e(row) = 1.0;
    btran(e);
    Eigen::VectorXd alpha(total_);
    parallel::for_index(static_cast<std::size_t>(total_), [&](std::size_t j) {
      if (status_[j] == Basic) {
        alpha(j) = 0.0;
        return;
      }
      double dot = 0.0;
      for (auto& [row, coef] : cols_[j]) dot += e(row) * coef;
      alpha(j) = dot;
    });

    bool bland = degenerate_streak > 2 * (m_ + total_);
    int entering = -1, dir = 0;
    double best_ratio = kInf;
    double best_piv = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == Basic || lb_[j] == ub_[j]) continue;
      double aj = alpha(j);
      if (std::abs(aj) < kPivotTol) continue;
      // Entering movement must push the leaving basic toward feasibility.
      int jdir;
      if (below)
        jdir = aj < 0 ? 1 : -1;  // x_leave rate = -alpha * dir > 0
      else
        jdir = aj > 0 ? 1 : -1;
      if (jdir > 0 && status_[j] == AtUpper) continue;
      if (jdir < 0 && status_[j] == AtLower) continue;
      double dj = d(j);
      double ratio = jdir > 0 ? dj / std::abs(aj) : -dj / std::abs(aj);
      ratio = std::max(ratio, 0.0);
      bool better = ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && std::abs(aj) > best_piv);
      if (bland && entering >= 0) better = false;
      if (better) {
        best_ratio = ratio;
        best_piv = std::abs(aj);
        entering = j;
        dir = jdir;
      }
    }
    if (entering < 0) return LpStatus::Infeasible;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (auto& [rr, coef] : cols_[entering]) w(rr) = coef;
    ftran(w);
    if (std::abs(w(row)) < kPivotTol) {
      // The updated representation disagrees with the priced row; refresh
      // the factorization and retry, or hand control back when fresh.
      if (etas_.empty()) return LpStatus::IterLimit;
      factorize();
      compute_basics();
      reduced_costs(c_, d);
      continue;
    }
    double gap = below ? lb_[leave] - x_[leave] : x_[leave] - ub_[leave];
    double t = gap / std::abs(w(row));
    degenerate_streak = t <= 1e-12 ? degenerate_streak + 1 : 0;

    // Dual update of reduced costs.
    double dq = d(entering);
    double pivot = alpha(entering);
    for (int j = 0; j < total_; ++j)
      if (status_[j] != Basic) d(j) -= dq / pivot * alpha(j);
    apply_pivot(entering, row, w, t, dir, leave_status);
    d(entering) = 0.0;
    d(leave) = -dq / pivot;
    if (static_cast<int>(etas_.size()) == 0) {
      // A refactor just happened inside apply_pivot; refresh duals exactly.
      reduced_costs(c_, d);
    }
  }
}

double BoundedSimplex::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += c_(j) * x_[j];
  return obj;
}

void BoundedSimplex::set_bounds(int var, double lo, double hi) {
  lb_[var] = lo;
  ub_[var] = hi;
}

void BoundedSimplex::restore(const BasisSnapshot& snap) {
  basic_ = snap.basic;
  status_ = snap.status;
  basic_row_.assign(total_, -1);
  for (int i = 0; i < m_; ++i) basic_row_[basic_[i]] = i;
  factor_valid_ = false;
  etas_.clear();
}

}  // namespace mta
