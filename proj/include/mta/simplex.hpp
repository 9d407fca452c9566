#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <utility>
#include <vector>

namespace mta {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

// Bounded-variable revised simplex on rows A x + s = b with per-variable
// bounds. Columns are laid out as [structural | slack | artificial]; the
// artificials only carry cost during phase one of a cold start. A dual
// restart after bound changes reuses the current factorized basis.
class BoundedSimplex {
 public:
  void setup(const Eigen::MatrixXd& a, const Eigen::VectorXd& cost, const Eigen::VectorXd& lb,
             const Eigen::VectorXd& ub, const Eigen::VectorXd& rhs);

  LpStatus primal_solve();
  LpStatus dual_resolve();

  void set_bounds(int var, double lb, double ub);  // structural index
  double lower(int var) const { return lb_[var]; }
  double upper(int var) const { return ub_[var]; }

  double objective() const;
  double value(int var) const { return x_[var]; }
  int iterations() const { return iters_; }

  struct BasisSnapshot {
    std::vector<int> basic;
    std::vector<char> status;
  };
  BasisSnapshot snapshot() const { return {basic_, status_}; }
  void restore(const BasisSnapshot& snap);

  long long max_iterations = 200000;
  long long dual_restarts = 0;  // instrumentation: cold restarts after dual trouble

 private:
  enum Status : char { AtLower = 0, AtUpper = 1, Basic = 2 };

  int m_ = 0;      // rows
  int n_ = 0;      // structural columns
  int total_ = 0;  // structural plus slack
  // Column-wise sparse matrix; pricing walks the nonzeros only.
  std::vector<std::vector<std::pair<int, double>>> cols_;
  Eigen::VectorXd c_, lb_, ub_, rhs_, x_;
  std::vector<int> basic_;        // basic variable per row
  std::vector<int> basic_row_;    // variable -> row or -1
  std::vector<char> status_;

  // Sparse factorizations of the basis and its transpose; bases here are
  // network-like and factor with little fill.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  struct Eta {
    int row;
    Eigen::VectorXd col;
  };
  std::vector<Eta> etas_;
  int iters_ = 0;
  bool factor_valid_ = false;
  bool singular_ = false;

  void factorize();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void compute_basics();
  void reduced_costs(const Eigen::VectorXd& cost, Eigen::VectorXd& d) const;
  LpStatus run_primal(const Eigen::VectorXd& cost, double infeas_tol, bool phase_one);
  double bound_violation() const;
  void apply_pivot(int entering, int row, const Eigen::VectorXd& w, double t, int dir,
                   char leave_status);
};

}  // namespace mta
