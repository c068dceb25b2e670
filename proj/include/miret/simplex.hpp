#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "miret/milp.hpp"

namespace miret::milp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kTimeLimit };

enum class ColumnStatus : std::int8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

/// Basis snapshot: the basic column of every row plus the status of every column
/// (structural columns first, then one logical column per row).
struct Basis {
  std::vector<int> head;
  std::vector<ColumnStatus> status;
  bool empty() const { return head.empty(); }
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 64;
  std::size_t max_iterations = 1'000'000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_limit = 50;
};

class BasisFactor;

/// Bounded-variable revised primal simplex over the LP relaxation of a Model.
///
/// Rows are turned into equalities with one logical column each:
///   sum_j a_rj x_j - s_r = 0,  s_r in [row lower, row upper].
/// Phase 1 minimizes the sum of bound infeasibilities of the basic variables, so
/// the solver can restart from any basis after bounds change (branch and bound).
class SimplexSolver {
 public:
  explicit SimplexSolver(const Model& model, SimplexOptions options = {});
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  std::size_t num_structural() const { return n_; }
  std::size_t num_rows() const { return m_; }

  void set_bounds(std::size_t var, double lower, double upper);
  double lower(std::size_t var) const { return lo_[var]; }
  double upper(std::size_t var) const { return hi_[var]; }

  LpStatus solve(std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max());

  /// Objective of the current point, including the model's constant.
  double objective() const;
  double value(std::size_t var) const { return x_[var]; }
  std::vector<double> structural_values() const;

  Basis basis() const;
  void load_basis(const Basis& basis);
  void reset_to_slack_basis();

  std::size_t iterations() const { return iterations_; }

 private:
  void refactor();
  void compute_basic_values();
  void set_nonbasic_value(std::size_t j);
  double column_dot(std::size_t j, const std::vector<double>& y) const;
  void column_into(std::size_t j, std::vector<double>& dense) const;
  bool basic_infeasible(std::size_t row) const;

  SimplexOptions opt_;
  std::size_t n_ = 0;  // structural columns
  std::size_t m_ = 0;  // rows (= logical columns)
  // Column-compressed constraint matrix over all n_ + m_ columns.
  std::vector<std::size_t> col_start_;
  std::vector<int> row_index_;
  std::vector<double> coef_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<int> pos_;  // row of a basic column, -1 otherwise
  std::vector<ColumnStatus> status_;
  double objective_constant_ = 0.0;
  std::unique_ptr<BasisFactor> factor_;
  bool factor_valid_ = false;
  bool values_valid_ = false;
  std::size_t iterations_ = 0;
};

}  // namespace miret::milp
