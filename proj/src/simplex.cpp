#include "miret/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace miret::milp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

/// Sparse LU of the basis matrix plus a product-form eta file for the updates
/// made since the last factorization.
class BasisFactor {
 public:
  bool factorize(std::size_t m, const std::vector<Eigen::Triplet<double>>& entries) {
    etas_.clear();
    m_ = m;
    Eigen::SparseMatrix<double> b(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    b.setFromTriplets(entries.begin(), entries.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    return lu_.info() == Eigen::Success;
  }

  // v <- B^{-1} v
  void ftran(std::vector<double>& v) const {
    Eigen::Map<Eigen::VectorXd> mv(v.data(), static_cast<Eigen::Index>(m_));
    Eigen::VectorXd tmp = lu_.solve(mv);
    mv = tmp;
    for (const auto& eta : etas_) {
      const double vp = v[eta.p] / eta.pivot;
      v[eta.p] = vp;
      if (vp == 0.0) continue;
      for (const auto& [i, a] : eta.entries) v[i] -= a * vp;
    }
  }

  // v <- B^{-T} v
  void btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->p];
      for (const auto& [i, a] : it->entries) s -= a * v[i];
      v[it->p] = s / it->pivot;
    }
    Eigen::Map<Eigen::VectorXd> mv(v.data(), static_cast<Eigen::Index>(m_));
    Eigen::VectorXd tmp = lu_.transpose().solve(mv);
    mv = tmp;
  }

  void push_eta(std::size_t p, const std::vector<double>& alpha) {
    Eta eta;
    eta.p = p;
    eta.pivot = alpha[p];
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (i != p && alpha[i] != 0.0) eta.entries.emplace_back(i, alpha[i]);
    }
    etas_.push_back(std::move(eta));
  }

  std::size_t eta_count() const { return etas_.size(); }

 private:
  struct Eta {
    std::size_t p = 0;
    double pivot = 1.0;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::size_t m_ = 0;
  // transpose() is non-const in Eigen.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

SimplexSolver::SimplexSolver(const Model& model, SimplexOptions options)
    : opt_(options), n_(model.num_variables()), m_(model.num_constraints()),
      objective_constant_(model.objective_constant()), factor_(std::make_unique<BasisFactor>()) {
  const std::size_t cols = n_ + m_;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < m_; ++r) {
    for (const auto& t : model.constraints()[r].terms) {
      trip.emplace_back(static_cast<int>(r), static_cast<int>(t.var), t.coef);
    }
    trip.emplace_back(static_cast<int>(r), static_cast<int>(n_ + r), -1.0);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(cols));
  a.setFromTriplets(trip.begin(), trip.end());
  a.prune(0.0);
  a.makeCompressed();
  col_start_.assign(cols + 1, 0);
  for (std::size_t j = 0; j < cols; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, static_cast<Eigen::Index>(j)); it; ++it) {
      row_index_.push_back(static_cast<int>(it.row()));
      coef_.push_back(it.value());
    }
    col_start_[j + 1] = row_index_.size();
  }

  cost_.assign(cols, 0.0);
  lo_.assign(cols, 0.0);
  hi_.assign(cols, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const auto& v = model.variable(j);
    cost_[j] = v.objective;
    lo_[j] = v.lower;
    hi_[j] = v.upper;
  }
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& c = model.constraints()[r];
    lo_[n_ + r] = c.sense == Sense::kLessEqual ? -kInf : c.rhs;
    hi_[n_ + r] = c.sense == Sense::kGreaterEqual ? kInf : c.rhs;
  }
  x_.assign(cols, 0.0);
  reset_to_slack_basis();
}

SimplexSolver::~SimplexSolver() = default;

void SimplexSolver::reset_to_slack_basis() {
  const std::size_t cols = n_ + m_;
  head_.resize(m_);
  pos_.assign(cols, -1);
  status_.assign(cols, ColumnStatus::kAtLower);
  for (std::size_t j = 0; j < n_; ++j) {
    status_[j] = std::isfinite(lo_[j]) ? ColumnStatus::kAtLower
                 : std::isfinite(hi_[j]) ? ColumnStatus::kAtUpper
                                         : ColumnStatus::kFreeZero;
    set_nonbasic_value(j);
  }
  for (std::size_t r = 0; r < m_; ++r) {
    head_[r] = static_cast<int>(n_ + r);
    pos_[n_ + r] = static_cast<int>(r);
    status_[n_ + r] = ColumnStatus::kBasic;
  }
  factor_valid_ = false;
  values_valid_ = false;
}

void SimplexSolver::set_nonbasic_value(std::size_t j) {
  auto& s = status_[j];
  if (s == ColumnStatus::kBasic) return;
  if (s == ColumnStatus::kAtLower && !std::isfinite(lo_[j])) s = ColumnStatus::kAtUpper;
  if (s == ColumnStatus::kAtUpper && !std::isfinite(hi_[j])) s = std::isfinite(lo_[j]) ? ColumnStatus::kAtLower : ColumnStatus::kFreeZero;
  if (s == ColumnStatus::kFreeZero && std::isfinite(lo_[j])) s = ColumnStatus::kAtLower;
  if (s == ColumnStatus::kFreeZero && std::isfinite(hi_[j])) s = ColumnStatus::kAtUpper;
  x_[j] = s == ColumnStatus::kAtLower ? lo_[j] : s == ColumnStatus::kAtUpper ? hi_[j] : 0.0;
}

void SimplexSolver::set_bounds(std::size_t var, double lower, double upper) {
  lo_[var] = lower;
  hi_[var] = upper;
  if (status_[var] != ColumnStatus::kBasic) {
    const double before = x_[var];
    set_nonbasic_value(var);
    if (x_[var] != before) values_valid_ = false;
  }
}

double SimplexSolver::column_dot(std::size_t j, const std::vector<double>& y) const {
  double s = 0.0;
  for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) s += coef_[k] * y[static_cast<std::size_t>(row_index_[k])];
  return s;
}

void SimplexSolver::column_into(std::size_t j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) dense[static_cast<std::size_t>(row_index_[k])] = coef_[k];
}

void SimplexSolver::refactor() {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto j = static_cast<std::size_t>(head_[r]);
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        entries.emplace_back(row_index_[k], static_cast<int>(r), coef_[k]);
      }
    }
    if (factor_->factorize(m_, entries)) {
      factor_valid_ = true;
      return;
    }
    // Singular basis: fall back to the all-logical basis, which is always regular.
    reset_to_slack_basis();
  }
  factor_valid_ = true;
}

void SimplexSolver::compute_basic_values() {
  std::vector<double> rhs(m_, 0.0);
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (status_[j] == ColumnStatus::kBasic || x_[j] == 0.0) continue;
    for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      rhs[static_cast<std::size_t>(row_index_[k])] -= coef_[k] * x_[j];
    }
  }
  factor_->ftran(rhs);
  for (std::size_t r = 0; r < m_; ++r) x_[static_cast<std::size_t>(head_[r])] = rhs[r];
  values_valid_ = true;
}

bool SimplexSolver::basic_infeasible(std::size_t row) const {
  const auto j = static_cast<std::size_t>(head_[row]);
  return x_[j] < lo_[j] - opt_.primal_tol || x_[j] > hi_[j] + opt_.primal_tol;
}

LpStatus SimplexSolver::solve(std::chrono::steady_clock::time_point deadline) {
  if (!factor_valid_) {
    refactor();
    values_valid_ = false;
  }
  if (!values_valid_) compute_basic_values();

  const std::size_t cols = n_ + m_;
  std::vector<double> y(m_);
  std::vector<double> alpha(m_);
  std::size_t degenerate_run = 0;
  bool fresh = factor_->eta_count() == 0;
  std::size_t local_iter = 0;

  for (;;) {
    if ((local_iter & 31) == 0 && std::chrono::steady_clock::now() > deadline) return LpStatus::kTimeLimit;
    if (local_iter >= opt_.max_iterations) return LpStatus::kIterationLimit;

    bool infeasible = false;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto j = static_cast<std::size_t>(head_[r]);
      if (x_[j] < lo_[j] - opt_.primal_tol) {
        y[r] = -1.0;
        infeasible = true;
      } else if (x_[j] > hi_[j] + opt_.primal_tol) {
        y[r] = 1.0;
        infeasible = true;
      } else {
        y[r] = 0.0;
      }
    }
    if (!infeasible) {
      for (std::size_t r = 0; r < m_; ++r) y[r] = cost_[static_cast<std::size_t>(head_[r])];
    }
    factor_->btran(y);

    const bool bland = degenerate_run > opt_.degenerate_limit;
    std::size_t q = cols;
    double dq = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const auto s = status_[j];
      if (s == ColumnStatus::kBasic || lo_[j] == hi_[j]) continue;
      const double d = (infeasible ? 0.0 : cost_[j]) - column_dot(j, y);
      const bool eligible = (s == ColumnStatus::kAtLower && d < -opt_.dual_tol) ||
                            (s == ColumnStatus::kAtUpper && d > opt_.dual_tol) ||
                            (s == ColumnStatus::kFreeZero && std::abs(d) > opt_.dual_tol);
      if (!eligible) continue;
      if (bland) {
        q = j;
        dq = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
        dq = d;
      }
    }

    if (q == cols) {
      if (!fresh) {
        // Confirm the verdict on a fresh factorization before reporting it.
        refactor();
        compute_basic_values();
        fresh = true;
        continue;
      }
      return infeasible ? LpStatus::kInfeasible : LpStatus::kOptimal;
    }

    const double dir = dq < 0.0 ? 1.0 : -1.0;
    column_into(q, alpha);
    factor_->ftran(alpha);

    // Harris two-pass ratio test. Basic x_r moves at rate delta_r = -dir * alpha_r.
    const double tol = bland ? 0.0 : opt_.primal_tol;
    auto target = [&](std::size_t r, double delta, double& bound) -> bool {
      const auto j = static_cast<std::size_t>(head_[r]);
      const double x = x_[j];
      if (delta > 0.0) {
        if (infeasible && x < lo_[j] - opt_.primal_tol) {
          bound = lo_[j];
        } else if (x > hi_[j] + opt_.primal_tol) {
          return false;
        } else {
          bound = hi_[j];
        }
        return std::isfinite(bound);
      }
      if (infeasible && x > hi_[j] + opt_.primal_tol) {
        bound = hi_[j];
      } else if (x < lo_[j] - opt_.primal_tol) {
        return false;
      } else {
        bound = lo_[j];
      }
      return std::isfinite(bound);
    };

    double theta_max = kInf;
    for (std::size_t r = 0; r < m_; ++r) {
      const double delta = -dir * alpha[r];
      if (std::abs(delta) < opt_.pivot_tol) continue;
      double bound = 0.0;
      if (!target(r, delta, bound)) continue;
      const double x = x_[static_cast<std::size_t>(head_[r])];
      const double t = delta > 0.0 ? (bound - x + tol) / delta : (x - bound + tol) / -delta;
      theta_max = std::min(theta_max, t);
    }
    const double flip = hi_[q] - lo_[q];
    if (!std::isfinite(theta_max) && !std::isfinite(flip)) {
      if (!fresh) {
        refactor();
        compute_basic_values();
        fresh = true;
        continue;
      }
      return LpStatus::kUnbounded;
    }

    ++iterations_;
    ++local_iter;
    if (std::isfinite(flip) && flip <= theta_max) {
      // Bound flip of the entering column; the basis is unchanged.
      for (std::size_t r = 0; r < m_; ++r) x_[static_cast<std::size_t>(head_[r])] += -dir * alpha[r] * flip;
      status_[q] = dir > 0 ? ColumnStatus::kAtUpper : ColumnStatus::kAtLower;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      degenerate_run = 0;
      fresh = false;
      continue;
    }

    std::size_t leave = m_;
    double leave_bound = 0.0;
    double theta = 0.0;
    double best_pivot = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double delta = -dir * alpha[r];
      if (std::abs(delta) < opt_.pivot_tol) continue;
      double bound = 0.0;
      if (!target(r, delta, bound)) continue;
      const double x = x_[static_cast<std::size_t>(head_[r])];
      const double t = delta > 0.0 ? (bound - x) / delta : (x - bound) / -delta;
      if (t > theta_max) continue;
      bool take = false;
      if (bland) {
        take = leave == m_ || t < theta - 1e-12 ||
               (t <= theta + 1e-12 && head_[r] < head_[leave]);
      } else {
        take = std::abs(delta) > best_pivot;
      }
      if (take) {
        leave = r;
        leave_bound = bound;
        theta = t;
        best_pivot = std::abs(delta);
      }
    }
    if (leave == m_) {
      // Only possible through round-off in the two passes; retry on a fresh factorization.
      refactor();
      compute_basic_values();
      fresh = true;
      continue;
    }
    theta = std::max(theta, 0.0);
    degenerate_run = theta < 1e-12 ? degenerate_run + 1 : 0;

    for (std::size_t r = 0; r < m_; ++r) x_[static_cast<std::size_t>(head_[r])] += -dir * alpha[r] * theta;
    x_[q] += dir * theta;
    const auto out = static_cast<std::size_t>(head_[leave]);
    x_[out] = leave_bound;
    status_[out] = (leave_bound == lo_[out]) ? ColumnStatus::kAtLower : ColumnStatus::kAtUpper;
    pos_[out] = -1;
    head_[leave] = static_cast<int>(q);
    pos_[q] = static_cast<int>(leave);
    status_[q] = ColumnStatus::kBasic;
    factor_->push_eta(leave, alpha);
    fresh = false;
    if (factor_->eta_count() >= opt_.refactor_interval) {
      refactor();
      compute_basic_values();
      fresh = true;
    }
  }
}

double SimplexSolver::objective() const {
  double v = objective_constant_;
  for (std::size_t j = 0; j < n_; ++j) v += cost_[j] * x_[j];
  return v;
}

std::vector<double> SimplexSolver::structural_values() const { return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)}; }

Basis SimplexSolver::basis() const { return Basis{head_, status_}; }

void SimplexSolver::load_basis(const Basis& basis) {
  if (basis.head.size() != m_ || basis.status.size() != n_ + m_) {
    reset_to_slack_basis();
    return;
  }
  head_ = basis.head;
  status_ = basis.status;
  pos_.assign(n_ + m_, -1);
  for (std::size_t r = 0; r < m_; ++r) pos_[static_cast<std::size_t>(head_[r])] = static_cast<int>(r);
  for (std::size_t j = 0; j < n_ + m_; ++j) set_nonbasic_value(j);
  factor_valid_ = false;
  values_valid_ = false;
}

}  // namespace miret::milp
