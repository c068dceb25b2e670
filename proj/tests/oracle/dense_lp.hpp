#pragma once

// Dense two-phase tableau simplex with Bland's rule. Slow and simple on purpose:
// it is the reference the sparse revised simplex and the branch and bound are
// checked against.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

enum class RowSense { kLe, kGe, kEq };

struct DenseLp {
  std::vector<double> c;
  std::vector<std::vector<double>> a;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<double> lo;  // finite bounds only
  std::vector<double> hi;
};

enum class LpOutcome { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpOutcome outcome = LpOutcome::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

namespace detail {

constexpr double kEps = 1e-10;

struct Tableau {
  std::vector<std::vector<double>> t;  // rows x (cols + 1), last entry is the rhs
  std::vector<std::size_t> basis;
  std::size_t cols = 0;

  void pivot(std::size_t r, std::size_t q) {
    const double p = t[r][q];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || t[i][q] == 0.0) continue;
      const double f = t[i][q];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = q;
  }

  // Minimizes cost over the columns with allowed[j]; false when unbounded.
  bool run(const std::vector<double>& cost, const std::vector<bool>& allowed) {
    for (std::size_t iter = 0; iter < 200000; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols && enter == cols; ++j) {
        if (!allowed[j]) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < t.size(); ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc < -1e-9) enter = j;
      }
      if (enter == cols) return true;
      std::size_t leave = t.size();
      double best = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i][enter] <= 1e-9) continue;
        const double ratio = t[i][cols] / t[i][enter];
        if (leave == t.size() || ratio < best - kEps || (ratio <= best + kEps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("oracle simplex did not terminate");
  }
};

}  // namespace detail

inline LpSolution solve_dense(const DenseLp& lp) {
  const std::size_t n = lp.c.size();
  // Shift to y = x - lo >= 0 and add y <= hi - lo as ordinary rows.
  std::vector<std::vector<double>> rows;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  for (std::size_t r = 0; r < lp.a.size(); ++r) {
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) shift += lp.a[r][j] * lp.lo[j];
    rows.push_back(lp.a[r]);
    sense.push_back(lp.sense[r]);
    rhs.push_back(lp.rhs[r] - shift);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    rows.push_back(e);
    sense.push_back(RowSense::kLe);
    rhs.push_back(lp.hi[j] - lp.lo[j]);
  }
  const std::size_t m = rows.size();
  std::size_t slacks = 0;
  for (auto s : sense) slacks += s == RowSense::kEq ? 0 : 1;
  const std::size_t cols = n + slacks + m;  // structural, slack, artificial

  detail::Tableau tab;
  tab.cols = cols;
  tab.t.assign(m, std::vector<double>(cols + 1, 0.0));
  tab.basis.resize(m);
  std::size_t next_slack = n;
  for (std::size_t r = 0; r < m; ++r) {
    auto& row = tab.t[r];
    for (std::size_t j = 0; j < n; ++j) row[j] = rows[r][j];
    if (sense[r] == RowSense::kLe) row[next_slack++] = 1.0;
    if (sense[r] == RowSense::kGe) row[next_slack++] = -1.0;
    row[cols] = rhs[r];
    if (row[cols] < 0.0) {
      for (auto& v : row) v = -v;
    }
    row[n + slacks + r] = 1.0;
    tab.basis[r] = n + slacks + r;
  }

  std::vector<double> phase1(cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) phase1[n + slacks + r] = 1.0;
  std::vector<bool> all(cols, true);
  tab.run(phase1, all);
  double infeas = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] >= n + slacks) infeas += tab.t[r][cols];
  }
  LpSolution out;
  if (infeas > 1e-7) return out;

  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] < n + slacks) continue;
    for (std::size_t j = 0; j < n + slacks; ++j) {
      if (std::abs(tab.t[r][j]) > 1e-9) {
        tab.pivot(r, j);
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.c[j];
  std::vector<bool> allowed(cols, false);
  for (std::size_t j = 0; j < n + slacks; ++j) allowed[j] = true;
  if (!tab.run(phase2, allowed)) {
    out.outcome = LpOutcome::kUnbounded;
    out.objective = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.outcome = LpOutcome::kOptimal;
  out.x = lp.lo;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis[r] < n) out.x[tab.basis[r]] += tab.t[r][cols];
  }
  out.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.objective += lp.c[j] * out.x[j];
  return out;
}

}  // namespace oracle
