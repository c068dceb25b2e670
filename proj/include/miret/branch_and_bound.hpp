#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "miret/milp.hpp"

namespace miret::milp {

struct SolverConfig {
  double time_limit = 3600.0;  // seconds, must be positive
  // Recorded for reproducibility; the search itself is deterministic and single-threaded.
  std::uint64_t seed = 0;
  double feasibility_tol = 1e-6;
  double integrality_tol = 1e-6;
  // Nodes whose LP bound is within this much of the incumbent are pruned.
  double prune_tol = 1e-7;
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  // Denominator floor of the relative gap.
  double gap_epsilon = 1e-10;
  // Log a progress record every this many nodes (0 disables periodic records).
  std::size_t log_every = 1000;
};

enum class SolveStatus {
  kOptimal,
  kFeasibleTimeout,   // limit reached with an incumbent
  kInfeasible,
  kNoSolutionTimeout, // limit reached before any incumbent was found
};

std::string to_string(SolveStatus status);

struct LogRecord {
  double seconds = 0.0;
  std::size_t nodes = 0;
  double incumbent = 0.0;
  double bound = 0.0;
  double gap = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  double incumbent = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();  // percent
  double seconds = 0.0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  std::vector<double> solution;  // empty unless an incumbent exists
  std::vector<LogRecord> log;

  bool has_solution() const { return !solution.empty(); }
};

/// Gap in percent: 100 * (incumbent - bound) / max(|incumbent|, floor).
double relative_gap(double incumbent, double bound, double floor = 1e-10);

/// LP-based branch and bound on the binary variables of `model` (minimization).
///
/// Best-first node selection with plunging into the child on the rounding side
/// of the branching variable. Branching picks the fractional binary with the
/// highest priority, then the most fractional value, then the lowest index.
/// Throws InputError for a non-positive time limit, and std::runtime_error when
/// the root relaxation is unbounded.
SolveReport solve(const Model& model, const SolverConfig& config = {});

/// CSV with header `seconds,nodes,incumbent,bound,gap`.
void write_log_csv(const std::vector<LogRecord>& log, std::ostream& out);

}  // namespace miret::milp
