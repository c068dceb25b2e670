#include "miret/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include "miret/errors.hpp"
#include "miret/simplex.hpp"

namespace miret::milp {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Basis snapshots kept in open nodes; beyond this, parked nodes restart from whatever basis is loaded.
constexpr std::size_t kMaxStoredBases = 20000;

struct BoundChange {
  std::size_t var = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct OpenNode {
  double bound = -kInf;
  std::size_t id = 0;
  std::vector<BoundChange> path;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Open nodes: a stack (depth first) until an incumbent exists, a best-bound heap after.
class OpenSet {
 public:
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  double min_bound() const { return bounds_.empty() ? kInf : *bounds_.begin(); }

  void push(OpenNode n) {
    bounds_.insert(n.bound);
    nodes_.push_back(std::move(n));
    if (heap_) std::push_heap(nodes_.begin(), nodes_.end(), NodeOrder{});
  }

  OpenNode pop() {
    if (heap_) std::pop_heap(nodes_.begin(), nodes_.end(), NodeOrder{});
    OpenNode n = std::move(nodes_.back());
    nodes_.pop_back();
    bounds_.erase(bounds_.find(n.bound));
    return n;
  }

  void best_first() {
    if (heap_) return;
    std::make_heap(nodes_.begin(), nodes_.end(), NodeOrder{});
    heap_ = true;
  }

 private:
  std::vector<OpenNode> nodes_;
  std::multiset<double> bounds_;
  bool heap_ = false;
};

class Search {
 public:
  Search(const Model& model, const SolverConfig& config)
      : model_(model), cfg_(config), lp_(model), start_(Clock::now()) {
    const auto limit = std::chrono::duration<double>(config.time_limit);
    deadline_ = config.time_limit > 1e9 ? Clock::time_point::max()
                                         : start_ + std::chrono::duration_cast<Clock::duration>(limit);
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).is_binary()) binaries_.push_back(j);
    }
  }

  SolveReport run() {
    OpenSet open;
    std::optional<OpenNode> current = OpenNode{-kInf, next_id_++, {}, nullptr};
    bool stopped = false;

    while (current || !open.empty()) {
      if (Clock::now() > deadline_ || report_.nodes >= cfg_.node_limit) {
        stopped = true;
        if (current) open.push(std::move(*current));
        break;
      }
      if (!current) {
        current = open.pop();
        if (current->basis) --stored_bases_;
        if (current->bound >= report_.incumbent - cfg_.prune_tol) {
          current.reset();
          continue;
        }
        apply_path(current->path);
        if (current->basis) lp_.load_basis(*current->basis);
      } else {
        apply_path(current->path);
      }
      update_bound(std::min(current->bound, open.min_bound()));
      ++report_.nodes;

      const LpStatus st = lp_.solve(deadline_);
      if (st == LpStatus::kTimeLimit) {
        stopped = true;
        open.push(std::move(*current));
        break;
      }
      if (st == LpStatus::kUnbounded) {
        if (report_.nodes == 1) throw std::runtime_error("LP relaxation is unbounded");
        current.reset();
        continue;
      }
      if (st == LpStatus::kIterationLimit) throw std::runtime_error("simplex iteration limit reached");
      if (st == LpStatus::kInfeasible) {
        current.reset();
        continue;
      }
      const double obj = lp_.objective();
      if (obj >= report_.incumbent - cfg_.prune_tol) {
        current.reset();
        continue;
      }

      const auto branch = select_branch();
      if (!branch) {
        if (try_incumbent(current->path)) open.best_first();
        current.reset();
        continue;
      }

      const std::size_t v = *branch;
      const bool up_first = lp_.value(v) >= 0.5;
      OpenNode down{obj, next_id_++, current->path, nullptr};
      down.path.push_back({v, 0.0, 0.0});
      OpenNode up{obj, next_id_++, std::move(current->path), nullptr};
      up.path.push_back({v, 1.0, 1.0});
      // Plunge into the preferred child with the current factorization; park the other.
      OpenNode& later = up_first ? down : up;
      if (stored_bases_ < kMaxStoredBases) {
        later.basis = std::make_shared<const Basis>(lp_.basis());
        ++stored_bases_;
      }
      open.push(std::move(later));
      current = up_first ? std::move(up) : std::move(down);
      if (cfg_.log_every > 0 && report_.nodes % cfg_.log_every == 0) record();
    }

    report_.seconds = elapsed();
    report_.lp_iterations = lp_.iterations();
    if (!stopped) {
      if (report_.has_solution()) {
        report_.status = SolveStatus::kOptimal;
        report_.bound = report_.incumbent;
        report_.gap = 0.0;
      } else {
        report_.status = SolveStatus::kInfeasible;
        report_.gap = kInf;
      }
    } else {
      update_bound(open.min_bound());
      if (report_.has_solution()) {
        report_.status = SolveStatus::kFeasibleTimeout;
        report_.gap = relative_gap(report_.incumbent, report_.bound, cfg_.gap_epsilon);
      } else {
        report_.status = SolveStatus::kNoSolutionTimeout;
        report_.gap = kInf;
      }
    }
    record();
    return std::move(report_);
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void apply_path(const std::vector<BoundChange>& path) {
    for (std::size_t v : touched_) {
      const auto& var = model_.variable(v);
      lp_.set_bounds(v, var.lower, var.upper);
    }
    touched_.clear();
    for (const auto& c : path) {
      lp_.set_bounds(c.var, c.lower, c.upper);
      touched_.push_back(c.var);
    }
  }

  // The global bound only moves up, and never past the incumbent.
  void update_bound(double b) {
    if (b > report_.bound) report_.bound = std::min(b, report_.incumbent);
  }

  std::optional<std::size_t> select_branch() const {
    std::optional<std::size_t> best;
    int best_priority = 0;
    double best_dist = 0.0;
    for (std::size_t v : binaries_) {
      const double x = lp_.value(v);
      const double frac = x - std::floor(x);
      if (frac <= cfg_.integrality_tol || frac >= 1.0 - cfg_.integrality_tol) continue;
      const int pr = model_.variable(v).branch_priority;
      const double dist = std::abs(frac - 0.5);
      if (!best || pr > best_priority || (pr == best_priority && dist < best_dist - 1e-12)) {
        best = v;
        best_priority = pr;
        best_dist = dist;
      }
    }
    return best;
  }

  // The LP point is integral within tolerance: round the binaries, re-solve the
  // continuous part with them fixed so rows hold exactly, and keep it if better.
  bool try_incumbent(const std::vector<BoundChange>& path) {
    bool improved = false;
    const Basis saved = lp_.basis();
    std::vector<double> rounded(binaries_.size());
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      rounded[k] = std::round(lp_.value(binaries_[k]));
      lp_.set_bounds(binaries_[k], rounded[k], rounded[k]);
    }
    if (lp_.solve(deadline_) == LpStatus::kOptimal) {
      std::vector<double> x = lp_.structural_values();
      for (std::size_t k = 0; k < binaries_.size(); ++k) x[binaries_[k]] = rounded[k];
      const double obj = model_.objective_value(x);
      if (obj < report_.incumbent && check_solution(model_, x, cfg_.feasibility_tol).empty()) {
        report_.incumbent = obj;
        report_.solution = std::move(x);
        report_.bound = std::min(report_.bound, obj);
        improved = true;
        record();
      }
    }
    for (std::size_t v : binaries_) {
      const auto& var = model_.variable(v);
      lp_.set_bounds(v, var.lower, var.upper);
    }
    touched_.clear();
    for (const auto& c : path) {
      lp_.set_bounds(c.var, c.lower, c.upper);
      touched_.push_back(c.var);
    }
    lp_.load_basis(saved);
    return improved;
  }

  void record() {
    LogRecord r;
    r.seconds = elapsed();
    r.nodes = report_.nodes;
    r.incumbent = report_.incumbent;
    r.bound = report_.bound;
    r.gap = report_.has_solution() ? relative_gap(report_.incumbent, report_.bound, cfg_.gap_epsilon) : kInf;
    report_.log.push_back(r);
  }

  const Model& model_;
  SolverConfig cfg_;
  SimplexSolver lp_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::vector<std::size_t> binaries_;
  std::vector<std::size_t> touched_;
  std::size_t next_id_ = 0;
  std::size_t stored_bases_ = 0;
  SolveReport report_;
};

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleTimeout: return "feasible-timeout";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNoSolutionTimeout: return "no-solution-timeout";
  }
  return "unknown";
}

double relative_gap(double incumbent, double bound, double floor) {
  if (!std::isfinite(incumbent)) return kInf;
  if (!std::isfinite(bound)) return kInf;
  return 100.0 * std::max(0.0, incumbent - bound) / std::max(std::abs(incumbent), floor);
}

SolveReport solve(const Model& model, const SolverConfig& config) {
  if (!(config.time_limit > 0.0)) throw InputError("time limit must be positive");
  model.validate();
  Search search(model, config);
  return search.run();
}

void write_log_csv(const std::vector<LogRecord>& log, std::ostream& out) {
  out << "seconds,nodes,incumbent,bound,gap\n";
  for (const auto& r : log) {
    out << r.seconds << ',' << r.nodes << ',' << r.incumbent << ',' << r.bound << ',' << r.gap << '\n';
  }
}

}  // namespace miret::milp
