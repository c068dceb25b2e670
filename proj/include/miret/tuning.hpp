#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "miret/branch_and_bound.hpp"
#include "miret/dataset.hpp"
#include "miret/forest.hpp"
#include "miret/miret_model.hpp"
#include "miret/te_metrics.hpp"

namespace miret {

/// A frequency percentile h in (0, 100], or the sentinel meaning gamma = 0.
struct Percentile {
  bool zero = true;
  double h = 0.0;

  static Percentile zero_threshold() { return {}; }
  static Percentile of(double h);
  /// "zero" or the value with up to one decimal, e.g. "33.3".
  std::string label() const;
  /// Accepts "zero", "0", a number, or a fraction such as "100/3".
  static Percentile parse(const std::string& text);
};

/// Per level: nearest-rank h-th percentile of the positive frequencies (ascending);
/// 0 for the sentinel or for levels without positive entries.
std::vector<double> gamma_from_percentile(const LevelFrequencyMatrix& freq, const Percentile& p);

struct TuneGrid {
  std::vector<double> alphas{0.2, 0.4, 0.5, 0.6, 0.8};
  std::vector<Percentile> percentiles{Percentile::zero_threshold(), Percentile::of(50.0), Percentile::of(100.0 / 3.0),
                                      Percentile::of(25.0)};
  std::size_t k = 4;

  void validate() const;
  std::size_t size() const { return alphas.size() * percentiles.size(); }
};

struct TuneConfig {
  ForestConfig forest;
  MiretHyperparams base;         // alpha and gamma are overridden per cell
  milp::SolverConfig solver;     // time limit overridden when budget > 0
  double budget = 0.0;           // seconds for the whole grid; 0 keeps solver.time_limit per fold
  std::uint64_t seed = 0;        // fold assignment seed
};

struct FoldResult {
  std::size_t cell = 0;
  std::size_t fold = 0;
  double alpha = 0.0;
  Percentile percentile;
  double fidelity = 0.0;     // validation fold, percent
  std::size_t sparsity = 0;  // active (node, feature) pairs
  double gap = 0.0;
  double seconds = 0.0;
  std::string status;
  bool flagged = false;      // no usable solution; fidelity recorded as 0
};

struct CellSummary {
  double alpha = 0.0;
  Percentile percentile;
  double mean_fidelity = 0.0;
  double mean_sparsity = 0.0;
  std::size_t flagged = 0;
};

struct TuneResult {
  std::vector<FoldResult> folds;
  std::vector<CellSummary> cells;
  std::size_t selected = 0;

  const CellSummary& best() const { return cells.at(selected); }
};

/// Highest mean fidelity, then lowest mean sparsity, then lowest alpha, then highest h
/// (the zero sentinel counts as the lowest h).
std::size_t select_cell(const std::vector<CellSummary>& cells);

/// Stratified k-fold grid search; deterministic for fixed seeds.
TuneResult cross_validate(const Dataset& data, const TuneGrid& grid, const TuneConfig& config);

/// `cell,alpha,h,fold,fidelity,sparsity,gap,seconds,status,flagged`.
void write_tune_csv(const TuneResult& result, std::ostream& out);

}  // namespace miret
