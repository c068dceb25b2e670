#pragma once

#include <span>
#include <string>
#include <vector>

#include "miret/dataset.hpp"
#include "miret/forest.hpp"
#include "miret/milp.hpp"
#include "miret/te_metrics.hpp"

namespace miret {

/// Index sets of a complete binary tree of depth D with breadth-first ids.
struct TreeTopology {
  int depth = 0;
  std::vector<NodeId> branches;                   // 0 .. 2^D - 2
  std::vector<NodeId> leaves;                     // 2^D - 1 .. 2^(D+1) - 2
  std::vector<std::vector<NodeId>> level_branches;  // branches per level 0 .. D-1
  std::vector<NodeId> upper_branches;             // levels 0 .. D-2
  std::vector<NodeId> last_branches;              // level D-1
  // Leaves below the left / right child of every branch node, indexed by node id.
  std::vector<std::vector<NodeId>> left_leaves;
  std::vector<std::vector<NodeId>> right_leaves;

  NodeId first_leaf() const { return leaves.front(); }
  std::size_t leaf_index(NodeId leaf) const { return leaf - first_leaf(); }
  /// Odd leaves predict -1, even leaves +1.
  static Label leaf_class(NodeId leaf) { return leaf % 2 == 1 ? -1 : 1; }
};

TreeTopology build_topology(int depth);

enum class Formulation { kBasic, kStrengthened };

std::string to_string(Formulation f);
Formulation parse_formulation(const std::string& text);

struct MiretHyperparams {
  double alpha = 0.5;
  // Threshold per level 0 .. D-1; empty means 0 everywhere.
  std::vector<double> gamma;
  double mbar = 1.0;
  double epsilon = 0.001;
  double time_limit = 3600.0;
  Formulation formulation = Formulation::kStrengthened;
  // Right-hand side of the at-least-one-split cut (strengthened form only).
  double min_splits = 1.0;

  /// Throws InputError when a field is out of range for a tree of this depth.
  void validate(int depth) const;
  std::vector<double> gamma_or_zero(int depth) const;
};

/// Ensemble statistics the surrogate model is built from, all on the same data.
struct TeStatistics {
  LevelFrequencyMatrix level_freq;  // full-level denominator
  std::vector<Label> predicted;     // forest vote
  std::vector<double> probability;  // averaged leaf fraction of the voted class
  ProximityMatrix proximity;

  static TeStatistics compute(const Forest& forest, const Dataset& data);
};

/// A built MILP plus the index tables needed to read solutions back.
struct MiretModel {
  milp::Model model;
  TreeTopology topology;
  Formulation formulation = Formulation::kBasic;
  std::size_t num_samples = 0;
  std::size_t num_features = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  FeatureSets allowed;   // J_gamma(d) per level
  PairList proximity_pairs;
  std::vector<Label> predicted;
  std::vector<double> probability;
  Eigen::MatrixXd penalty;  // |J| x D, alpha / f(j,d) on allowed features, 0 elsewhere

  std::vector<std::vector<std::size_t>> a;  // [t][j]
  std::vector<std::vector<std::size_t>> s;  // [t][j]
  std::vector<std::size_t> b;               // [t]
  std::vector<std::vector<std::size_t>> z;  // [i][leaf index]
  std::vector<std::vector<std::size_t>> q_left;   // [i][t], strengthened only
  std::vector<std::vector<std::size_t>> q_right;  // [i][t], strengthened only
};

MiretModel build_basic(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                       const TreeTopology& topo);
MiretModel build_strengthened(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                              const TreeTopology& topo);
/// Dispatches on hp.formulation.
MiretModel build_model(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                       const TreeTopology& topo);

/// Loss plus sparsity penalty recomputed from z and s alone.
double objective_value(const MiretModel& m, std::span<const double> solution);

}  // namespace miret
