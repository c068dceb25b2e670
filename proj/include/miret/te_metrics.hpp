#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "miret/forest.hpp"

namespace miret {

enum class DenominatorMode {
  kObservedSplits,  // divide by the number of nodes that split at level d
  kFullLevel,       // divide by |E| * 2^d
};

/// f(j, d): |J| x D matrix of feature usage per level.
struct LevelFrequencyMatrix {
  Eigen::MatrixXd values;
  DenominatorMode mode = DenominatorMode::kObservedSplits;

  std::size_t num_features() const { return static_cast<std::size_t>(values.rows()); }
  int depth() const { return static_cast<int>(values.cols()); }
  double at(std::size_t j, int d) const { return values(static_cast<Eigen::Index>(j), d); }
};

/// f_node(t, j): one row per branch node id t in [0, 2^D - 1).
struct NodeFrequencyMatrix {
  Eigen::MatrixXd values;
  std::vector<double> split_counts;  // number of trees in which node t splits
};

/// Dense symmetric |I| x |I| proximity matrix.
using ProximityMatrix = Eigen::MatrixXd;

struct ThresholdRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t uses = 0;
};

/// Keyed by (node id, feature).
using ThresholdRanges = std::map<std::pair<NodeId, std::size_t>, ThresholdRange>;

/// Per-level feature index sets J_gamma(d).
using FeatureSets = std::vector<std::vector<std::size_t>>;

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

LevelFrequencyMatrix level_frequency(const Forest& forest, DenominatorMode mode);
NodeFrequencyMatrix node_frequency(const Forest& forest);

/// Weighted fraction of trees in which samples i and k share a leaf.
ProximityMatrix proximity(const Forest& forest, const Dataset& data);

/// {j : f(j,d) > gamma_d} for every level (strict).
FeatureSets frequency_feature_set(const LevelFrequencyMatrix& freq, const std::vector<double>& gamma);

/// Ordered pairs (i < k) with m(i,k) >= threshold.
PairList proximity_pair_set(const ProximityMatrix& prox, double threshold);

/// Pairs (i < k) with m(i,k) == 0.
PairList zero_proximity_pairs(const ProximityMatrix& prox);

ThresholdRanges threshold_ranges(const Forest& forest);

namespace reference {
ProximityMatrix proximity(const Forest& forest, const Dataset& data);
}  // namespace reference

}  // namespace miret
