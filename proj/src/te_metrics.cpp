#include "miret/te_metrics.hpp"

#include <algorithm>

namespace miret {

namespace {

void require_nonempty(const Forest& forest) {
  if (forest.size() == 0) throw InputError("forest has no trees");
}

}  // namespace

LevelFrequencyMatrix level_frequency(const Forest& forest, DenominatorMode mode) {
  require_nonempty(forest);
  const int depth = forest.depth;
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(forest.num_features), depth);
  std::vector<double> splitting(static_cast<std::size_t>(depth), 0.0);
  for (std::size_t e = 0; e < forest.size(); ++e) {
    const Tree& tree = forest.trees[e];
    const auto branch_slots = static_cast<NodeId>((std::size_t{1} << depth) - 1);
    for (NodeId t = 0; t < branch_slots; ++t) {
      const TreeNode* n = tree.node(t);
      if (n == nullptr || n->kind != NodeKind::kBranch) continue;
      const int d = node_level(t);
      num(static_cast<Eigen::Index>(*n->feature), d) += forest.weights[e];
      splitting[static_cast<std::size_t>(d)] += 1.0;
    }
  }
  LevelFrequencyMatrix out;
  out.mode = mode;
  out.values = Eigen::MatrixXd::Zero(num.rows(), num.cols());
  for (int d = 0; d < depth; ++d) {
    const double denom = mode == DenominatorMode::kObservedSplits
                             ? splitting[static_cast<std::size_t>(d)]
                             : static_cast<double>(forest.size()) * static_cast<double>(std::size_t{1} << d);
    if (denom > 0.0) out.values.col(d) = num.col(d) / denom;
  }
  return out;
}

NodeFrequencyMatrix node_frequency(const Forest& forest) {
  require_nonempty(forest);
  const auto branch_slots = (std::size_t{1} << forest.depth) - 1;
  NodeFrequencyMatrix out;
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(branch_slots),
                                     static_cast<Eigen::Index>(forest.num_features));
  out.split_counts.assign(branch_slots, 0.0);
  for (std::size_t e = 0; e < forest.size(); ++e) {
    for (NodeId t = 0; t < branch_slots; ++t) {
      const TreeNode* n = forest.trees[e].node(t);
      if (n == nullptr || n->kind != NodeKind::kBranch) continue;
      out.values(t, static_cast<Eigen::Index>(*n->feature)) += forest.weights[e];
      out.split_counts[t] += 1.0;
    }
  }
  for (std::size_t t = 0; t < branch_slots; ++t) {
    if (out.split_counts[t] > 0.0) out.values.row(static_cast<Eigen::Index>(t)) /= out.split_counts[t];
  }
  return out;
}

ProximityMatrix proximity(const Forest& forest, const Dataset& data) {
  require_nonempty(forest);
  if (data.num_features != forest.num_features) throw InputError("dataset and forest feature counts differ");
  const std::size_t n = data.num_rows;
  const std::size_t n_trees = forest.size();
  const auto leaves = leaf_assignments(forest, data);
  const double n_e = static_cast<double>(n_trees);
  ProximityMatrix m = ProximityMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto rows = static_cast<std::int64_t>(n);
  // Each thread owns whole rows i and fills the upper triangle; the sum over trees
  // runs in tree order so the result matches the serial kernel bit for bit.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t k = i; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t e = 0; e < n_trees; ++e) {
        if (leaves[e * n + i] == leaves[e * n + k]) acc += forest.weights[e];
      }
      m(ii, static_cast<Eigen::Index>(k)) = acc / n_e;
    }
  }
  m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
  return m;
}

namespace reference {

ProximityMatrix proximity(const Forest& forest, const Dataset& data) {
  require_nonempty(forest);
  if (data.num_features != forest.num_features) throw InputError("dataset and forest feature counts differ");
  const std::size_t n = data.num_rows;
  const auto leaves = reference::leaf_assignments(forest, data);
  const double n_e = static_cast<double>(forest.size());
  ProximityMatrix m = ProximityMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t e = 0; e < forest.size(); ++e) {
        if (leaves[e * n + i] == leaves[e * n + k]) acc += forest.weights[e];
      }
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(k);
      m(a, b) = acc / n_e;
      m(b, a) = m(a, b);
    }
  }
  return m;
}

}  // namespace reference

FeatureSets frequency_feature_set(const LevelFrequencyMatrix& freq, const std::vector<double>& gamma) {
  const int depth = freq.depth();
  if (gamma.size() != static_cast<std::size_t>(depth)) throw InputError("need one gamma per level");
  FeatureSets out(static_cast<std::size_t>(depth));
  for (int d = 0; d < depth; ++d) {
    if (gamma[static_cast<std::size_t>(d)] < 0.0) throw InputError("gamma thresholds must be non-negative");
    for (std::size_t j = 0; j < freq.num_features(); ++j) {
      if (freq.at(j, d) > gamma[static_cast<std::size_t>(d)]) out[static_cast<std::size_t>(d)].push_back(j);
    }
  }
  return out;
}

PairList proximity_pair_set(const ProximityMatrix& prox, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("proximity threshold must lie in (0,1]");
  PairList out;
  for (Eigen::Index i = 0; i < prox.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < prox.cols(); ++k) {
      if (prox(i, k) >= threshold) out.emplace_back(i, k);
    }
  }
  return out;
}

PairList zero_proximity_pairs(const ProximityMatrix& prox) {
  PairList out;
  for (Eigen::Index i = 0; i < prox.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < prox.cols(); ++k) {
      if (prox(i, k) == 0.0) out.emplace_back(i, k);
    }
  }
  return out;
}

ThresholdRanges threshold_ranges(const Forest& forest) {
  require_nonempty(forest);
  ThresholdRanges out;
  for (const auto& tree : forest.trees) {
    for (NodeId t = 0; t < tree.slot_count(); ++t) {
      const TreeNode* n = tree.node(t);
      if (n == nullptr || n->kind != NodeKind::kBranch) continue;
      auto [it, inserted] = out.try_emplace({t, *n->feature}, ThresholdRange{*n->threshold, *n->threshold, 0});
      it->second.lo = std::min(it->second.lo, *n->threshold);
      it->second.hi = std::max(it->second.hi, *n->threshold);
      it->second.uses++;
    }
  }
  return out;
}

}  // namespace miret
