#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "miret/dataset.hpp"

namespace miret {

using NodeId = std::uint32_t;

inline constexpr NodeId left_child(NodeId t) { return 2 * t + 1; }
inline constexpr NodeId right_child(NodeId t) { return 2 * t + 2; }
inline constexpr NodeId parent_of(NodeId t) { return (t - 1) / 2; }
/// Level of a breadth-first node id (root is level 0).
inline constexpr int node_level(NodeId t) {
  int d = 0;
  for (NodeId v = t + 1; v > 1; v >>= 1) ++d;
  return d;
}
/// Number of node slots in a complete binary tree of depth D: 2^(D+1) - 1.
inline constexpr std::size_t complete_size(int depth) { return (std::size_t{1} << (depth + 1)) - 1; }

enum class NodeKind { kBranch, kLeaf };

struct TreeNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::kLeaf;
  std::optional<std::size_t> feature;
  std::optional<double> threshold;
  std::array<std::uint64_t, 2> counts{0, 0};  // (count of -1, count of +1)

  std::uint64_t total() const { return counts[0] + counts[1]; }
  /// Majority class, ties toward -1.
  Label majority() const { return counts[1] > counts[0] ? 1 : -1; }
  bool operator==(const TreeNode&) const = default;
};

/// Univariate tree of maximum depth D with breadth-first node ids.
/// Absent slots are nodes never created (below a leaf).
class Tree {
 public:
  Tree() = default;
  explicit Tree(int depth) : depth_(depth), nodes_(complete_size(depth)) {}

  int depth() const { return depth_; }
  const TreeNode* node(NodeId id) const {
    return id < nodes_.size() && nodes_[id] ? &*nodes_[id] : nullptr;
  }
  void set_node(const TreeNode& n);
  std::size_t slot_count() const { return nodes_.size(); }

  /// Id of the leaf reached by x (left when x_j <= threshold).
  NodeId leaf_for(std::span<const double> x) const;
  Label predict(std::span<const double> x) const { return node(leaf_for(x))->majority(); }

  /// Throws InputError when the structural invariants do not hold.
  void validate(std::size_t num_features) const;

  bool operator==(const Tree&) const = default;

 private:
  int depth_ = 0;
  std::vector<std::optional<TreeNode>> nodes_;
};

struct ForestConfig {
  int depth = 3;
  std::size_t n_trees = 100;
  std::uint64_t seed = 0;
  // 0 considers all features at every node (no feature subsampling).
  std::size_t max_features = 0;
};

struct Forest {
  std::vector<Tree> trees;
  std::vector<double> weights;
  int depth = 0;
  std::size_t num_features = 0;
  std::uint64_t bootstrap_seed = 0;

  std::size_t size() const { return trees.size(); }
  void validate() const;
  bool operator==(const Forest&) const = default;
};

struct ClassProbabilities {
  std::vector<double> p_neg;
  std::vector<double> p_pos;
  std::vector<double> p;          // max(p_neg, p_pos)
  std::vector<Label> predicted;   // argmax, ties toward -1
};

/// Single CART tree on the given (possibly repeated) sample indices.
Tree train_tree(const Dataset& data, std::span<const std::size_t> samples, int depth, std::size_t max_features,
                std::uint64_t seed);

/// Random forest of bootstrap CART trees; trees are trained in parallel.
Forest train_forest(const Dataset& data, const ForestConfig& config);

Label predict_tree(const Tree& tree, std::span<const double> x);
/// Sign of the weighted vote; exact ties resolve to -1.
Label predict_forest(const Forest& forest, std::span<const double> x);
std::vector<Label> predict_forest(const Forest& forest, const Dataset& data);

/// Leaf id per (tree, sample), row-major with one row per tree.
std::vector<NodeId> leaf_assignments(const Forest& forest, const Dataset& data);

ClassProbabilities class_probabilities(const Forest& forest, const Dataset& data);

void write_forest(const Forest& forest, std::ostream& out);
Forest read_forest(std::istream& in);
std::string forest_to_string(const Forest& forest);
Forest forest_from_string(const std::string& text);

namespace reference {
/// Serial reference implementations kept for testing the parallel kernels.
Forest train_forest(const Dataset& data, const ForestConfig& config);
std::vector<NodeId> leaf_assignments(const Forest& forest, const Dataset& data);
ClassProbabilities class_probabilities(const Forest& forest, const Dataset& data);
}  // namespace reference

}  // namespace miret
