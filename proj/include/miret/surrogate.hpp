#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "miret/dataset.hpp"
#include "miret/forest.hpp"
#include "miret/miret_model.hpp"

namespace miret {

/// Magnitudes below this are treated as zero when reporting sparsity and depth.
inline constexpr double kCoefficientSnap = 1e-8;

/// Fixed-depth multivariate tree: node t sends x left iff a_t . x + b_t <= 0.
struct SurrogateTree {
  int depth = 0;
  std::size_t num_features = 0;
  double epsilon = 0.001;
  std::vector<std::vector<double>> a;  // one coefficient vector per branch node
  std::vector<double> b;

  std::size_t num_branches() const { return b.size(); }
  double hyperplane(NodeId t, std::span<const double> x) const;
  NodeId leaf_for(std::span<const double> x) const;
  /// Features with a snapped-nonzero coefficient at node t.
  std::vector<std::size_t> used_features(NodeId t) const;
  void validate() const;
  bool operator==(const SurrogateTree&) const = default;
};

/// Reads (a, b) from a solved model. Every training sample's hyperplane route
/// must reproduce its z assignment; an intercept is lowered by at most `tol`
/// when a left-routed sample sits marginally above zero. Throws InputError when
/// the routing disagrees by more than `tol`.
SurrogateTree decode(const MiretModel& model, std::span<const double> solution, const Dataset& train,
                     double tol = 1e-6);

/// Leaf reached by each training sample according to the z variables.
std::vector<NodeId> assigned_leaves(const MiretModel& model, std::span<const double> solution);

Label predict(const SurrogateTree& tree, std::span<const double> x);
std::vector<Label> predict(const SurrogateTree& tree, const Dataset& data);

/// Deepest level with a non-dummy split plus one; 0 when every node is dummy.
int effective_depth(const SurrogateTree& tree);

/// Distinct features used anywhere in the tree.
std::set<std::size_t> features_used(const SurrogateTree& tree);
/// Distinct features used by any split of the forest.
std::set<std::size_t> features_used(const Forest& forest);

/// Number of (node, feature) pairs with a nonzero coefficient.
std::size_t active_splits(const SurrogateTree& tree);

/// Per-node (negatives, positives) of the samples routed through every node id
/// of the complete tree (branches then leaves).
std::vector<std::array<std::uint64_t, 2>> node_counts(const SurrogateTree& tree, const Dataset& data);

void write_surrogate(const SurrogateTree& tree, std::ostream& out);
SurrogateTree read_surrogate(std::istream& in);
std::string surrogate_to_string(const SurrogateTree& tree);
SurrogateTree surrogate_from_string(const std::string& text);

/// Human-readable split, e.g. "-0.009x_2 - 0.003x_11 <= -0.01".
std::string describe_split(const SurrogateTree& tree, NodeId t, const std::vector<std::string>& names,
                           int precision = 3);

/// SVG drawing of the tree with per-node sample counts on `data`.
std::string render_surrogate_svg(const SurrogateTree& tree, const Dataset& data);

}  // namespace miret
