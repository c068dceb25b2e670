#pragma once

// Small fixtures shared by the unit and acceptance tests.

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "miret/dataset.hpp"
#include "miret/forest.hpp"

namespace testsupport {

struct Split {
  miret::NodeId id;
  std::size_t feature;
  double threshold;
};

// Builds a tree from its branch splits. Every child of a branch that is not itself
// a branch becomes a leaf; leaf counts default to a parity pattern and branch counts
// are the sums of their children.
inline miret::Tree make_tree(int depth, const std::vector<Split>& splits,
                             std::map<miret::NodeId, std::array<std::uint64_t, 2>> leaf_counts = {}) {
  std::map<miret::NodeId, Split> by_id;
  for (const auto& s : splits) by_id[s.id] = s;
  miret::Tree tree(depth);
  auto fill = [&](auto&& self, miret::NodeId t) -> std::array<std::uint64_t, 2> {
    miret::TreeNode n;
    n.id = t;
    auto it = by_id.find(t);
    if (it == by_id.end()) {
      n.kind = miret::NodeKind::kLeaf;
      auto c = leaf_counts.find(t);
      n.counts = c != leaf_counts.end() ? c->second : (t % 2 == 1 ? std::array<std::uint64_t, 2>{3, 1}
                                                                  : std::array<std::uint64_t, 2>{1, 3});
    } else {
      n.kind = miret::NodeKind::kBranch;
      n.feature = it->second.feature;
      n.threshold = it->second.threshold;
      const auto l = self(self, miret::left_child(t));
      const auto r = self(self, miret::right_child(t));
      n.counts = {l[0] + r[0], l[1] + r[1]};
    }
    tree.set_node(n);
    return n.counts;
  };
  fill(fill, 0);
  return tree;
}

// Three trees of depth 3 on four features; the fourth feature is never used.
inline miret::Forest toy_forest() {
  miret::Forest f;
  f.depth = 3;
  f.num_features = 4;
  f.trees.push_back(make_tree(3, {{0, 0, 0.5}, {1, 1, 0.3}, {2, 2, 0.6}, {3, 0, 0.2}, {6, 1, 0.8}}));
  f.trees.push_back(make_tree(3, {{0, 1, 0.4}, {1, 0, 0.25}, {2, 0, 0.7}, {4, 1, 0.5}}));
  f.trees.push_back(make_tree(3, {{0, 0, 0.45}, {2, 2, 0.35}, {5, 1, 0.6}, {6, 0, 0.9}}));
  f.weights = {1.0, 1.0, 1.0};
  return f;
}

// Uniform features; the label follows a noisy linear rule.
inline miret::Dataset random_dataset(std::size_t n, std::size_t features, std::uint64_t seed, double noise = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> raw(n * features);
  std::vector<miret::Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < features; ++j) {
      raw[i * features + j] = u(rng);
      s += (j % 2 == 0 ? 1.0 : -0.5) * raw[i * features + j];
    }
    labels[i] = s > 0.25 * static_cast<double>(features) ? 1 : -1;
    if (u(rng) < noise) labels[i] = -labels[i];
  }
  // Keep both classes present.
  labels[0] = -1;
  labels[n - 1] = 1;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < features; ++j) names.push_back("f" + std::to_string(j));
  return miret::make_dataset(std::move(raw), std::move(labels), std::move(names));
}

// Two features; the class is decided by x_0 with a gap around 0.5.
inline miret::Dataset separable_2d(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lo(0.0, 0.4);
  std::uniform_real_distribution<double> hi(0.6, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> raw;
  std::vector<miret::Label> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 1;
    raw.push_back(pos ? hi(rng) : lo(rng));
    raw.push_back(u(rng));
    labels.push_back(pos ? 1 : -1);
  }
  return miret::make_dataset(std::move(raw), std::move(labels), {"x1", "x2"});
}

}  // namespace testsupport
