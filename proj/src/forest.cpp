#include "miret/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "miret/random.hpp"

namespace miret {

namespace {

constexpr double kImpurityTol = 1e-12;

double gini(double neg, double pos) {
  const double n = neg + pos;
  if (n <= 0.0) return 0.0;
  const double a = neg / n;
  const double b = pos / n;
  return 1.0 - a * a - b * b;
}

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = INFINITY;
};

std::array<std::uint64_t, 2> count_classes(const Dataset& data, std::span<const std::size_t> samples) {
  std::array<std::uint64_t, 2> c{0, 0};
  for (std::size_t i : samples) c[data.labels[i] > 0 ? 1 : 0]++;
  return c;
}

std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                      std::span<const std::size_t> features) {
  const auto counts = count_classes(data, samples);
  const double n = static_cast<double>(samples.size());
  const double parent = gini(static_cast<double>(counts[0]), static_cast<double>(counts[1]));
  SplitChoice best;
  std::vector<std::size_t> order(samples.begin(), samples.end());
  for (std::size_t j : features) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data.at(a, j) < data.at(b, j); });
    double left_neg = 0.0;
    double left_pos = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      (data.labels[order[k]] > 0 ? left_pos : left_neg) += 1.0;
      const double v = data.at(order[k], j);
      const double next = data.at(order[k + 1], j);
      if (!(next > v)) continue;
      const double nl = left_neg + left_pos;
      const double right_neg = static_cast<double>(counts[0]) - left_neg;
      const double right_pos = static_cast<double>(counts[1]) - left_pos;
      const double imp = (nl * gini(left_neg, left_pos) + (n - nl) * gini(right_neg, right_pos)) / n;
      if (imp < best.impurity - kImpurityTol) {
        best.impurity = imp;
        best.feature = j;
        best.threshold = 0.5 * (v + next);
      }
    }
  }
  if (!std::isfinite(best.impurity) || !(best.impurity < parent - kImpurityTol)) return std::nullopt;
  return best;
}

void grow(Tree& tree, const Dataset& data, std::vector<std::size_t> samples, NodeId id, int level, int depth,
          std::size_t max_features, Rng& rng) {
  TreeNode node;
  node.id = id;
  node.counts = count_classes(data, samples);
  const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
  std::optional<SplitChoice> choice;
  if (!pure && level < depth) {
    std::vector<std::size_t> features(data.num_features);
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (max_features > 0 && max_features < data.num_features) {
      std::shuffle(features.begin(), features.end(), rng);
      features.resize(max_features);
      std::sort(features.begin(), features.end());
    }
    choice = best_split(data, samples, features);
  }
  if (!choice) {
    node.kind = NodeKind::kLeaf;
    tree.set_node(node);
    return;
  }
  node.kind = NodeKind::kBranch;
  node.feature = choice->feature;
  node.threshold = choice->threshold;
  tree.set_node(node);
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (std::size_t i : samples) (data.at(i, choice->feature) <= choice->threshold ? left : right).push_back(i);
  samples.clear();
  samples.shrink_to_fit();
  grow(tree, data, std::move(left), left_child(id), level + 1, depth, max_features, rng);
  grow(tree, data, std::move(right), right_child(id), level + 1, depth, max_features, rng);
}

void check_config(const Dataset& data, const ForestConfig& config) {
  if (data.empty()) throw InputError("cannot train a forest on an empty dataset");
  if (config.depth < 1) throw InputError("forest depth must be at least 1");
  if (config.n_trees < 1) throw InputError("forest needs at least one tree");
}

Tree bootstrap_tree(const Dataset& data, const ForestConfig& config, std::size_t e) {
  Rng rng(derive_seed(config.seed, e));
  std::uniform_int_distribution<std::size_t> pick(0, data.num_rows - 1);
  std::vector<std::size_t> sample(data.num_rows);
  for (auto& s : sample) s = pick(rng);
  std::sort(sample.begin(), sample.end());
  Tree tree(config.depth);
  grow(tree, data, std::move(sample), 0, 0, config.depth, config.max_features, rng);
  return tree;
}

Forest empty_forest(const Dataset& data, const ForestConfig& config) {
  Forest f;
  f.trees.resize(config.n_trees);
  f.weights.assign(config.n_trees, 1.0);
  f.depth = config.depth;
  f.num_features = data.num_features;
  f.bootstrap_seed = config.seed;
  return f;
}

double leaf_fraction_pos(const TreeNode& leaf) {
  if (leaf.total() == 0) throw InputError("sample routed to a leaf with zero training count");
  return static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.total());
}

void fill_probability(ClassProbabilities& out, std::size_t i, double p_pos) {
  out.p_pos[i] = p_pos;
  out.p_neg[i] = 1.0 - p_pos;
  out.p[i] = std::max(out.p_neg[i], out.p_pos[i]);
  out.predicted[i] = out.p_pos[i] > out.p_neg[i] ? 1 : -1;
}

ClassProbabilities make_probabilities(std::size_t n) {
  ClassProbabilities out;
  out.p_neg.assign(n, 0.0);
  out.p_pos.assign(n, 0.0);
  out.p.assign(n, 0.0);
  out.predicted.assign(n, -1);
  return out;
}

}  // namespace

void Tree::set_node(const TreeNode& n) {
  if (n.id >= nodes_.size()) throw InputError("node id " + std::to_string(n.id) + " exceeds tree depth");
  nodes_[n.id] = n;
}

NodeId Tree::leaf_for(std::span<const double> x) const {
  NodeId t = 0;
  for (;;) {
    const TreeNode* n = node(t);
    if (n == nullptr) throw InputError("tree routes to a missing node");
    if (n->kind == NodeKind::kLeaf) return t;
    t = x[*n->feature] <= *n->threshold ? left_child(t) : right_child(t);
  }
}

void Tree::validate(std::size_t num_features) const {
  if (node(0) == nullptr) throw InputError("tree has no root");
  for (NodeId t = 0; t < nodes_.size(); ++t) {
    const TreeNode* n = node(t);
    if (n == nullptr) continue;
    if (t > 0) {
      const TreeNode* p = node(parent_of(t));
      if (p == nullptr || p->kind != NodeKind::kBranch) throw InputError("node without branch parent");
    }
    if (n->kind == NodeKind::kBranch) {
      if (!n->feature || !n->threshold) throw InputError("branch node missing split");
      if (*n->feature >= num_features) throw InputError("split feature out of range");
      if (node_level(t) >= depth_) throw InputError("branch node at maximum depth");
      const TreeNode* l = node(left_child(t));
      const TreeNode* r = node(right_child(t));
      if (l == nullptr || r == nullptr) throw InputError("branch node missing a child");
      if (l->counts[0] + r->counts[0] != n->counts[0] || l->counts[1] + r->counts[1] != n->counts[1]) {
        throw InputError("child counts do not sum to parent counts");
      }
    } else if (n->feature || n->threshold) {
      throw InputError("leaf node carries a split");
    }
  }
}

void Forest::validate() const {
  if (trees.size() != weights.size()) throw InputError("weight count differs from tree count");
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("tree weights must be non-negative");
  }
  for (const auto& t : trees) {
    if (t.depth() != depth) throw InputError("tree depth differs from forest depth");
    t.validate(num_features);
  }
}

Tree train_tree(const Dataset& data, std::span<const std::size_t> samples, int depth, std::size_t max_features,
                std::uint64_t seed) {
  Rng rng(seed);
  Tree tree(depth);
  grow(tree, data, std::vector<std::size_t>(samples.begin(), samples.end()), 0, 0, depth, max_features, rng);
  return tree;
}

Forest train_forest(const Dataset& data, const ForestConfig& config) {
  check_config(data, config);
  Forest f = empty_forest(data, config);
  const auto n = static_cast<std::int64_t>(config.n_trees);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t e = 0; e < n; ++e) {
    f.trees[static_cast<std::size_t>(e)] = bootstrap_tree(data, config, static_cast<std::size_t>(e));
  }
  return f;
}

Label predict_tree(const Tree& tree, std::span<const double> x) { return tree.predict(x); }

Label predict_forest(const Forest& forest, std::span<const double> x) {
  double vote = 0.0;
  for (std::size_t e = 0; e < forest.size(); ++e) vote += forest.weights[e] * forest.trees[e].predict(x);
  return vote > 0.0 ? 1 : -1;
}

std::vector<Label> predict_forest(const Forest& forest, const Dataset& data) {
  std::vector<Label> out(data.num_rows);
  const auto n = static_cast<std::int64_t>(data.num_rows);
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) out[i] = predict_forest(forest, data.row(static_cast<std::size_t>(i)));
  return out;
}

std::vector<NodeId> leaf_assignments(const Forest& forest, const Dataset& data) {
  std::vector<NodeId> out(forest.size() * data.num_rows);
  const auto n_trees = static_cast<std::int64_t>(forest.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < n_trees; ++e) {
    const auto& tree = forest.trees[static_cast<std::size_t>(e)];
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      out[static_cast<std::size_t>(e) * data.num_rows + i] = tree.leaf_for(data.row(i));
    }
  }
  return out;
}

ClassProbabilities class_probabilities(const Forest& forest, const Dataset& data) {
  ClassProbabilities out = make_probabilities(data.num_rows);
  const auto n = static_cast<std::int64_t>(data.num_rows);
  const double n_e = static_cast<double>(forest.size());
  bool bad = false;
#pragma omp parallel for reduction(|| : bad)
  for (std::int64_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double sum = 0.0;
    for (const auto& tree : forest.trees) {
      const TreeNode& leaf = *tree.node(tree.leaf_for(data.row(i)));
      if (leaf.total() == 0) {
        bad = true;
        break;
      }
      sum += static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.total());
    }
    fill_probability(out, i, sum / n_e);
  }
  if (bad) throw InputError("sample routed to a leaf with zero training count");
  return out;
}

namespace reference {

Forest train_forest(const Dataset& data, const ForestConfig& config) {
  check_config(data, config);
  Forest f = empty_forest(data, config);
  for (std::size_t e = 0; e < config.n_trees; ++e) f.trees[e] = bootstrap_tree(data, config, e);
  return f;
}

std::vector<NodeId> leaf_assignments(const Forest& forest, const Dataset& data) {
  std::vector<NodeId> out;
  out.reserve(forest.size() * data.num_rows);
  for (const auto& tree : forest.trees) {
    for (std::size_t i = 0; i < data.num_rows; ++i) out.push_back(tree.leaf_for(data.row(i)));
  }
  return out;
}

ClassProbabilities class_probabilities(const Forest& forest, const Dataset& data) {
  ClassProbabilities out = make_probabilities(data.num_rows);
  const double n_e = static_cast<double>(forest.size());
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += leaf_fraction_pos(*tree.node(tree.leaf_for(data.row(i))));
    fill_probability(out, i, sum / n_e);
  }
  return out;
}

}  // namespace reference

void write_forest(const Forest& forest, std::ostream& out) {
  out << "miret-forest 1\n";
  out << "trees " << forest.size() << " depth " << forest.depth << " features " << forest.num_features << " seed "
      << forest.bootstrap_seed << '\n';
  out << "weights";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (double w : forest.weights) out << ' ' << num(w);
  out << '\n';
  for (std::size_t e = 0; e < forest.size(); ++e) {
    const auto& tree = forest.trees[e];
    for (NodeId t = 0; t < tree.slot_count(); ++t) {
      const TreeNode* n = tree.node(t);
      if (n == nullptr) continue;
      out << e << ' ' << t << ' ';
      if (n->kind == NodeKind::kBranch) {
        out << "branch " << *n->feature << ' ' << num(*n->threshold);
      } else {
        out << "leaf - -";
      }
      out << ' ' << n->counts[0] << ' ' << n->counts[1] << '\n';
    }
  }
  out << "end\n";
}

Forest read_forest(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "miret-forest" || version != 1) throw InputError("not a miret-forest v1 file");
  Forest f;
  std::size_t n_trees = 0;
  std::string k1, k2, k3, k4;
  if (!(in >> k1 >> n_trees >> k2 >> f.depth >> k3 >> f.num_features >> k4 >> f.bootstrap_seed) || k1 != "trees" ||
      k2 != "depth" || k3 != "features" || k4 != "seed") {
    throw InputError("malformed forest header");
  }
  if (f.depth < 1 || n_trees == 0) throw InputError("forest header has invalid depth or size");
  if (!(in >> tag) || tag != "weights") throw InputError("missing weights line");
  f.weights.resize(n_trees);
  for (auto& w : f.weights) {
    if (!(in >> w)) throw InputError("malformed weights");
  }
  f.trees.assign(n_trees, Tree(f.depth));
  for (;;) {
    std::string first;
    if (!(in >> first)) throw InputError("forest file truncated (missing 'end')");
    if (first == "end") break;
    std::size_t e = 0;
    TreeNode n;
    std::string kind, feat, thr;
    try {
      e = std::stoul(first);
    } catch (const std::exception&) {
      throw InputError("malformed node record");
    }
    if (!(in >> n.id >> kind >> feat >> thr >> n.counts[0] >> n.counts[1])) throw InputError("malformed node record");
    if (e >= n_trees) throw InputError("node record references unknown tree");
    if (kind == "branch") {
      n.kind = NodeKind::kBranch;
      n.feature = std::stoul(feat);
      n.threshold = std::stod(thr);
    } else if (kind == "leaf") {
      n.kind = NodeKind::kLeaf;
    } else {
      throw InputError("unknown node kind '" + kind + "'");
    }
    f.trees[e].set_node(n);
  }
  f.validate();
  return f;
}

std::string forest_to_string(const Forest& forest) {
  std::ostringstream os;
  write_forest(forest, os);
  return os.str();
}

Forest forest_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_forest(is);
}

}  // namespace miret
