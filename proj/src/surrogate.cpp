#include "miret/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "miret/vite.hpp"

namespace miret {

namespace {

std::string num(double v, const char* f = "%.17g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Path from the root to `leaf`: (branch node, went right).
std::vector<std::pair<NodeId, bool>> path_to(NodeId leaf) {
  std::vector<std::pair<NodeId, bool>> path;
  for (NodeId v = leaf; v != 0; v = parent_of(v)) path.emplace_back(parent_of(v), v % 2 == 0);
  return {path.rbegin(), path.rend()};
}

}  // namespace

double SurrogateTree::hyperplane(NodeId t, std::span<const double> x) const {
  const auto& at = a[t];
  double h = 0.0;
  for (std::size_t j = 0; j < at.size(); ++j) h += at[j] * x[j];
  return h + b[t];
}

NodeId SurrogateTree::leaf_for(std::span<const double> x) const {
  NodeId t = 0;
  while (t < num_branches()) t = hyperplane(t, x) <= 0.0 ? left_child(t) : right_child(t);
  return t;
}

std::vector<std::size_t> SurrogateTree::used_features(NodeId t) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < a[t].size(); ++j) {
    if (std::abs(a[t][j]) >= kCoefficientSnap) out.push_back(j);
  }
  return out;
}

void SurrogateTree::validate() const {
  if (depth < 1) throw InputError("surrogate depth must be at least 1");
  const std::size_t nb = (std::size_t{1} << depth) - 1;
  if (a.size() != nb || b.size() != nb) throw InputError("surrogate node count does not match its depth");
  for (const auto& at : a) {
    if (at.size() != num_features) throw InputError("surrogate coefficient vector has the wrong length");
    for (double v : at) {
      if (!std::isfinite(v)) throw InputError("surrogate coefficient is not finite");
    }
  }
  if (!(epsilon > 0.0)) throw InputError("surrogate epsilon must be positive");
}

std::vector<NodeId> assigned_leaves(const MiretModel& model, std::span<const double> solution) {
  if (solution.size() != model.model.num_variables()) throw InputError("solution does not assign every variable");
  std::vector<NodeId> out(model.num_samples);
  for (std::size_t i = 0; i < model.num_samples; ++i) {
    std::optional<NodeId> leaf;
    for (NodeId l : model.topology.leaves) {
      if (solution[model.z[i][model.topology.leaf_index(l)]] > 0.5) {
        if (leaf) throw InputError("sample " + std::to_string(i) + " is assigned to two leaves");
        leaf = l;
      }
    }
    if (!leaf) throw InputError("sample " + std::to_string(i) + " is not assigned to a leaf");
    out[i] = *leaf;
  }
  return out;
}

SurrogateTree decode(const MiretModel& model, std::span<const double> solution, const Dataset& train, double tol) {
  if (train.num_rows != model.num_samples || train.num_features != model.num_features) {
    throw InputError("training data does not match the model");
  }
  const auto leaves = assigned_leaves(model, solution);
  SurrogateTree tree;
  tree.depth = model.topology.depth;
  tree.num_features = model.num_features;
  tree.epsilon = model.epsilon;
  const std::size_t nb = model.topology.branches.size();
  tree.a.assign(nb, std::vector<double>(model.num_features, 0.0));
  tree.b.assign(nb, 0.0);
  for (NodeId t = 0; t < nb; ++t) {
    for (std::size_t j = 0; j < model.num_features; ++j) {
      // A coefficient whose indicator is off is zero by construction.
      if (solution[model.s[t][j]] > 0.5) tree.a[t][j] = solution[model.a[t][j]];
    }
    tree.b[t] = solution[model.b[t]];
  }

  // Largest hyperplane value among samples that must turn left at each node.
  std::vector<double> left_excess(nb, 0.0);
  for (std::size_t i = 0; i < train.num_rows; ++i) {
    const auto x = train.row(i);
    for (const auto& [t, right] : path_to(leaves[i])) {
      const double h = tree.hyperplane(t, x);
      if (right) {
        if (h <= 0.0) {
          throw InputError("sample " + std::to_string(i) + " should turn right at node " + std::to_string(t) +
                           " but a.x + b = " + num(h));
        }
      } else if (h > tol) {
        throw InputError("sample " + std::to_string(i) + " should turn left at node " + std::to_string(t) +
                         " but a.x + b = " + num(h));
      } else {
        left_excess[t] = std::max(left_excess[t], h);
      }
    }
  }
  for (NodeId t = 0; t < nb; ++t) {
    if (left_excess[t] > 0.0) tree.b[t] -= left_excess[t];
  }
  // Round-off can leave a left-turning sample a hair above zero; step b down until none is.
  for (int pass = 0; pass < 8; ++pass) {
    bool clean = true;
    for (std::size_t i = 0; i < train.num_rows; ++i) {
      const auto x = train.row(i);
      for (const auto& [t, right] : path_to(leaves[i])) {
        const double h = tree.hyperplane(t, x);
        if (!right && h > 0.0) {
          tree.b[t] = std::nextafter(tree.b[t] - h, -std::numeric_limits<double>::infinity());
          clean = false;
        }
      }
    }
    if (clean) break;
  }
  for (std::size_t i = 0; i < train.num_rows; ++i) {
    if (tree.leaf_for(train.row(i)) != leaves[i]) {
      throw InputError("decoded routing of sample " + std::to_string(i) + " disagrees with its leaf assignment");
    }
  }
  return tree;
}

Label predict(const SurrogateTree& tree, std::span<const double> x) {
  return TreeTopology::leaf_class(tree.leaf_for(x));
}

std::vector<Label> predict(const SurrogateTree& tree, const Dataset& data) {
  std::vector<Label> out(data.num_rows);
  for (std::size_t i = 0; i < data.num_rows; ++i) out[i] = predict(tree, data.row(i));
  return out;
}

int effective_depth(const SurrogateTree& tree) {
  int deepest = -1;
  for (NodeId t = 0; t < tree.num_branches(); ++t) {
    if (!tree.used_features(t).empty()) deepest = std::max(deepest, node_level(t));
  }
  return deepest + 1;
}

std::set<std::size_t> features_used(const SurrogateTree& tree) {
  std::set<std::size_t> out;
  for (NodeId t = 0; t < tree.num_branches(); ++t) {
    for (std::size_t j : tree.used_features(t)) out.insert(j);
  }
  return out;
}

std::set<std::size_t> features_used(const Forest& forest) {
  std::set<std::size_t> out;
  for (const auto& tree : forest.trees) {
    for (std::size_t id = 0; id < tree.slot_count(); ++id) {
      const auto* n = tree.node(static_cast<NodeId>(id));
      if (n && n->kind == NodeKind::kBranch) out.insert(*n->feature);
    }
  }
  return out;
}

std::size_t active_splits(const SurrogateTree& tree) {
  std::size_t n = 0;
  for (NodeId t = 0; t < tree.num_branches(); ++t) n += tree.used_features(t).size();
  return n;
}

std::vector<std::array<std::uint64_t, 2>> node_counts(const SurrogateTree& tree, const Dataset& data) {
  std::vector<std::array<std::uint64_t, 2>> counts(2 * tree.num_branches() + 1, {0, 0});
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    const auto x = data.row(i);
    const int cls = data.labels[i] == 1 ? 1 : 0;
    NodeId t = 0;
    ++counts[t][cls];
    while (t < tree.num_branches()) {
      t = tree.hyperplane(t, x) <= 0.0 ? left_child(t) : right_child(t);
      ++counts[t][cls];
    }
  }
  return counts;
}

void write_surrogate(const SurrogateTree& tree, std::ostream& out) {
  tree.validate();
  out << "miret-surrogate 1\n";
  out << "depth " << tree.depth << " features " << tree.num_features << " epsilon " << num(tree.epsilon) << '\n';
  for (NodeId t = 0; t < tree.num_branches(); ++t) {
    std::size_t nnz = 0;
    for (double v : tree.a[t]) nnz += v != 0.0 ? 1 : 0;
    out << "node " << t << " b " << num(tree.b[t]) << " nnz " << nnz;
    for (std::size_t j = 0; j < tree.num_features; ++j) {
      if (tree.a[t][j] != 0.0) out << ' ' << j << ':' << num(tree.a[t][j]);
    }
    out << '\n';
  }
  out << "end\n";
}

SurrogateTree read_surrogate(std::istream& in) {
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "miret-surrogate" || version != 1) {
    throw InputError("not a surrogate tree file");
  }
  SurrogateTree tree;
  std::string k1, k2, k3;
  if (!(in >> k1 >> tree.depth >> k2 >> tree.num_features >> k3 >> tree.epsilon) || k1 != "depth" ||
      k2 != "features" || k3 != "epsilon") {
    throw InputError("malformed surrogate header");
  }
  if (tree.depth < 1 || tree.depth > 20) throw InputError("surrogate depth out of range");
  const std::size_t nb = (std::size_t{1} << tree.depth) - 1;
  tree.a.assign(nb, std::vector<double>(tree.num_features, 0.0));
  tree.b.assign(nb, 0.0);
  std::vector<bool> seen(nb, false);
  while (in >> word) {
    if (word == "end") break;
    if (word != "node") throw InputError("unexpected token in surrogate file: " + word);
    std::size_t t = 0;
    std::size_t nnz = 0;
    std::string kb, kn;
    if (!(in >> t >> kb) || kb != "b" || t >= nb) throw InputError("malformed surrogate node record");
    if (!(in >> tree.b[t] >> kn >> nnz) || kn != "nnz") throw InputError("malformed surrogate node record");
    for (std::size_t k = 0; k < nnz; ++k) {
      std::string entry;
      if (!(in >> entry)) throw InputError("truncated surrogate node record");
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw InputError("malformed coefficient: " + entry);
      const std::size_t j = std::stoul(entry.substr(0, colon));
      if (j >= tree.num_features) throw InputError("coefficient feature out of range");
      tree.a[t][j] = std::stod(entry.substr(colon + 1));
    }
    seen[t] = true;
  }
  if (word != "end") throw InputError("surrogate file has no end marker");
  for (std::size_t t = 0; t < nb; ++t) {
    if (!seen[t]) throw InputError("surrogate file misses node " + std::to_string(t));
  }
  tree.validate();
  return tree;
}

std::string surrogate_to_string(const SurrogateTree& tree) {
  std::ostringstream s;
  write_surrogate(tree, s);
  return s.str();
}

SurrogateTree surrogate_from_string(const std::string& text) {
  std::istringstream s(text);
  return read_surrogate(s);
}

std::string describe_split(const SurrogateTree& tree, NodeId t, const std::vector<std::string>& names, int precision) {
  const auto labels = feature_labels(names, tree.num_features);
  const auto used = tree.used_features(t);
  if (used.empty()) return tree.b[t] <= 0.0 ? "dummy (all left)" : "dummy (all right)";
  char f[16];
  std::snprintf(f, sizeof f, "%%.%dg", precision);
  std::string out;
  for (std::size_t k = 0; k < used.size(); ++k) {
    const double c = tree.a[t][used[k]];
    const std::string mag = std::abs(c) == 1.0 ? "" : num(std::abs(c), f);
    if (k == 0) {
      out += (c < 0 ? "-" : "") + mag + labels[used[k]];
    } else {
      out += (c < 0 ? " - " : " + ") + mag + labels[used[k]];
    }
  }
  return out + " <= " + num(-tree.b[t] == 0.0 ? 0.0 : -tree.b[t], f);
}

std::string render_surrogate_svg(const SurrogateTree& tree, const Dataset& data) {
  tree.validate();
  const auto counts = node_counts(tree, data);
  TreeLayout lay;
  lay.depth = tree.depth;
  lay.width = std::max(640.0, 170.0 * std::ldexp(1.0, tree.depth));
  lay.top = 30.0;
  lay.level_height = 90.0;
  const double height = lay.top + lay.level_height * tree.depth + 70.0;
  const double box_w = 160.0;
  const double box_h = 40.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(lay.width, "%.2f") << "\" height=\""
    << num(height, "%.2f") << "\" font-family=\"sans-serif\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << num(lay.width, "%.2f") << "\" height=\"" << num(height, "%.2f")
    << "\" fill=\"#ffffff\"/>\n";
  const NodeId total = static_cast<NodeId>(counts.size());
  for (NodeId t = 0; t < tree.num_branches(); ++t) {
    for (NodeId c : {left_child(t), right_child(t)}) {
      s << "<line x1=\"" << num(lay.x(t), "%.2f") << "\" y1=\"" << num(lay.y(t) + box_h, "%.2f") << "\" x2=\""
        << num(lay.x(c), "%.2f") << "\" y2=\"" << num(lay.y(c), "%.2f") << "\" stroke=\"#888888\"/>\n";
    }
  }
  for (NodeId t = 0; t < total; ++t) {
    const bool leaf = t >= tree.num_branches();
    const double x0 = lay.x(t) - box_w / 2;
    const double y0 = lay.y(t);
    const std::string text = leaf ? "class " + std::to_string(TreeTopology::leaf_class(t))
                                  : describe_split(tree, t, data.feature_names);
    s << "<g class=\"" << (leaf ? "leaf" : "branch") << "\" data-node=\"" << t << "\">\n";
    s << "<rect x=\"" << num(x0, "%.2f") << "\" y=\"" << num(y0, "%.2f") << "\" width=\"" << num(box_w, "%.2f")
      << "\" height=\"" << num(box_h, "%.2f") << "\" rx=\"4\" fill=\"" << (leaf ? "#eef3fb" : "#ffffff")
      << "\" stroke=\"#444444\"/>\n";
    s << "<text x=\"" << num(lay.x(t), "%.2f") << "\" y=\"" << num(y0 + 16, "%.2f")
      << "\" text-anchor=\"middle\" font-size=\"10\">" << xml_escape(text) << "</text>\n";
    s << "<text class=\"counts\" x=\"" << num(lay.x(t), "%.2f") << "\" y=\"" << num(y0 + 32, "%.2f")
      << "\" text-anchor=\"middle\" font-size=\"10\">[" << counts[t][0] << ", " << counts[t][1] << "]</text>\n";
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace miret
