#include "miret/miret_model.hpp"

#include <cmath>

namespace miret {

using milp::Sense;
using milp::Term;
using milp::VarType;

namespace {

constexpr int kPriorityQ = 3;
constexpr int kPriorityZ = 2;
constexpr int kPriorityS = 1;

void collect_leaves(NodeId t, int depth, std::vector<NodeId>& out) {
  if (node_level(t) == depth) {
    out.push_back(t);
    return;
  }
  collect_leaves(left_child(t), depth, out);
  collect_leaves(right_child(t), depth, out);
}

std::string name(const char* prefix, std::size_t u, std::size_t v) {
  return std::string(prefix) + std::to_string(u) + "_" + std::to_string(v);
}

// Both formulations share everything except the routing activation and the q rows.
MiretModel build_common(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                        const TreeTopology& topo, Formulation form) {
  const int D = topo.depth;
  hp.validate(D);
  data.validate();
  if (stats.predicted.size() != data.num_rows || stats.probability.size() != data.num_rows) {
    throw InputError("ensemble statistics do not match the dataset");
  }
  if (stats.level_freq.num_features() != data.num_features || stats.level_freq.depth() < D) {
    throw InputError("level frequencies do not match the dataset or depth");
  }
  if (stats.proximity.rows() != static_cast<Eigen::Index>(data.num_rows)) {
    throw InputError("proximity matrix does not match the dataset");
  }

  MiretModel m;
  m.topology = topo;
  m.formulation = form;
  m.num_samples = data.num_rows;
  m.num_features = data.num_features;
  m.alpha = hp.alpha;
  m.epsilon = hp.epsilon;
  m.predicted = stats.predicted;
  m.probability = stats.probability;
  const auto gamma = hp.gamma_or_zero(D);
  LevelFrequencyMatrix freq{stats.level_freq.values.leftCols(D), stats.level_freq.mode};
  m.allowed = frequency_feature_set(freq, gamma);
  m.proximity_pairs = proximity_pair_set(stats.proximity, hp.mbar);
  m.penalty = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.num_features), D);
  for (int d = 0; d < D; ++d) {
    for (std::size_t j : m.allowed[d]) m.penalty(static_cast<Eigen::Index>(j), d) = hp.alpha / freq.at(j, d);
  }

  auto& model = m.model;
  const std::size_t nb = topo.branches.size();
  const std::size_t J = data.num_features;
  const bool strong = form == Formulation::kStrengthened;

  m.a.assign(nb, std::vector<std::size_t>(J));
  m.s.assign(nb, std::vector<std::size_t>(J));
  m.b.assign(nb, 0);
  for (NodeId t : topo.branches) {
    const int d = node_level(t);
    std::vector<bool> ok(J, false);
    for (std::size_t j : m.allowed[d]) ok[j] = true;
    for (std::size_t j = 0; j < J; ++j) {
      m.a[t][j] = model.add_variable(name("a_", t, j), -1.0, 1.0, VarType::kContinuous);
      if (!ok[j]) model.fix(m.a[t][j], 0.0);
    }
    const bool upper = strong && d <= D - 2;
    m.b[t] = model.add_variable("b_" + std::to_string(t), upper ? 0.0 : -1.0, 1.0, VarType::kContinuous);
  }
  m.z.assign(data.num_rows, std::vector<std::size_t>(topo.leaves.size()));
  double constant = 0.0;
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    const double p = stats.probability[i];
    const double y = stats.predicted[i];
    constant += 0.5 * p;
    for (NodeId l : topo.leaves) {
      const double coef = -0.5 * p * y * TreeTopology::leaf_class(l);
      m.z[i][topo.leaf_index(l)] = model.add_variable(name("z_", i, l), 0.0, 1.0, VarType::kBinary, coef, kPriorityZ);
    }
  }
  model.add_objective_constant(constant);
  for (NodeId t : topo.branches) {
    const int d = node_level(t);
    for (std::size_t j = 0; j < J; ++j) {
      const double w = m.penalty(static_cast<Eigen::Index>(j), d);
      m.s[t][j] = model.add_variable(name("s_", t, j), 0.0, 1.0, VarType::kBinary, w, kPriorityS);
      if (m.model.variable(m.a[t][j]).is_fixed()) model.fix(m.s[t][j], 0.0);
    }
  }
  if (strong) {
    m.q_left.assign(data.num_rows, std::vector<std::size_t>(nb));
    m.q_right.assign(data.num_rows, std::vector<std::size_t>(nb));
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      for (NodeId t : topo.branches) {
        m.q_left[i][t] = model.add_variable(name("qL_", i, t), 0.0, 1.0, VarType::kBinary, 0.0, kPriorityQ);
        m.q_right[i][t] = model.add_variable(name("qR_", i, t), 0.0, 1.0, VarType::kBinary, 0.0, kPriorityQ);
      }
    }
  }

  // Routing through each branch node.
  const double m_left = static_cast<double>(J) + 1.0;
  const double m_right = static_cast<double>(J) + 1.0 + hp.epsilon;
  for (NodeId t : topo.branches) {
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      std::vector<Term> hyper;
      for (std::size_t j = 0; j < J; ++j) {
        const double x = data.at(i, j);
        if (x != 0.0) hyper.push_back({m.a[t][j], x});
      }
      hyper.push_back({m.b[t], 1.0});

      auto left = hyper;
      auto right = hyper;
      if (strong) {
        left.push_back({m.q_left[i][t], m_left});
        right.push_back({m.q_right[i][t], -m_right});
      } else {
        for (NodeId l : topo.left_leaves[t]) left.push_back({m.z[i][topo.leaf_index(l)], m_left});
        for (NodeId l : topo.right_leaves[t]) right.push_back({m.z[i][topo.leaf_index(l)], -m_right});
      }
      model.add_constraint(name("route_left_", t, i), "route_left", std::move(left), Sense::kLessEqual, m_left);
      model.add_constraint(name("route_right_", t, i), "route_right", std::move(right), Sense::kGreaterEqual,
                           hp.epsilon - m_right);
    }
  }

  if (strong) {
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      model.add_constraint("root_" + std::to_string(i), "root", {{m.q_left[i][0], 1.0}, {m.q_right[i][0], 1.0}},
                           Sense::kEqual, 1.0);
    }
    for (NodeId t : topo.upper_branches) {
      const NodeId l = left_child(t);
      const NodeId r = right_child(t);
      for (std::size_t i = 0; i < data.num_rows; ++i) {
        model.add_constraint(name("parent_left_", t, i), "parent",
                             {{m.q_left[i][t], 1.0}, {m.q_left[i][l], -1.0}, {m.q_right[i][l], -1.0}},
                             Sense::kEqual, 0.0);
        model.add_constraint(name("parent_right_", t, i), "parent",
                             {{m.q_right[i][t], 1.0}, {m.q_left[i][r], -1.0}, {m.q_right[i][r], -1.0}},
                             Sense::kEqual, 0.0);
      }
    }
    for (NodeId t : topo.branches) {
      for (std::size_t i = 0; i < data.num_rows; ++i) {
        std::vector<Term> left{{m.q_left[i][t], 1.0}};
        std::vector<Term> right{{m.q_right[i][t], 1.0}};
        for (NodeId l : topo.left_leaves[t]) left.push_back({m.z[i][topo.leaf_index(l)], -1.0});
        for (NodeId l : topo.right_leaves[t]) right.push_back({m.z[i][topo.leaf_index(l)], -1.0});
        model.add_constraint(name("link_left_", t, i), "link", std::move(left), Sense::kEqual, 0.0);
        model.add_constraint(name("link_right_", t, i), "link", std::move(right), Sense::kEqual, 0.0);
      }
    }
  } else {
    for (std::size_t i = 0; i < data.num_rows; ++i) {
      std::vector<Term> terms;
      for (NodeId l : topo.leaves) terms.push_back({m.z[i][topo.leaf_index(l)], 1.0});
      model.add_constraint("assign_" + std::to_string(i), "assign", std::move(terms), Sense::kEqual, 1.0);
    }
  }

  for (const auto& [i, k] : m.proximity_pairs) {
    for (NodeId l : topo.leaves) {
      const std::size_t li = topo.leaf_index(l);
      model.add_constraint("prox_" + std::to_string(i) + "_" + std::to_string(k) + "_" + std::to_string(l), "prox",
                           {{m.z[i][li], 1.0}, {m.z[k][li], -1.0}}, Sense::kEqual, 0.0);
    }
  }

  for (NodeId t : topo.branches) {
    for (std::size_t j = 0; j < J; ++j) {
      if (model.variable(m.a[t][j]).is_fixed()) continue;
      model.add_constraint(name("sparse_up_", t, j), "sparsity", {{m.a[t][j], 1.0}, {m.s[t][j], -1.0}},
                           Sense::kLessEqual, 0.0);
      model.add_constraint(name("sparse_lo_", t, j), "sparsity", {{m.a[t][j], 1.0}, {m.s[t][j], 1.0}},
                           Sense::kGreaterEqual, 0.0);
    }
  }

  if (strong) {
    std::vector<Term> all;
    for (NodeId t : topo.branches) {
      for (std::size_t j = 0; j < J; ++j) all.push_back({m.s[t][j], 1.0});
    }
    model.add_constraint("min_splits", "cut", std::move(all), Sense::kGreaterEqual, hp.min_splits);
  }
  return m;
}

}  // namespace

TreeTopology build_topology(int depth) {
  if (depth < 1) throw InputError("tree depth must be at least 1");
  if (depth > 20) throw InputError("tree depth too large");
  TreeTopology topo;
  topo.depth = depth;
  const NodeId nb = (NodeId{1} << depth) - 1;
  topo.level_branches.resize(static_cast<std::size_t>(depth));
  topo.left_leaves.resize(nb);
  topo.right_leaves.resize(nb);
  for (NodeId t = 0; t < nb; ++t) {
    topo.branches.push_back(t);
    const int d = node_level(t);
    topo.level_branches[static_cast<std::size_t>(d)].push_back(t);
    (d <= depth - 2 ? topo.upper_branches : topo.last_branches).push_back(t);
    collect_leaves(left_child(t), depth, topo.left_leaves[t]);
    collect_leaves(right_child(t), depth, topo.right_leaves[t]);
  }
  for (NodeId l = nb; l < 2 * nb + 1; ++l) topo.leaves.push_back(l);
  return topo;
}

std::string to_string(Formulation f) { return f == Formulation::kBasic ? "basic" : "strengthened"; }

Formulation parse_formulation(const std::string& text) {
  if (text == "basic") return Formulation::kBasic;
  if (text == "strengthened") return Formulation::kStrengthened;
  throw InputError("unknown formulation: " + text);
}

void MiretHyperparams::validate(int depth) const {
  if (!(alpha >= 0.0)) throw InputError("alpha must be non-negative");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(mbar > 0.0 && mbar <= 1.0)) throw InputError("proximity threshold must lie in (0, 1]");
  if (!(time_limit > 0.0)) throw InputError("time limit must be positive");
  if (!gamma.empty() && gamma.size() != static_cast<std::size_t>(depth)) {
    throw InputError("gamma needs one value per tree level");
  }
  for (double g : gamma) {
    if (!(g >= 0.0)) throw InputError("gamma values must be non-negative");
  }
}

std::vector<double> MiretHyperparams::gamma_or_zero(int depth) const {
  return gamma.empty() ? std::vector<double>(static_cast<std::size_t>(depth), 0.0) : gamma;
}

TeStatistics TeStatistics::compute(const Forest& forest, const Dataset& data) {
  TeStatistics st;
  st.level_freq = level_frequency(forest, DenominatorMode::kFullLevel);
  st.predicted = predict_forest(forest, data);
  const auto probs = class_probabilities(forest, data);
  st.probability.resize(data.num_rows);
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    st.probability[i] = st.predicted[i] == 1 ? probs.p_pos[i] : probs.p_neg[i];
  }
  st.proximity = miret::proximity(forest, data);
  return st;
}

MiretModel build_basic(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                       const TreeTopology& topo) {
  return build_common(data, stats, hp, topo, Formulation::kBasic);
}

MiretModel build_strengthened(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                              const TreeTopology& topo) {
  return build_common(data, stats, hp, topo, Formulation::kStrengthened);
}

MiretModel build_model(const Dataset& data, const TeStatistics& stats, const MiretHyperparams& hp,
                       const TreeTopology& topo) {
  return build_common(data, stats, hp, topo, hp.formulation);
}

double objective_value(const MiretModel& m, std::span<const double> solution) {
  if (solution.size() != m.model.num_variables()) throw InputError("solution does not assign every variable");
  double loss = 0.0;
  for (std::size_t i = 0; i < m.num_samples; ++i) {
    double out = 0.0;
    for (NodeId l : m.topology.leaves) out += TreeTopology::leaf_class(l) * solution[m.z[i][m.topology.leaf_index(l)]];
    const double y = m.predicted[i];
    loss += 0.5 * m.probability[i] * y * (y - out);
  }
  double penalty = 0.0;
  for (NodeId t : m.topology.branches) {
    const int d = node_level(t);
    for (std::size_t j = 0; j < m.num_features; ++j) {
      penalty += m.penalty(static_cast<Eigen::Index>(j), d) * solution[m.s[t][j]];
    }
  }
  return loss + penalty;
}

}  // namespace miret
