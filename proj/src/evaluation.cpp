#include "miret/evaluation.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "miret/te_metrics.hpp"
#include "miret/vite.hpp"

namespace miret {

namespace {

void check_pair(std::span<const Label> a, std::span<const Label> b) {
  if (a.empty()) throw InputError("cannot evaluate on an empty dataset");
  if (a.size() != b.size()) throw InputError("prediction vectors differ in length");
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double agreement_algebraic(std::span<const Label> reference, std::span<const Label> other) {
  check_pair(reference, other);
  double s = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    s += static_cast<double>(reference[i]) * (reference[i] - other[i]);
  }
  return 100.0 * (1.0 - s / (2.0 * static_cast<double>(reference.size())));
}

double agreement_counting(std::span<const Label> reference, std::span<const Label> other) {
  check_pair(reference, other);
  std::size_t same = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) same += reference[i] == other[i] ? 1 : 0;
  return 100.0 * static_cast<double>(same) / static_cast<double>(reference.size());
}

double fidelity(const SurrogateTree& tree, const Forest& forest, const Dataset& data) {
  if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
  if (tree.num_features != data.num_features || forest.num_features != data.num_features) {
    throw InputError("feature count mismatch between predictors and data");
  }
  return agreement_algebraic(predict_forest(forest, data), predict(tree, data));
}

double accuracy(const SurrogateTree& tree, const Dataset& data) {
  if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
  return agreement_algebraic(data.labels, predict(tree, data));
}

double accuracy(const Forest& forest, const Dataset& data) {
  if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
  return agreement_algebraic(data.labels, predict_forest(forest, data));
}

Eigen::MatrixXd miret_level_frequency(const SurrogateTree& tree) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tree.num_features), tree.depth);
  for (NodeId t = 0; t < tree.num_branches(); ++t) {
    const int d = node_level(t);
    const double level_size = std::ldexp(1.0, d);
    for (std::size_t j : tree.used_features(t)) f(static_cast<Eigen::Index>(j), d) += 1.0 / level_size;
  }
  return f;
}

ProximityAgreement proximity_agreement(const SurrogateTree& tree, const Forest& forest, const Dataset& data,
                                       double together, double apart) {
  const auto prox = proximity(forest, data);
  std::vector<NodeId> leaf(data.num_rows);
  for (std::size_t i = 0; i < data.num_rows; ++i) leaf[i] = tree.leaf_for(data.row(i));
  ProximityAgreement r;
  for (std::size_t i = 0; i < data.num_rows; ++i) {
    for (std::size_t k = i + 1; k < data.num_rows; ++k) {
      const double m = prox(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      const bool same = leaf[i] == leaf[k];
      if (m >= together) {
        ++r.rf_together;
        r.both_together += same ? 1 : 0;
      }
      if (m <= apart) {
        ++r.rf_apart;
        r.both_apart += same ? 0 : 1;
      }
    }
  }
  if (r.rf_together > 0) r.u = 100.0 * static_cast<double>(r.both_together) / static_cast<double>(r.rf_together);
  if (r.rf_apart > 0) r.u_bar = 100.0 * static_cast<double>(r.both_apart) / static_cast<double>(r.rf_apart);
  return r;
}

EvalReport evaluate(const SurrogateTree& tree, const Forest& forest, const Dataset& data) {
  EvalReport r;
  r.depth = tree.depth;
  r.samples = data.num_rows;
  r.fid = fidelity(tree, forest, data);
  r.acc_miret = accuracy(tree, data);
  r.acc_rf = accuracy(forest, data);
  r.prox = proximity_agreement(tree, forest, data);
  r.level_freq = miret_level_frequency(tree);
  return r;
}

void write_report_csv_header(std::ostream& out) {
  out << "dataset,depth,formulation,split,samples,fid,acc_miret,acc_rf,u,u_bar,rf_together,rf_apart\n";
}

void write_report_csv_row(const EvalReport& r, std::ostream& out) {
  out << r.dataset << ',' << r.depth << ',' << r.formulation << ',' << r.split << ',' << r.samples << ','
      << pct(r.fid) << ',' << pct(r.acc_miret) << ',' << pct(r.acc_rf) << ',' << opt(r.prox.u) << ','
      << opt(r.prox.u_bar) << ',' << r.prox.rf_together << ',' << r.prox.rf_apart << '\n';
}

std::string format_report(const EvalReport& r, const std::vector<std::string>& names) {
  std::ostringstream s;
  s << "dataset " << r.dataset << "  split " << r.split << "  samples " << r.samples << "  depth " << r.depth
    << "  formulation " << r.formulation << '\n';
  s << "  FID        " << pct(r.fid) << " %\n";
  s << "  ACC MIRET  " << pct(r.acc_miret) << " %\n";
  s << "  ACC RF     " << pct(r.acc_rf) << " %\n";
  s << "  U          " << opt(r.prox.u) << "  (|U_RF| = " << r.prox.rf_together << ")\n";
  s << "  U-bar      " << opt(r.prox.u_bar) << "  (|U-bar_RF| = " << r.prox.rf_apart << ")\n";
  const auto labels = feature_labels(names, static_cast<std::size_t>(r.level_freq.rows()));
  s << "  surrogate level frequency (%):\n";
  for (Eigen::Index j = 0; j < r.level_freq.rows(); ++j) {
    if (r.level_freq.row(j).sum() == 0.0) continue;
    s << "    " << labels[static_cast<std::size_t>(j)];
    for (Eigen::Index d = 0; d < r.level_freq.cols(); ++d) s << "  " << percent_label(r.level_freq(j, d));
    s << '\n';
  }
  return s.str();
}

}  // namespace miret
