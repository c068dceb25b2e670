#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "miret/dataset.hpp"
#include "miret/forest.hpp"
#include "miret/surrogate.hpp"

namespace miret {

/// 100 * (1 - (1 / 2n) * sum r_i (r_i - q_i)) for +-1 vectors r (reference) and q.
double agreement_algebraic(std::span<const Label> reference, std::span<const Label> other);
/// 100 * (number of equal entries) / n.
double agreement_counting(std::span<const Label> reference, std::span<const Label> other);

/// Percentage of samples on which the surrogate reproduces the forest vote.
double fidelity(const SurrogateTree& tree, const Forest& forest, const Dataset& data);
double accuracy(const SurrogateTree& tree, const Dataset& data);
double accuracy(const Forest& forest, const Dataset& data);

/// |J| x D: fraction of the level's branch nodes that use feature j.
Eigen::MatrixXd miret_level_frequency(const SurrogateTree& tree);

struct ProximityAgreement {
  std::size_t rf_together = 0;   // pairs with forest proximity >= the upper threshold
  std::size_t rf_apart = 0;      // pairs with forest proximity <= the lower threshold
  std::size_t both_together = 0;
  std::size_t both_apart = 0;
  std::optional<double> u;       // percent; undefined without co-leafed forest pairs
  std::optional<double> u_bar;
};

/// Compares the pair partitions of the forest (always / never in one leaf) and
/// of the surrogate (same / different leaf) on `data`.
ProximityAgreement proximity_agreement(const SurrogateTree& tree, const Forest& forest, const Dataset& data,
                                       double together = 1.0, double apart = 0.0);

struct EvalReport {
  std::string dataset;
  int depth = 0;
  std::string formulation;
  std::string split;  // "train" or "test"
  std::size_t samples = 0;
  double fid = 0.0;
  double acc_miret = 0.0;
  double acc_rf = 0.0;
  ProximityAgreement prox;
  Eigen::MatrixXd level_freq;
};

EvalReport evaluate(const SurrogateTree& tree, const Forest& forest, const Dataset& data);

void write_report_csv_header(std::ostream& out);
void write_report_csv_row(const EvalReport& report, std::ostream& out);
/// Plain-text table for terminals.
std::string format_report(const EvalReport& report, const std::vector<std::string>& names = {});

}  // namespace miret
