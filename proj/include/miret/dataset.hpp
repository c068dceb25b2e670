#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "miret/errors.hpp"

namespace miret {

/// Binary class label. Stored as int so it can be used directly in +-1 algebra.
using Label = int;

/// Classification data with features scaled to [0,1] and labels in {-1,+1}.
///
/// Rows are stored contiguously (row-major). `source_rows` maps every row back
/// to its line index in the originating table, which keeps splits and folds
/// traceable.
struct Dataset {
  std::size_t num_rows = 0;
  std::size_t num_features = 0;
  std::vector<double> features;  // num_rows * num_features
  std::vector<Label> labels;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> source_rows;
  // Raw label strings mapped to -1 and +1 respectively.
  std::pair<std::string, std::string> label_names{"-1", "+1"};

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features, num_features};
  }
  double at(std::size_t i, std::size_t j) const { return features[i * num_features + j]; }
  bool empty() const { return num_rows == 0; }

  /// Checks the structural invariants; throws InputError on violation.
  void validate() const;

  /// Rows selected by index, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// Per-column min-max scaler. Constant columns map to 0.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  static MinMaxScaler fit(const Dataset& data);
  /// Applies the scaling in place; values outside the fitted range are clamped to [0,1].
  void transform(Dataset& data) const;
};

/// Builds a dataset from an in-memory table of raw values; normalizes each column.
Dataset make_dataset(std::vector<double> raw_features, std::vector<Label> labels,
                     std::vector<std::string> feature_names);

/// Reads a headed CSV. The label column must contain exactly two distinct values;
/// the lexicographically smaller maps to -1. All other columns must be numeric.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Writes a dataset back to CSV (normalized values, labels as -1/+1).
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& label_column = "label");

/// Min-max normalizes every column (idempotent on normalized data).
void normalize(Dataset& data);

/// Stratified, seeded train/test split. Returns (train, test).
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Rescales train to its own column ranges and applies the same map to test,
/// clamping to [0,1]. Equivalent to normalizing the raw table with training statistics.
void normalize_to_train(Dataset& train, Dataset& test);

/// Stratified k-fold assignment: fold index per row, deterministic under seed.
std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

}  // namespace miret
