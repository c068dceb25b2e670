#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "miret/forest.hpp"
#include "miret/te_metrics.hpp"

namespace miret {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::string hex() const;
  bool operator==(const Rgb&) const = default;
};

struct HeatmapSpec {
  Rgb light{255, 255, 255};
  Rgb dark{8, 48, 107};
  bool show_percent = true;
  std::string title;

  /// Linear ramp from light (0) to dark (1); input clamped to [0,1].
  Rgb color(double t) const;
};

/// Percentage of a fraction rounded half-up to one decimal, e.g. 0.12345 -> "12.3".
std::string percent_label(double fraction);

std::string xml_escape(std::string_view text);

/// Horizontal slots of a complete tree: level d has 2^d equally wide slots.
struct TreeLayout {
  int depth = 1;
  double width = 800.0;
  double top = 60.0;
  double level_height = 120.0;

  double x(NodeId t) const;
  double y(NodeId t) const;
};

/// Feature order used by the level heatmap: total frequency descending, then index.
std::vector<std::size_t> heatmap_row_order(const LevelFrequencyMatrix& freq);

/// One cell per (feature, level); each column shaded relative to its own maximum.
/// Cells carry data-feature / data-level attributes. Byte-identical for equal inputs.
std::string render_level_heatmap(const LevelFrequencyMatrix& freq, const HeatmapSpec& spec,
                                 const std::vector<std::string>& names = {});

/// Complete tree of the given depth; each branch slot shows its node-frequency row
/// as a column of cells (shaded relative to the row maximum) and the threshold
/// interval of every used feature. Slots where no tree splits are drawn blank.
std::string render_representative_tree(const NodeFrequencyMatrix& nodefreq, const ThresholdRanges& ranges, int depth,
                                       const HeatmapSpec& spec, const std::vector<std::string>& names = {});

/// Names for columns, falling back to x_1 .. x_J.
std::vector<std::string> feature_labels(const std::vector<std::string>& names, std::size_t count);

void write_level_frequency_csv(const LevelFrequencyMatrix& freq, const std::vector<std::string>& names,
                               std::ostream& out);
void write_node_frequency_csv(const NodeFrequencyMatrix& nodefreq, const std::vector<std::string>& names,
                              std::ostream& out);
void write_threshold_ranges_csv(const ThresholdRanges& ranges, const std::vector<std::string>& names,
                                std::ostream& out);
/// Square matrix with sample indices as row and column headers.
void write_proximity_csv(const ProximityMatrix& prox, std::ostream& out);
/// Flat `i,k,proximity` for i < k.
void write_proximity_distribution_csv(const ProximityMatrix& prox, std::ostream& out);
/// Flat `sample,p_neg,p_pos,p,predicted`.
void write_probability_distribution_csv(const ClassProbabilities& probs, std::ostream& out);

}  // namespace miret
