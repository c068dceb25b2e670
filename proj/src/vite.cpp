#include "miret/vite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace miret {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string coord(double v) { return fmt("%.2f", v); }

std::string full(double v) { return fmt("%.17g", v); }

std::string range_text(const ThresholdRange& r) {
  if (r.lo == r.hi) return "[" + fmt("%.3g", r.lo) + "]";
  return "[" + fmt("%.3g", r.lo) + ", " + fmt("%.3g", r.hi) + "]";
}

void svg_open(std::ostringstream& s, double w, double h) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(w) << "\" height=\"" << coord(h)
    << "\" viewBox=\"0 0 " << coord(w) << ' ' << coord(h) << "\" font-family=\"sans-serif\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << coord(w) << "\" height=\"" << coord(h) << "\" fill=\"#ffffff\"/>\n";
}

// Dark cells get white text.
const char* text_fill(double shade) { return shade > 0.55 ? "#ffffff" : "#000000"; }

}  // namespace

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

Rgb HeatmapSpec::color(double t) const {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  auto mix = [t](std::uint8_t lo, std::uint8_t hi) {
    return static_cast<std::uint8_t>(std::lround(lo + (static_cast<double>(hi) - lo) * t));
  };
  return Rgb{mix(light.r, dark.r), mix(light.g, dark.g), mix(light.b, dark.b)};
}

std::string percent_label(double fraction) {
  const auto tenths = static_cast<long long>(std::floor(fraction * 1000.0 + 0.5 + 1e-9));
  const long long whole = tenths / 10;
  const long long dec = tenths % 10;
  return std::to_string(whole) + "." + std::to_string(dec < 0 ? -dec : dec);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double TreeLayout::x(NodeId t) const {
  const int d = node_level(t);
  const double slots = std::ldexp(1.0, d);
  const double index = static_cast<double>(t) - (slots - 1.0);
  return (index + 0.5) * width / slots;
}

double TreeLayout::y(NodeId t) const { return top + node_level(t) * level_height; }

std::vector<std::string> feature_labels(const std::vector<std::string>& names, std::size_t count) {
  if (names.size() == count) return names;
  std::vector<std::string> out;
  for (std::size_t j = 0; j < count; ++j) out.push_back("x_" + std::to_string(j + 1));
  return out;
}

std::vector<std::size_t> heatmap_row_order(const LevelFrequencyMatrix& freq) {
  std::vector<std::size_t> order(freq.num_features());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> total(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) total[j] = freq.values.row(static_cast<Eigen::Index>(j)).sum();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return total[a] > total[b]; });
  return order;
}

std::string render_level_heatmap(const LevelFrequencyMatrix& freq, const HeatmapSpec& spec,
                                 const std::vector<std::string>& names) {
  const std::size_t J = freq.num_features();
  const int D = freq.depth();
  if (J == 0 || D == 0) throw InputError("cannot render an empty frequency matrix");
  const auto labels = feature_labels(names, J);
  const auto order = heatmap_row_order(freq);

  const double cell_w = 64.0;
  const double cell_h = 24.0;
  const double left = 140.0;
  const double top = 56.0;
  const double width = left + cell_w * D + 20.0;
  const double height = top + cell_h * static_cast<double>(J) + 20.0;

  std::ostringstream s;
  svg_open(s, width, height);
  s << "<text x=\"" << coord(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << xml_escape(spec.title) << "</text>\n";
  for (int d = 0; d < D; ++d) {
    s << "<text class=\"level\" x=\"" << coord(left + cell_w * (d + 0.5)) << "\" y=\"" << coord(top - 8)
      << "\" text-anchor=\"middle\" font-size=\"12\">d=" << d << "</text>\n";
  }
  std::vector<double> col_max(static_cast<std::size_t>(D), 0.0);
  for (int d = 0; d < D; ++d) col_max[static_cast<std::size_t>(d)] = freq.values.col(d).maxCoeff();

  for (std::size_t r = 0; r < J; ++r) {
    const std::size_t j = order[r];
    const double y = top + cell_h * static_cast<double>(r);
    s << "<text class=\"feature\" data-feature=\"" << j << "\" x=\"" << coord(left - 8) << "\" y=\""
      << coord(y + cell_h * 0.65) << "\" text-anchor=\"end\" font-size=\"12\">" << xml_escape(labels[j])
      << "</text>\n";
    for (int d = 0; d < D; ++d) {
      const double v = freq.at(j, d);
      const double m = col_max[static_cast<std::size_t>(d)];
      const double shade = m > 0.0 ? v / m : 0.0;
      const double x = left + cell_w * d;
      s << "<rect class=\"cell\" data-feature=\"" << j << "\" data-level=\"" << d << "\" data-value=\"" << full(v)
        << "\" x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" width=\"" << coord(cell_w) << "\" height=\""
        << coord(cell_h) << "\" fill=\"" << spec.color(shade).hex() << "\" stroke=\"#cccccc\"/>\n";
      if (spec.show_percent && v > 0.0) {
        s << "<text class=\"pct\" data-feature=\"" << j << "\" data-level=\"" << d << "\" x=\""
          << coord(x + cell_w / 2) << "\" y=\"" << coord(y + cell_h * 0.65)
          << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"" << text_fill(shade) << "\">" << percent_label(v)
          << "</text>\n";
      }
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string render_representative_tree(const NodeFrequencyMatrix& nodefreq, const ThresholdRanges& ranges, int depth,
                                       const HeatmapSpec& spec, const std::vector<std::string>& names) {
  if (depth < 1) throw InputError("tree depth must be at least 1");
  const auto nb = static_cast<std::size_t>((1u << depth) - 1);
  if (static_cast<std::size_t>(nodefreq.values.rows()) != nb) {
    throw InputError("node frequency rows do not match the tree depth");
  }
  const auto J = static_cast<std::size_t>(nodefreq.values.cols());
  const auto labels = feature_labels(names, J);

  const double cell = 14.0;
  const double box_w = 200.0;
  const double box_h = cell * static_cast<double>(J) + 24.0;
  TreeLayout lay;
  lay.depth = depth;
  lay.width = std::max(800.0, (box_w + 20.0) * std::ldexp(1.0, depth - 1));
  lay.top = 40.0;
  lay.level_height = box_h + 50.0;
  const double height = lay.top + lay.level_height * depth + 40.0;

  std::ostringstream s;
  svg_open(s, lay.width, height);
  s << "<text x=\"" << coord(lay.width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << xml_escape(spec.title) << "</text>\n";

  // Edges first so boxes cover them.
  for (NodeId t = 0; t < nb; ++t) {
    for (NodeId c : {left_child(t), right_child(t)}) {
      s << "<line x1=\"" << coord(lay.x(t)) << "\" y1=\"" << coord(lay.y(t) + box_h) << "\" x2=\"" << coord(lay.x(c))
        << "\" y2=\"" << coord(lay.y(c)) << "\" stroke=\"#888888\"/>\n";
    }
  }
  for (NodeId t = 0; t < nb; ++t) {
    const double x0 = lay.x(t) - box_w / 2;
    const double y0 = lay.y(t);
    const auto row = nodefreq.values.row(t);
    const double m = row.size() > 0 ? row.maxCoeff() : 0.0;
    s << "<g class=\"node\" data-node=\"" << t << "\" data-splits=\"" << full(nodefreq.split_counts[t]) << "\">\n";
    s << "<rect x=\"" << coord(x0) << "\" y=\"" << coord(y0) << "\" width=\"" << coord(box_w) << "\" height=\""
      << coord(box_h) << "\" fill=\"#ffffff\" stroke=\"#444444\"/>\n";
    s << "<text x=\"" << coord(x0 + 4) << "\" y=\"" << coord(y0 + 14) << "\" font-size=\"11\">node " << t << "</text>\n";
    for (std::size_t j = 0; j < J; ++j) {
      const double v = row(static_cast<Eigen::Index>(j));
      const double shade = m > 0.0 ? v / m : 0.0;
      const double cy = y0 + 20.0 + cell * static_cast<double>(j);
      s << "<rect class=\"cell\" data-node=\"" << t << "\" data-feature=\"" << j << "\" data-value=\"" << full(v)
        << "\" x=\"" << coord(x0 + 4) << "\" y=\"" << coord(cy) << "\" width=\"" << coord(40.0) << "\" height=\""
        << coord(cell) << "\" fill=\"" << spec.color(shade).hex() << "\" stroke=\"#cccccc\"/>\n";
      if (spec.show_percent && v > 0.0) {
        s << "<text class=\"pct\" data-node=\"" << t << "\" data-feature=\"" << j << "\" x=\"" << coord(x0 + 24)
          << "\" y=\"" << coord(cy + cell * 0.75) << "\" text-anchor=\"middle\" font-size=\"9\" fill=\""
          << text_fill(shade) << "\">" << percent_label(v) << "</text>\n";
      }
      std::string text = labels[j];
      auto it = ranges.find({t, j});
      if (it != ranges.end() && v > 0.0) text += " " + range_text(it->second);
      s << "<text class=\"feature\" data-node=\"" << t << "\" data-feature=\"" << j << "\" x=\"" << coord(x0 + 48)
        << "\" y=\"" << coord(cy + cell * 0.75) << "\" font-size=\"10\">" << xml_escape(text) << "</text>\n";
    }
    s << "</g>\n";
  }
  for (NodeId l = static_cast<NodeId>(nb); l < 2 * nb + 1; ++l) {
    s << "<circle class=\"leaf\" data-node=\"" << l << "\" cx=\"" << coord(lay.x(l)) << "\" cy=\""
      << coord(lay.y(l) + 6) << "\" r=\"6\" fill=\"#dddddd\" stroke=\"#444444\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_level_frequency_csv(const LevelFrequencyMatrix& freq, const std::vector<std::string>& names,
                               std::ostream& out) {
  const auto labels = feature_labels(names, freq.num_features());
  out << "feature";
  for (int d = 0; d < freq.depth(); ++d) out << ",level_" << d;
  out << '\n';
  for (std::size_t j = 0; j < freq.num_features(); ++j) {
    out << labels[j];
    for (int d = 0; d < freq.depth(); ++d) out << ',' << full(freq.at(j, d));
    out << '\n';
  }
}

void write_node_frequency_csv(const NodeFrequencyMatrix& nodefreq, const std::vector<std::string>& names,
                              std::ostream& out) {
  const auto J = static_cast<std::size_t>(nodefreq.values.cols());
  const auto labels = feature_labels(names, J);
  out << "node,splits";
  for (const auto& n : labels) out << ',' << n;
  out << '\n';
  for (Eigen::Index t = 0; t < nodefreq.values.rows(); ++t) {
    out << t << ',' << full(nodefreq.split_counts[static_cast<std::size_t>(t)]);
    for (std::size_t j = 0; j < J; ++j) out << ',' << full(nodefreq.values(t, static_cast<Eigen::Index>(j)));
    out << '\n';
  }
}

void write_threshold_ranges_csv(const ThresholdRanges& ranges, const std::vector<std::string>& names,
                                std::ostream& out) {
  out << "node,feature,lower,upper,uses\n";
  for (const auto& [key, r] : ranges) {
    const std::string label = key.second < names.size() ? names[key.second] : "x_" + std::to_string(key.second + 1);
    out << key.first << ',' << label << ',' << full(r.lo) << ',' << full(r.hi) << ',' << r.uses << '\n';
  }
}

void write_proximity_csv(const ProximityMatrix& prox, std::ostream& out) {
  out << "sample";
  for (Eigen::Index k = 0; k < prox.cols(); ++k) out << ',' << k;
  out << '\n';
  for (Eigen::Index i = 0; i < prox.rows(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < prox.cols(); ++k) out << ',' << full(prox(i, k));
    out << '\n';
  }
}

void write_proximity_distribution_csv(const ProximityMatrix& prox, std::ostream& out) {
  out << "i,k,proximity\n";
  for (Eigen::Index i = 0; i < prox.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < prox.cols(); ++k) out << i << ',' << k << ',' << full(prox(i, k)) << '\n';
  }
}

void write_probability_distribution_csv(const ClassProbabilities& probs, std::ostream& out) {
  out << "sample,p_neg,p_pos,p,predicted\n";
  for (std::size_t i = 0; i < probs.p.size(); ++i) {
    out << i << ',' << full(probs.p_neg[i]) << ',' << full(probs.p_pos[i]) << ',' << full(probs.p[i]) << ','
        << probs.predicted[i] << '\n';
  }
}

}  // namespace miret
