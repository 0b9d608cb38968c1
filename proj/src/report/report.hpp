#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tuning/tuning.hpp"

namespace artpipe::report {

/// Escapes &, <, >, " and ' for XML text and attribute values.
std::string xml_escape(std::string_view text);

/// Fixed-precision decimal used for SVG coordinates (stable across runs).
std::string coord(double value);

/// Row-normalized confusion heatmap. Empty cells are exactly #ffffff, every
/// cell carries its count, classes appear in index order on both axes.
std::string confusion_svg(const tuning::EvaluationReport& report);

struct ScatterPoint {
  std::string label;
  double n_artists = 0.0;
  double accuracy = 0.0;
  std::string group;
};

/// Parses rows `label,n_artists,accuracy,group` (header optional).
std::vector<ScatterPoint> read_scatter_csv(const std::string& path);

/// Accuracy against artist count; one colour per group in order of first
/// appearance, each point annotated with its label. The y axis spans at
/// least [0, 1].
std::string scatter_svg(const std::vector<ScatterPoint>& points);

}  // namespace artpipe::report
