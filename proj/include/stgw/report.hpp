#pragma once

// Static SVG plots of the classification and ranking outputs.

#include <filesystem>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "stgw/classify.hpp"
#include "stgw/graph.hpp"

namespace stgw {

/// One fill colour per class, index 0 for class 1.
const std::string& class_color(int label);

/// Lat/lon scatter of one week. Circle area grows with population; nodes in
/// `hidden` are left out. The legend lists only classes that are drawn.
std::string class_map_svg(const RouteGraph& graph, const Eigen::VectorXi& week_labels,
                          Index week, const std::set<NodeId>& hidden = {});

/// Stacked bars of the class shares per week with a marker on the slice class.
std::string slices_svg(const SliceSummary& slices);

/// Horizontal bars of the top and bottom `k` nodes by mean a-score.
std::string ranking_svg(const RouteGraph& graph, const Ranking& ranking, Index k);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stgw
