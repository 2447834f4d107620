#include "stgw/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stgw/error.hpp"

namespace stgw {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string header(double width, double height, const std::string& title) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\""
    << fixed(height) << "\" viewBox=\"0 0 " << fixed(width) << ' ' << fixed(height) << "\">\n"
    << "<title>" << escape(title) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
    << "\" fill=\"white\"/>\n";
  return s.str();
}

}  // namespace

const std::string& class_color(int label) {
  static const std::array<std::string, 5> colors = {"#2c7bb6", "#abd9e9", "#ffffbf", "#fdae61",
                                                     "#d7191c"};
  if (label < 1 || label > 5) throw ValidationError("class label out of range");
  return colors[static_cast<std::size_t>(label - 1)];
}

std::string class_map_svg(const RouteGraph& graph, const Eigen::VectorXi& week_labels,
                          Index week, const std::set<NodeId>& hidden) {
  if (week_labels.size() != graph.size()) {
    throw ValidationError("map labels do not cover every node");
  }
  const double width = 640, height = 480, margin = 40, legend = 120;
  double lat_lo = 0, lat_hi = 1, lon_lo = 0, lon_hi = 1;
  double pop_max = 1;
  if (graph.size() > 0) {
    lat_lo = lat_hi = graph.node(0).lat;
    lon_lo = lon_hi = graph.node(0).lon;
    for (Index i = 0; i < graph.size(); ++i) {
      const auto& n = graph.node(i);
      lat_lo = std::min(lat_lo, n.lat);
      lat_hi = std::max(lat_hi, n.lat);
      lon_lo = std::min(lon_lo, n.lon);
      lon_hi = std::max(lon_hi, n.lon);
      pop_max = std::max(pop_max, static_cast<double>(n.population));
    }
  }
  const double lat_span = std::max(lat_hi - lat_lo, 1e-9);
  const double lon_span = std::max(lon_hi - lon_lo, 1e-9);
  const double plot_w = width - legend - 2 * margin;
  const double plot_h = height - 2 * margin;

  std::ostringstream s;
  s << header(width, height, "Node classes, week " + std::to_string(week));
  s << "<g id=\"nodes\">\n";
  std::set<int> present;
  for (Index i = 0; i < graph.size(); ++i) {
    const auto& n = graph.node(i);
    if (hidden.count(n.node_id)) continue;
    const int label = week_labels[i];
    present.insert(label);
    const double x = margin + (n.lon - lon_lo) / lon_span * plot_w;
    const double y = margin + (lat_hi - n.lat) / lat_span * plot_h;
    const double r = 2.0 + 10.0 * std::sqrt(static_cast<double>(n.population) / pop_max);
    s << "<circle class=\"node\" data-node=\"" << n.node_id << "\" data-class=\"" << label
      << "\" cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"" << fixed(r)
      << "\" fill=\"" << class_color(label) << "\" stroke=\"#333333\" stroke-width=\"0.5\">"
      << "<title>" << escape(n.name) << "</title></circle>\n";
  }
  s << "</g>\n<g id=\"legend\">\n";
  double y = margin;
  for (int label : present) {
    s << "<rect class=\"legend-entry\" x=\"" << fixed(width - legend) << "\" y=\"" << fixed(y)
      << "\" width=\"12\" height=\"12\" fill=\"" << class_color(label) << "\"/>\n"
      << "<text x=\"" << fixed(width - legend + 18) << "\" y=\"" << fixed(y + 10)
      << "\" font-size=\"12\">class " << label << "</text>\n";
    y += 20;
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string slices_svg(const SliceSummary& slices) {
  const Index weeks = slices.sigma.rows();
  const double margin = 40, plot_h = 300;
  const double bar = 14, gap = 4;
  const double width = 2 * margin + std::max<Index>(weeks, 1) * (bar + gap) + 100;
  const double height = plot_h + 2 * margin + 20;

  std::ostringstream s;
  s << header(width, height, "Class shares per week");
  s << "<g id=\"bars\">\n";
  for (Index t = 0; t < weeks; ++t) {
    const double x = margin + static_cast<double>(t) * (bar + gap);
    double top = margin + plot_h;
    for (int j = 0; j < kClassCount; ++j) {
      const double h = slices.sigma(t, j) * plot_h;
      if (h <= 0.0) continue;
      top -= h;
      s << "<rect class=\"share\" data-week=\"" << t + 1 << "\" data-class=\"" << j + 1
        << "\" x=\"" << fixed(x) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(bar)
        << "\" height=\"" << fixed(h) << "\" fill=\"" << class_color(j + 1) << "\"/>\n";
    }
    const int r = slices.classes[t];
    s << "<circle class=\"slice-class\" data-week=\"" << t + 1 << "\" data-class=\"" << r
      << "\" cx=\"" << fixed(x + bar / 2) << "\" cy=\"" << fixed(margin - 10) << "\" r=\"5\" fill=\""
      << class_color(r) << "\" stroke=\"#333333\"/>\n";
    if (t % 5 == 0 || t + 1 == weeks) {
      s << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(margin + plot_h + 14)
        << "\" font-size=\"10\">" << t + 1 << "</text>\n";
    }
  }
  s << "</g>\n<g id=\"legend\">\n";
  for (int j = 0; j < kClassCount; ++j) {
    const double y = margin + 20.0 * j;
    s << "<rect x=\"" << fixed(width - 90) << "\" y=\"" << fixed(y)
      << "\" width=\"12\" height=\"12\" fill=\"" << class_color(j + 1) << "\"/>\n"
      << "<text x=\"" << fixed(width - 72) << "\" y=\"" << fixed(y + 10)
      << "\" font-size=\"12\">class " << j + 1 << "</text>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string ranking_svg(const RouteGraph& graph, const Ranking& ranking, Index k) {
  const Index n = static_cast<Index>(ranking.order.size());
  std::vector<Index> shown;
  const Index top = std::min(k, n);
  for (Index r = 0; r < top; ++r) shown.push_back(ranking.order[r]);
  for (Index r = std::max(top, n - k); r < n; ++r) shown.push_back(ranking.order[r]);

  const double margin = 40, label_w = 160, bar_max = 300, row = 18;
  const double width = 2 * margin + label_w + bar_max + 60;
  const double height = 2 * margin + row * static_cast<double>(shown.size()) + 20;

  std::ostringstream s;
  s << header(width, height, "Mean a-score ranking");
  s << "<g id=\"bars\">\n";
  double y = margin;
  for (std::size_t r = 0; r < shown.size(); ++r) {
    const Index i = shown[r];
    if (static_cast<Index>(r) == top && top < static_cast<Index>(shown.size())) {
      s << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(y + 2) << "\" x2=\""
        << fixed(width - margin) << "\" y2=\"" << fixed(y + 2)
        << "\" stroke=\"#999999\" stroke-dasharray=\"4 2\"/>\n";
      y += 6;
    }
    const double a = ranking.a_bar[i];
    const double w = a / 4.0 * bar_max;
    s << "<text x=\"" << fixed(margin) << "\" y=\"" << fixed(y + 12) << "\" font-size=\"11\">"
      << escape(graph.node(i).name) << "</text>\n"
      << "<rect class=\"rank\" data-node=\"" << graph.node(i).node_id << "\" x=\""
      << fixed(margin + label_w) << "\" y=\"" << fixed(y + 2) << "\" width=\"" << fixed(w)
      << "\" height=\"" << fixed(row - 4) << "\" fill=\"#d7191c\"/>\n"
      << "<text x=\"" << fixed(margin + label_w + w + 4) << "\" y=\"" << fixed(y + 12)
      << "\" font-size=\"10\">" << fixed(a) << "</text>\n";
    y += row;
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace stgw
