#pragma once

// Post-processing of wavelet coefficients: robust scaling, log
// normalization, torque values, five-way node classes, slice classes,
// anomaly ratios, a-scores and averaged city rankings.
//
// Vertex-indexed quantities use the product-graph order t*N + i.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stgw/graph.hpp"

namespace stgw {

inline constexpr int kClassCount = 5;

/// Quantile with linear interpolation between order statistics (the
/// "inclusive" convention: position q*(n-1)).
double quantile_inclusive(std::vector<double> values, double q);

struct RobustScaled {
  Eigen::MatrixXd scaled;           // |W| / R, same shape as W
  Eigen::VectorXd ranges;           // R(m) actually used per column
  std::vector<Index> fallback_columns;
  std::vector<std::string> warnings;
};

/// S(m, tau) = |W(m, tau)| / R(m), R the interquartile range of |W(m, .)|.
/// Zero IQR falls back to max |W(m, .)|; an all-zero column stays zero.
RobustScaled robust_scale(const Eigen::MatrixXd& coefficients);

/// ln(1 + S) / ln(1 + max S) per column; all-zero columns map to 0.
Eigen::MatrixXd log_normalize(const Eigen::MatrixXd& scaled);

struct TorqueField {
  Eigen::VectorXd phi;
  double min = 0.0;
  double max = 0.0;
  double range() const { return max - min; }
};

/// phi = W̄ . (-4, -3, -2, -1, 1, 2, 3, 4). Needs exactly 8 filters.
TorqueField torque(const Eigen::MatrixXd& normalized);

struct NodeClasses {
  Eigen::VectorXi labels;  // 1..5 per vertex
  bool degenerate = false; // zero torque range: everything in class 1
};

/// Five equal-width bins of [phi_min, phi_max]; bin k is left-open except
/// the first.
NodeClasses classify_nodes(const TorqueField& torque);

struct SliceSummary {
  Eigen::MatrixXd sigma;   // T x 5 class frequencies per slice
  Eigen::VectorXi classes; // r_t in 1..5
};

/// sigma_t^j = share of slice t in class j; r_t = argmax_j sigma_t^j /
/// max_t sigma_t^j, ties towards larger j, classes never seen are skipped.
SliceSummary slice_classification(const Eigen::VectorXi& labels, Index nodes, Index slices);

/// N x T ratio of x_i(t) to its one-hop neighbourhood mean, or
/// max(x_i(t), 1) when the neighbour sum is zero.
Eigen::MatrixXd anomaly_metric(const Eigen::MatrixXd& signal, const RouteGraph& graph);

struct AScoreThresholds {
  double high = 1.5;
  double low = 2.0 / 3.0;
};

/// Decision table on classes 4 and 5; every other vertex scores 2.
int a_score(int label, double ratio, const AScoreThresholds& thresholds = {});
/// N x T table from vertex labels and the N x T anomaly ratios.
Eigen::MatrixXi a_score_table(const Eigen::VectorXi& labels, const Eigen::MatrixXd& ratios,
                              const AScoreThresholds& thresholds = {});

struct WeekWindow {
  Index first = 1;  // 1-based, inclusive
  Index last = 0;   // 0 means "last available week"
};

struct Ranking {
  Eigen::VectorXd a_bar;
  Eigen::VectorXi rank_least_successful;  // 1 = highest mean a-score
  Eigen::VectorXi rank_most_successful;   // 1 = lowest mean a-score
  std::vector<Index> order;               // node indices by least-successful rank
};

/// Mean a-score over the window, ranked descending and ascending; ties go to
/// the node that comes first in graph order.
Ranking average_a_score(const Eigen::MatrixXi& scores, const WeekWindow& window = {});

}  // namespace stgw
