#include "stgw/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stgw/error.hpp"

namespace stgw {

double quantile_inclusive(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return values[lower] + fraction * (values[upper] - values[lower]);
}

RobustScaled robust_scale(const Eigen::MatrixXd& coefficients) {
  RobustScaled out;
  const Eigen::MatrixXd magnitude = coefficients.cwiseAbs();
  out.scaled = Eigen::MatrixXd::Zero(magnitude.rows(), magnitude.cols());
  out.ranges = Eigen::VectorXd::Zero(magnitude.cols());
  for (Index m = 0; m < magnitude.cols(); ++m) {
    if (magnitude.rows() == 0) continue;
    std::vector<double> column(magnitude.col(m).data(),
                               magnitude.col(m).data() + magnitude.rows());
    double range = quantile_inclusive(column, 0.75) - quantile_inclusive(column, 0.25);
    if (!(range > 0.0)) {
      range = magnitude.col(m).maxCoeff();
      out.fallback_columns.push_back(m);
      out.warnings.push_back("filter " + std::to_string(m + 1) +
                             ": zero interquartile range, scaling by column maximum");
    }
    out.ranges[m] = range;
    if (range > 0.0) out.scaled.col(m) = magnitude.col(m) / range;
  }
  return out;
}

Eigen::MatrixXd log_normalize(const Eigen::MatrixXd& scaled) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(scaled.rows(), scaled.cols());
  for (Index m = 0; m < scaled.cols(); ++m) {
    if (scaled.rows() == 0) continue;
    const double top = scaled.col(m).maxCoeff();
    if (!(top > 0.0)) continue;
    const double denominator = std::log1p(top);
    out.col(m) = scaled.col(m).unaryExpr([&](double s) { return std::log1p(s) / denominator; });
  }
  return out;
}

TorqueField torque(const Eigen::MatrixXd& normalized) {
  if (normalized.cols() != 8) {
    throw ValidationError("torque needs exactly 8 filters, got " +
                          std::to_string(normalized.cols()));
  }
  Eigen::VectorXd weights(8);
  weights << -4, -3, -2, -1, 1, 2, 3, 4;
  TorqueField out;
  out.phi = normalized * weights;
  if (out.phi.size() > 0) {
    out.min = out.phi.minCoeff();
    out.max = out.phi.maxCoeff();
  }
  return out;
}

NodeClasses classify_nodes(const TorqueField& field) {
  NodeClasses out;
  out.labels = Eigen::VectorXi::Ones(field.phi.size());
  const double d = field.range();
  if (!(d > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (Index v = 0; v < field.phi.size(); ++v) {
    int label = kClassCount;
    for (int k = 1; k < kClassCount; ++k) {
      if (field.phi[v] <= field.min + static_cast<double>(k) * d / kClassCount) {
        label = k;
        break;
      }
    }
    out.labels[v] = label;
  }
  return out;
}

SliceSummary slice_classification(const Eigen::VectorXi& labels, Index nodes, Index slices) {
  if (labels.size() != nodes * slices) {
    throw ValidationError("label count does not cover every product vertex");
  }
  if (nodes <= 0) throw ValidationError("slice classification needs at least one node");
  SliceSummary out;
  out.sigma = Eigen::MatrixXd::Zero(slices, kClassCount);
  for (Index t = 0; t < slices; ++t) {
    for (Index i = 0; i < nodes; ++i) {
      const int label = labels[t * nodes + i];
      if (label < 1 || label > kClassCount) throw ValidationError("class label out of range");
      out.sigma(t, label - 1) += 1.0;
    }
  }
  out.sigma /= static_cast<double>(nodes);
  const Eigen::RowVectorXd peak = out.sigma.colwise().maxCoeff();
  out.classes = Eigen::VectorXi::Zero(slices);
  for (Index t = 0; t < slices; ++t) {
    double best = -1.0;
    for (int j = 0; j < kClassCount; ++j) {
      if (!(peak[j] > 0.0)) continue;
      const double ratio = out.sigma(t, j) / peak[j];
      if (ratio >= best) {
        best = ratio;
        out.classes[t] = j + 1;
      }
    }
  }
  return out;
}

Eigen::MatrixXd anomaly_metric(const Eigen::MatrixXd& signal, const RouteGraph& graph) {
  if (signal.rows() != graph.size()) {
    throw ValidationError("signal rows do not match graph size");
  }
  Eigen::MatrixXd out(signal.rows(), signal.cols());
  for (Index i = 0; i < signal.rows(); ++i) {
    const auto& nb = graph.neighbors(i);
    for (Index t = 0; t < signal.cols(); ++t) {
      double sum = 0.0;
      for (Index j : nb) sum += signal(j, t);
      const double x = signal(i, t);
      out(i, t) = sum != 0.0 ? x / (sum / static_cast<double>(nb.size())) : std::max(x, 1.0);
    }
  }
  return out;
}

int a_score(int label, double ratio, const AScoreThresholds& thresholds) {
  if (label == 5) {
    if (ratio >= thresholds.high) return 4;
    if (ratio <= thresholds.low) return 0;
    return 2;
  }
  if (label == 4) {
    if (ratio >= thresholds.high) return 3;
    if (ratio <= thresholds.low) return 1;
    return 2;
  }
  return 2;
}

Eigen::MatrixXi a_score_table(const Eigen::VectorXi& labels, const Eigen::MatrixXd& ratios,
                              const AScoreThresholds& thresholds) {
  const Index n = ratios.rows();
  const Index t_count = ratios.cols();
  if (labels.size() != n * t_count) {
    throw ValidationError("labels and anomaly ratios are not aligned");
  }
  Eigen::MatrixXi out(n, t_count);
  for (Index t = 0; t < t_count; ++t)
    for (Index i = 0; i < n; ++i) out(i, t) = a_score(labels[t * n + i], ratios(i, t), thresholds);
  return out;
}

Ranking average_a_score(const Eigen::MatrixXi& scores, const WeekWindow& window) {
  const Index weeks = scores.cols();
  const Index last = window.last == 0 ? weeks : window.last;
  if (window.first < 1 || last < window.first || last > weeks) {
    throw ValidationError("week window " + std::to_string(window.first) + ".." +
                          std::to_string(last) + " outside 1.." + std::to_string(weeks));
  }
  const Index n = scores.rows();
  const Index span = last - window.first + 1;
  Ranking out;
  out.a_bar = scores.middleCols(window.first - 1, span).cast<double>().rowwise().sum() /
              static_cast<double>(span);

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return out.a_bar[a] > out.a_bar[b]; });
  out.order = idx;
  out.rank_least_successful.resize(n);
  for (std::size_t k = 0; k < idx.size(); ++k) out.rank_least_successful[idx[k]] = static_cast<int>(k + 1);

  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return out.a_bar[a] < out.a_bar[b]; });
  out.rank_most_successful.resize(n);
  for (std::size_t k = 0; k < idx.size(); ++k) out.rank_most_successful[idx[k]] = static_cast<int>(k + 1);
  return out;
}

}  // namespace stgw
