#pragma once

// Two-layer multi-head graph attention network trained on edge
// classification. The last layer's attention coefficients become the
// transition matrix of the attention route graph.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stgw/graph.hpp"

namespace stgw {

inline constexpr double kLeakySlope = 0.35;

inline double leaky_relu(double x, double slope = kLeakySlope) {
  return x < 0.0 ? slope * x : x;
}

inline double elu(double x) { return x < 0.0 ? std::expm1(x) : x; }

/// Per-node z-scores: each row (one node's series) is shifted to zero mean and
/// scaled to unit population standard deviation; constant rows become zero.
Eigen::MatrixXd standardize_features(const Eigen::MatrixXd& features);

/// Closed one-hop neighbourhoods (sorted, each containing its own node).
using Neighborhoods = std::vector<std::vector<Index>>;

Neighborhoods closed_neighborhoods(const RouteGraph& graph);

struct GatLayerParams {
  std::vector<Eigen::MatrixXd> weights;    // per head: head_dim x input_dim
  std::vector<Eigen::VectorXd> attention;  // per head: 2 * head_dim

  Index heads() const { return static_cast<Index>(weights.size()); }
  Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
  Index head_dim() const { return weights.empty() ? 0 : weights.front().rows(); }
};

struct GatModel {
  GatLayerParams layer1;
  GatLayerParams layer2;
  Eigen::VectorXd theta;
};

struct GatShape {
  Index input_dim = 41;
  Index heads = 7;
  Index hidden = 122;  // per head in layer 1
  Index output = 88;   // single-head layer 2
};

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) for every tensor.
GatModel init_model(const GatShape& shape, std::uint64_t seed);

/// Throws ValidationError unless layer dimensions chain correctly.
void check_model(const GatModel& model);

/// Per-head attention alpha_ij over closed neighbourhoods; each returned
/// matrix is N x N, row-stochastic, supported on the neighbourhoods.
std::vector<RowSparseMatrix> attention_coefficients(const GatLayerParams& layer,
                                                    const Eigen::MatrixXd& features,
                                                    const Neighborhoods& neighborhoods,
                                                    double slope = kLeakySlope);

/// ELU(sum_j alpha_ij W x_j) per head. Heads are concatenated when `concat`
/// is set and averaged otherwise (a single head passes through).
Eigen::MatrixXd layer_forward(const GatLayerParams& layer, const Eigen::MatrixXd& features,
                              const Neighborhoods& neighborhoods, bool concat,
                              double slope = kLeakySlope);

/// Final node embeddings x'' (N x output).
Eigen::MatrixXd embed(const GatModel& model, const Eigen::MatrixXd& features,
                      const Neighborhoods& neighborhoods, double slope = kLeakySlope);

double sigmoid(double x);

/// sigmoid((xi ⊙ xj) · theta)
double edge_probability(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                        const Eigen::VectorXd& theta);

inline constexpr double kProbabilityClamp = 1e-12;

struct LabeledPair {
  Index i = 0;
  Index j = 0;
  int label = 0;  // a_ij
};

/// Mean binary cross-entropy with q clamped to [1e-12, 1 - 1e-12].
double binary_cross_entropy(const std::vector<double>& q, const std::vector<int>& labels);
double bce_loss(const std::vector<LabeledPair>& pairs, const Eigen::MatrixXd& embeddings,
                const Eigen::VectorXd& theta);

/// Unordered non-adjacent pairs (i < j) reachable by a walk of length 2 or 3.
std::vector<std::pair<Index, Index>> negative_candidates(const RouteGraph& graph);

struct SampleSets {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> validation;
  std::vector<LabeledPair> test;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::string> warnings;
};

/// Positives are all edges; |M| negatives drawn uniformly without replacement
/// from the candidate set; 6:2:2 split with a balanced test split.
SampleSets make_samples(const RouteGraph& graph, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.005;
  int patience = 100;
  int max_epochs = 3000;
  std::uint64_t seed = 0;
  double leaky_slope = kLeakySlope;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  GatModel model;  // parameters of the best validation epoch
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int best_epoch = 0;  // 1-based
  int epochs_run = 0;
};

/// Loss on `pairs` and, when `gradient` is non-null, its exact gradient with
/// respect to every parameter (written into a model-shaped object).
double loss_and_gradient(const GatModel& model, const Eigen::MatrixXd& features,
                         const Neighborhoods& neighborhoods,
                         const std::vector<LabeledPair>& pairs, double slope,
                         GatModel* gradient);

/// Full-batch Adam with early stopping on validation loss.
TrainResult train(GatModel model, const Eigen::MatrixXd& features,
                  const Neighborhoods& neighborhoods, const SampleSets& samples,
                  const TrainConfig& config);

/// Fraction of pairs with (q > 0.5) == label.
double edge_accuracy(const GatModel& model, const Eigen::MatrixXd& features,
                     const Neighborhoods& neighborhoods, const std::vector<LabeledPair>& pairs,
                     double slope = kLeakySlope);

/// Layer-2 attention on layer-1 outputs.
TransitionMatrix extract_transition(const GatModel& model, const Eigen::MatrixXd& features,
                                    const Neighborhoods& neighborhoods,
                                    double slope = kLeakySlope);

/// C_i = sum_{m=1..max_hop} sum_{j != i} (P^m)_ji.
Eigen::VectorXd influential_scores(const TransitionMatrix& transition, int max_hop = 5);

/// Named flat view of one parameter tensor.
struct ParameterBlock {
  std::string name;
  Index rows;
  Index cols;
  Eigen::Map<Eigen::VectorXd> values;
};

/// Every tensor of the model in a fixed order (layer1 heads, layer2, theta).
std::vector<ParameterBlock> parameter_blocks(GatModel& model);

/// Text checkpoint starting with the magic line GATCKPT1.
void save_checkpoint(const std::string& path, const GatModel& model);
GatModel load_checkpoint(const std::string& path);

}  // namespace stgw
