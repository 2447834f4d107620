#include "stgw/gat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "stgw/error.hpp"

namespace stgw {

namespace {

using Offsets = std::vector<std::size_t>;

Offsets make_offsets(const Neighborhoods& nb) {
  Offsets offsets(nb.size() + 1, 0);
  for (std::size_t i = 0; i < nb.size(); ++i) offsets[i + 1] = offsets[i] + nb[i].size();
  return offsets;
}

double elu_derivative(double z) { return z < 0.0 ? std::exp(z) : 1.0; }

struct HeadCache {
  Eigen::MatrixXd projected;   // H = X W^T
  std::vector<double> logits;  // a . [H_i || H_j] before LeakyReLU, CSR order
  std::vector<double> alpha;
  Eigen::MatrixXd aggregated;  // Z_i = sum_j alpha_ij H_j
};

struct LayerCache {
  std::vector<HeadCache> heads;
  Eigen::MatrixXd output;
};

HeadCache head_forward(const Eigen::MatrixXd& W, const Eigen::VectorXd& a,
                       const Eigen::MatrixXd& X, const Neighborhoods& nb,
                       const Offsets& offsets, double slope) {
  HeadCache c;
  const Index n = X.rows();
  const Index o = W.rows();
  c.projected = X * W.transpose();
  const Eigen::VectorXd src = c.projected * a.head(o);
  const Eigen::VectorXd dst = c.projected * a.tail(o);
  c.logits.resize(offsets.back());
  c.alpha.resize(offsets.back());
  c.aggregated = Eigen::MatrixXd::Zero(n, o);
  for (Index i = 0; i < n; ++i) {
    const auto& row = nb[static_cast<std::size_t>(i)];
    if (row.empty()) throw ValidationError("empty attention neighbourhood");
    const std::size_t base = offsets[static_cast<std::size_t>(i)];
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < row.size(); ++s) {
      const double logit = src[i] + dst[row[s]];
      c.logits[base + s] = logit;
      max_score = std::max(max_score, leaky_relu(logit, slope));
    }
    double total = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s) {
      const double e = std::exp(leaky_relu(c.logits[base + s], slope) - max_score);
      c.alpha[base + s] = e;
      total += e;
    }
    for (std::size_t s = 0; s < row.size(); ++s) {
      c.alpha[base + s] /= total;
      c.aggregated.row(i) += c.alpha[base + s] * c.projected.row(row[s]);
    }
  }
  return c;
}

LayerCache layer_forward_cached(const GatLayerParams& layer, const Eigen::MatrixXd& X,
                                const Neighborhoods& nb, const Offsets& offsets, bool concat,
                                double slope) {
  if (X.cols() != layer.input_dim()) {
    throw ValidationError("GAT layer expects " + std::to_string(layer.input_dim()) +
                          " input features, got " + std::to_string(X.cols()));
  }
  if (static_cast<std::size_t>(X.rows()) != nb.size()) {
    throw ValidationError("feature rows do not match neighbourhood count");
  }
  LayerCache c;
  const Index k = layer.heads();
  const Index o = layer.head_dim();
  c.output = concat ? Eigen::MatrixXd::Zero(X.rows(), k * o) : Eigen::MatrixXd::Zero(X.rows(), o);
  for (Index h = 0; h < k; ++h) {
    c.heads.push_back(head_forward(layer.weights[static_cast<std::size_t>(h)],
                                   layer.attention[static_cast<std::size_t>(h)], X, nb, offsets,
                                   slope));
    const Eigen::MatrixXd activated = c.heads.back().aggregated.unaryExpr(&elu);
    if (concat) {
      c.output.middleCols(h * o, o) = activated;
    } else {
      c.output += activated / static_cast<double>(k);
    }
  }
  return c;
}

// Accumulates dW, da for one head and, when requested, dX.
void head_backward(const Eigen::MatrixXd& W, const Eigen::VectorXd& a, const Eigen::MatrixXd& X,
                   const Neighborhoods& nb, const Offsets& offsets, const HeadCache& c,
                   const Eigen::MatrixXd& dZ, double slope, Eigen::MatrixXd& dW,
                   Eigen::VectorXd& da, Eigen::MatrixXd* dX) {
  const Index n = X.rows();
  const Index o = W.rows();
  Eigen::MatrixXd dH = Eigen::MatrixXd::Zero(n, o);
  Eigen::VectorXd d_src = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd d_dst = Eigen::VectorXd::Zero(n);
  std::vector<double> d_alpha;
  for (Index i = 0; i < n; ++i) {
    const auto& row = nb[static_cast<std::size_t>(i)];
    const std::size_t base = offsets[static_cast<std::size_t>(i)];
    d_alpha.assign(row.size(), 0.0);
    double weighted = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s) {
      d_alpha[s] = dZ.row(i).dot(c.projected.row(row[s]));
      weighted += c.alpha[base + s] * d_alpha[s];
    }
    for (std::size_t s = 0; s < row.size(); ++s) {
      const Index j = row[s];
      const double alpha = c.alpha[base + s];
      dH.row(j) += alpha * dZ.row(i);
      const double d_score = alpha * (d_alpha[s] - weighted);
      const double d_logit = d_score * (c.logits[base + s] < 0.0 ? slope : 1.0);
      d_src[i] += d_logit;
      d_dst[j] += d_logit;
    }
  }
  da.head(o) += c.projected.transpose() * d_src;
  da.tail(o) += c.projected.transpose() * d_dst;
  dH += d_src * a.head(o).transpose() + d_dst * a.tail(o).transpose();
  dW += dH.transpose() * X;
  if (dX != nullptr) *dX += dH * W;
}

void layer_backward(const GatLayerParams& layer, const Eigen::MatrixXd& X,
                    const Neighborhoods& nb, const Offsets& offsets, const LayerCache& cache,
                    const Eigen::MatrixXd& d_output, bool concat, double slope,
                    GatLayerParams& grad, Eigen::MatrixXd* dX) {
  const Index k = layer.heads();
  const Index o = layer.head_dim();
  for (Index h = 0; h < k; ++h) {
    const auto hs = static_cast<std::size_t>(h);
    const HeadCache& c = cache.heads[hs];
    Eigen::MatrixXd dZ = concat ? Eigen::MatrixXd(d_output.middleCols(h * o, o))
                                : Eigen::MatrixXd(d_output / static_cast<double>(k));
    dZ.array() *= c.aggregated.unaryExpr(&elu_derivative).array();
    head_backward(layer.weights[hs], layer.attention[hs], X, nb, offsets, c, dZ, slope,
                  grad.weights[hs], grad.attention[hs], dX);
  }
}

struct ForwardState {
  Offsets offsets;
  LayerCache first;
  LayerCache second;
};

ForwardState forward(const GatModel& model, const Eigen::MatrixXd& X, const Neighborhoods& nb,
                     double slope) {
  ForwardState s;
  s.offsets = make_offsets(nb);
  s.first = layer_forward_cached(model.layer1, X, nb, s.offsets, true, slope);
  s.second = layer_forward_cached(model.layer2, s.first.output, nb, s.offsets, false, slope);
  return s;
}

double pair_score(const Eigen::MatrixXd& E, const Eigen::VectorXd& theta, const LabeledPair& p) {
  return (E.row(p.i).transpose().cwiseProduct(E.row(p.j).transpose())).dot(theta);
}

double clamp_probability(double q) {
  return std::clamp(q, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double pair_loss(const Eigen::MatrixXd& E, const Eigen::VectorXd& theta,
                 const std::vector<LabeledPair>& pairs) {
  if (pairs.empty()) throw ValidationError("loss over an empty sample subset");
  double total = 0.0;
  for (const auto& p : pairs) {
    const double q = clamp_probability(sigmoid(pair_score(E, theta, p)));
    total -= p.label == 1 ? std::log(q) : std::log1p(-q);
  }
  return total / static_cast<double>(pairs.size());
}

GatModel zeros_like(const GatModel& model) {
  GatModel z = model;
  for (auto& block : parameter_blocks(z)) block.values.setZero();
  return z;
}

Eigen::MatrixXd glorot(Index rows, Index cols, double fan_in, double fan_out,
                       std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
  return m;
}

GatLayerParams init_layer(Index heads, Index input, Index output, std::mt19937_64& rng) {
  GatLayerParams layer;
  for (Index h = 0; h < heads; ++h) {
    layer.weights.push_back(glorot(output, input, static_cast<double>(input),
                                   static_cast<double>(output), rng));
    layer.attention.push_back(
        glorot(2 * output, 1, static_cast<double>(2 * output), 1.0, rng).col(0));
  }
  return layer;
}

void check_layer(const GatLayerParams& layer, const char* name) {
  if (layer.weights.empty() || layer.weights.size() != layer.attention.size()) {
    throw ValidationError(std::string(name) + ": head count mismatch");
  }
  for (std::size_t h = 0; h < layer.weights.size(); ++h) {
    if (layer.weights[h].rows() != layer.head_dim() ||
        layer.weights[h].cols() != layer.input_dim() ||
        layer.attention[h].size() != 2 * layer.head_dim()) {
      throw ValidationError(std::string(name) + ": inconsistent head shapes");
    }
  }
}

}  // namespace

Neighborhoods closed_neighborhoods(const RouteGraph& graph) {
  Neighborhoods nb(static_cast<std::size_t>(graph.size()));
  for (Index i = 0; i < graph.size(); ++i) {
    auto& row = nb[static_cast<std::size_t>(i)];
    row = graph.neighbors(i);
    row.insert(std::lower_bound(row.begin(), row.end(), i), i);
  }
  return nb;
}

GatModel init_model(const GatShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GatModel m;
  m.layer1 = init_layer(shape.heads, shape.input_dim, shape.hidden, rng);
  m.layer2 = init_layer(1, shape.heads * shape.hidden, shape.output, rng);
  m.theta = glorot(shape.output, 1, static_cast<double>(shape.output), 1.0, rng).col(0);
  return m;
}

void check_model(const GatModel& model) {
  check_layer(model.layer1, "layer1");
  check_layer(model.layer2, "layer2");
  if (model.layer1.heads() * model.layer1.head_dim() != model.layer2.input_dim()) {
    throw ValidationError("layer1 output width does not match layer2 input");
  }
  if (model.theta.size() != model.layer2.head_dim()) {
    throw ValidationError("theta length does not match layer2 output");
  }
}

std::vector<RowSparseMatrix> attention_coefficients(const GatLayerParams& layer,
                                                    const Eigen::MatrixXd& features,
                                                    const Neighborhoods& neighborhoods,
                                                    double slope) {
  const Offsets offsets = make_offsets(neighborhoods);
  const Index n = features.rows();
  std::vector<RowSparseMatrix> out;
  for (Index h = 0; h < layer.heads(); ++h) {
    const auto hs = static_cast<std::size_t>(h);
    const HeadCache c = head_forward(layer.weights[hs], layer.attention[hs], features,
                                     neighborhoods, offsets, slope);
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < n; ++i) {
      const auto& row = neighborhoods[static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s < row.size(); ++s) {
        triplets.emplace_back(i, row[s], c.alpha[offsets[static_cast<std::size_t>(i)] + s]);
      }
    }
    RowSparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    out.push_back(std::move(m));
  }
  return out;
}

Eigen::MatrixXd layer_forward(const GatLayerParams& layer, const Eigen::MatrixXd& features,
                              const Neighborhoods& neighborhoods, bool concat, double slope) {
  return layer_forward_cached(layer, features, neighborhoods, make_offsets(neighborhoods),
                              concat, slope)
      .output;
}

Eigen::MatrixXd embed(const GatModel& model, const Eigen::MatrixXd& features,
                      const Neighborhoods& neighborhoods, double slope) {
  return forward(model, features, neighborhoods, slope).second.output;
}

Eigen::MatrixXd standardize_features(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(features.rows(), features.cols());
  if (features.cols() == 0) return out;
  for (Index c = 0; c < features.rows(); ++c) {
    const Eigen::RowVectorXd centred = features.row(c).array() - features.row(c).mean();
    const double sd = std::sqrt(centred.squaredNorm() / static_cast<double>(features.cols()));
    if (sd > 0.0) out.row(c) = centred / sd;
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double edge_probability(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                        const Eigen::VectorXd& theta) {
  return sigmoid(xi.cwiseProduct(xj).dot(theta));
}

double binary_cross_entropy(const std::vector<double>& q, const std::vector<int>& labels) {
  if (q.empty() || q.size() != labels.size()) {
    throw ValidationError("binary cross-entropy needs a non-empty, aligned sample subset");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double c = clamp_probability(q[k]);
    total -= labels[k] == 1 ? std::log(c) : std::log1p(-c);
  }
  return total / static_cast<double>(q.size());
}

double bce_loss(const std::vector<LabeledPair>& pairs, const Eigen::MatrixXd& embeddings,
                const Eigen::VectorXd& theta) {
  return pair_loss(embeddings, theta, pairs);
}

std::vector<std::pair<Index, Index>> negative_candidates(const RouteGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.size());
  // Boolean rows of A^2 and A^3 built from adjacency lists.
  std::vector<std::vector<char>> walk2(n, std::vector<char>(n, 0));
  std::vector<std::vector<char>> walk3(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (Index k : graph.neighbors(static_cast<Index>(i)))
      for (Index j : graph.neighbors(k)) walk2[i][static_cast<std::size_t>(j)] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!walk2[i][k]) continue;
      for (Index j : graph.neighbors(static_cast<Index>(k))) walk3[i][static_cast<std::size_t>(j)] = 1;
    }
  }
  std::vector<std::pair<Index, Index>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = static_cast<Index>(i);
      const auto b = static_cast<Index>(j);
      if (!graph.adjacent(a, b) && (walk2[i][j] || walk3[i][j])) out.emplace_back(a, b);
    }
  }
  return out;
}

SampleSets make_samples(const RouteGraph& graph, std::uint64_t seed) {
  if (graph.edges().empty()) throw ValidationError("cannot build samples: graph has no edges");
  std::mt19937_64 rng(seed);
  SampleSets out;

  std::vector<LabeledPair> positives;
  for (const auto& [i, j] : graph.edges()) positives.push_back({i, j, 1});
  auto candidates = negative_candidates(graph);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (candidates.size() < positives.size()) {
    out.warnings.push_back("only " + std::to_string(candidates.size()) +
                           " negative candidates for " + std::to_string(positives.size()) +
                           " positive edges; using all of them");
  }
  candidates.resize(std::min(candidates.size(), positives.size()));
  std::vector<LabeledPair> negatives;
  for (const auto& [i, j] : candidates) negatives.push_back({i, j, 0});
  std::shuffle(positives.begin(), positives.end(), rng);

  const std::size_t npos = positives.size();
  const std::size_t nneg = negatives.size();
  const std::size_t total = npos + nneg;
  out.positives = npos;
  out.negatives = nneg;

  const auto n_test = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(total)));
  const std::size_t test_half = std::min(n_test / 2, std::min(npos, nneg));
  const auto n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(total)));
  std::size_t val_pos = static_cast<std::size_t>(
      std::lround(static_cast<double>(n_val) * static_cast<double>(npos) / static_cast<double>(total)));
  val_pos = std::min(val_pos, npos - test_half);
  const std::size_t val_neg = std::min(n_val - std::min(n_val, val_pos), nneg - test_half);

  auto take = [](const std::vector<LabeledPair>& from, std::size_t begin, std::size_t count,
                 std::vector<LabeledPair>& to) {
    to.insert(to.end(), from.begin() + static_cast<std::ptrdiff_t>(begin),
              from.begin() + static_cast<std::ptrdiff_t>(begin + count));
  };
  take(positives, 0, test_half, out.test);
  take(negatives, 0, test_half, out.test);
  take(positives, test_half, val_pos, out.validation);
  take(negatives, test_half, val_neg, out.validation);
  take(positives, test_half + val_pos, npos - test_half - val_pos, out.train);
  take(negatives, test_half + val_neg, nneg - test_half - val_neg, out.train);
  return out;
}

double loss_and_gradient(const GatModel& model, const Eigen::MatrixXd& features,
                         const Neighborhoods& neighborhoods,
                         const std::vector<LabeledPair>& pairs, double slope,
                         GatModel* gradient) {
  const ForwardState s = forward(model, features, neighborhoods, slope);
  const Eigen::MatrixXd& E = s.second.output;
  const double loss = pair_loss(E, model.theta, pairs);
  if (gradient == nullptr) return loss;

  *gradient = zeros_like(model);
  const double scale = 1.0 / static_cast<double>(pairs.size());
  Eigen::MatrixXd dE = Eigen::MatrixXd::Zero(E.rows(), E.cols());
  for (const auto& p : pairs) {
    const double q = sigmoid(pair_score(E, model.theta, p));
    if (q != clamp_probability(q)) continue;  // clamped: flat loss
    const double du = (q - static_cast<double>(p.label)) * scale;
    const Eigen::VectorXd ei = E.row(p.i).transpose();
    const Eigen::VectorXd ej = E.row(p.j).transpose();
    gradient->theta += du * ei.cwiseProduct(ej);
    dE.row(p.i) += du * model.theta.cwiseProduct(ej).transpose();
    dE.row(p.j) += du * model.theta.cwiseProduct(ei).transpose();
  }
  const Eigen::MatrixXd& hidden = s.first.output;
  Eigen::MatrixXd d_hidden = Eigen::MatrixXd::Zero(hidden.rows(), hidden.cols());
  layer_backward(model.layer2, hidden, neighborhoods, s.offsets, s.second, dE, false, slope,
                 gradient->layer2, &d_hidden);
  layer_backward(model.layer1, features, neighborhoods, s.offsets, s.first, d_hidden, true,
                 slope, gradient->layer1, nullptr);
  return loss;
}

TrainResult train(GatModel model, const Eigen::MatrixXd& features,
                  const Neighborhoods& neighborhoods, const SampleSets& samples,
                  const TrainConfig& config) {
  check_model(model);
  if (features.cols() != model.layer1.input_dim()) {
    throw ValidationError("feature dimension " + std::to_string(features.cols()) +
                          " does not match layer1 input " +
                          std::to_string(model.layer1.input_dim()));
  }
  if (samples.train.empty()) throw ValidationError("training split is empty");
  if (!(config.learning_rate > 0.0) || config.patience < 1 || config.max_epochs < 1) {
    throw ValidationError("invalid training configuration");
  }

  TrainResult result;
  result.model = model;
  GatModel first_moment = zeros_like(model);
  GatModel second_moment = zeros_like(model);
  GatModel gradient = zeros_like(model);
  double best_validation = std::numeric_limits<double>::infinity();
  const auto& monitor = samples.validation.empty() ? samples.train : samples.validation;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double train_loss = loss_and_gradient(model, features, neighborhoods, samples.train,
                                                config.leaky_slope, &gradient);
    const double validation_loss =
        loss_and_gradient(model, features, neighborhoods, monitor, config.leaky_slope, nullptr);
    if (!std::isfinite(train_loss) || !std::isfinite(validation_loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch));
    }
    result.train_loss.push_back(train_loss);
    result.validation_loss.push_back(validation_loss);
    result.epochs_run = epoch;
    if (validation_loss < best_validation) {
      best_validation = validation_loss;
      result.model = model;
      result.best_epoch = epoch;
    } else if (epoch - result.best_epoch >= config.patience) {
      break;
    }

    auto params = parameter_blocks(model);
    auto grads = parameter_blocks(gradient);
    auto m = parameter_blocks(first_moment);
    auto v = parameter_blocks(second_moment);
    const double correction1 = 1.0 - std::pow(config.beta1, epoch);
    const double correction2 = 1.0 - std::pow(config.beta2, epoch);
    for (std::size_t b = 0; b < params.size(); ++b) {
      m[b].values = config.beta1 * m[b].values + (1.0 - config.beta1) * grads[b].values;
      v[b].values = config.beta2 * v[b].values +
                    (1.0 - config.beta2) * grads[b].values.cwiseAbs2();
      params[b].values.array() -=
          config.learning_rate * (m[b].values.array() / correction1) /
          ((v[b].values.array() / correction2).sqrt() + config.epsilon);
    }
  }
  return result;
}

double edge_accuracy(const GatModel& model, const Eigen::MatrixXd& features,
                     const Neighborhoods& neighborhoods, const std::vector<LabeledPair>& pairs,
                     double slope) {
  if (pairs.empty()) return 0.0;
  const Eigen::MatrixXd E = embed(model, features, neighborhoods, slope);
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const bool predicted = sigmoid(pair_score(E, model.theta, p)) > 0.5;
    if (predicted == (p.label == 1)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

TransitionMatrix extract_transition(const GatModel& model, const Eigen::MatrixXd& features,
                                    const Neighborhoods& neighborhoods, double slope) {
  const Eigen::MatrixXd hidden = layer_forward(model.layer1, features, neighborhoods, true, slope);
  const auto attention = attention_coefficients(model.layer2, hidden, neighborhoods, slope);
  return TransitionMatrix{Eigen::MatrixXd(attention.front())};
}

Eigen::VectorXd influential_scores(const TransitionMatrix& transition, int max_hop) {
  const Eigen::MatrixXd& P = transition.P;
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(P.rows());
  Eigen::MatrixXd power = P;
  for (int m = 1; m <= max_hop; ++m) {
    scores += power.colwise().sum().transpose() - power.diagonal();
    if (m < max_hop) power = power * P;
  }
  return scores;
}

std::vector<ParameterBlock> parameter_blocks(GatModel& model) {
  std::vector<ParameterBlock> blocks;
  auto add_matrix = [&](const std::string& name, Eigen::MatrixXd& m) {
    blocks.push_back({name, m.rows(), m.cols(), Eigen::Map<Eigen::VectorXd>(m.data(), m.size())});
  };
  auto add_vector = [&](const std::string& name, Eigen::VectorXd& v) {
    blocks.push_back({name, v.size(), 1, Eigen::Map<Eigen::VectorXd>(v.data(), v.size())});
  };
  auto add_layer = [&](const std::string& prefix, GatLayerParams& layer) {
    for (std::size_t h = 0; h < layer.weights.size(); ++h) {
      const std::string head = prefix + ".head" + std::to_string(h);
      add_matrix(head + ".W", layer.weights[h]);
      add_vector(head + ".a", layer.attention[h]);
    }
  };
  add_layer("layer1", model.layer1);
  add_layer("layer2", model.layer2);
  add_vector("theta", model.theta);
  return blocks;
}

}  // namespace stgw
