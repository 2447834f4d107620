#include "stgw/pipeline.hpp"

#include <algorithm>
#include <set>

#include "stgw/classify.hpp"
#include "stgw/error.hpp"
#include "stgw/gat.hpp"
#include "stgw/graph.hpp"
#include "stgw/report.hpp"
#include "stgw/sgwt.hpp"

namespace stgw {

namespace fs = std::filesystem;

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kBuildGraph: return "build-graph";
    case Stage::kTrain: return "train";
    case Stage::kProduct: return "product";
    case Stage::kTransform: return "transform";
    case Stage::kClassify: return "classify";
    case Stage::kRank: return "rank";
    case Stage::kReport: return "report";
  }
  return "unknown";
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::kBuildGraph, Stage::kTrain,
                                            Stage::kProduct,    Stage::kTransform,
                                            Stage::kClassify,   Stage::kRank,
                                            Stage::kReport};
  return stages;
}

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

// Nodes, edges and cases as configured, optionally without isolated nodes.
Dataset load_dataset(const RunConfig& config) {
  Dataset d = ingest(config.io.nodes, config.io.edges, config.io.cases, config.io.weeks);
  if (config.graph.drop_isolated && !d.graph.isolated().empty()) {
    RouteGraph kept = d.graph.without_nodes(d.graph.isolated());
    Eigen::MatrixXd values(kept.size(), d.cases.weeks());
    for (Index i = 0; i < kept.size(); ++i) {
      values.row(i) = d.cases.values.row(d.graph.index_of(kept.node(i).node_id));
    }
    d.graph = std::move(kept);
    d.cases.values = std::move(values);
  }
  return d;
}

Eigen::MatrixXd read_signal(const fs::path& path, const RouteGraph& graph) {
  const auto table = read_csv(path, {"node_id", "week", "x"});
  Index weeks = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    weeks = std::max<Index>(weeks, parse_int(table, r, 1));
  }
  if (weeks < 1 || static_cast<Index>(table.rows.size()) != weeks * graph.size()) {
    throw ValidationError(path.string() + ": signal does not cover every node and week");
  }
  Eigen::MatrixXd x(graph.size(), weeks);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const NodeId id = parse_int(table, r, 0);
    const auto i = graph.find(id);
    const auto t = parse_int(table, r, 1);
    if (!i || t < 1) {
      throw ValidationError(path.string() + ":" + std::to_string(table.lines[r]) +
                            ": unknown node or week");
    }
    x(*i, t - 1) = parse_double(table, r, 2);
  }
  return x;
}

SpatioTemporalGraph read_product(const fs::path& path, const RouteGraph& graph, Index slices) {
  const auto table = read_csv(path, {"src_id", "src_week", "dst_id", "dst_week", "w"});
  SpatioTemporalGraph g;
  g.base_node_count = graph.size();
  g.slice_count = slices;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto i = graph.find(parse_int(table, r, 0));
    const auto j = graph.find(parse_int(table, r, 2));
    const Index s = parse_int(table, r, 1);
    const Index t = parse_int(table, r, 3);
    if (!i || !j || s < 1 || s > slices || t < 1 || t > slices) {
      throw ValidationError(path.string() + ":" + std::to_string(table.lines[r]) +
                            ": arc endpoint outside the product graph");
    }
    triplets.emplace_back(g.vertex(*i, s - 1), g.vertex(*j, t - 1), parse_double(table, r, 4));
  }
  g.arcs.resize(g.vertex_count(), g.vertex_count());
  g.arcs.setFromTriplets(triplets.begin(), triplets.end());
  return g;
}

struct ClassTable {
  Eigen::VectorXd torque;   // vertex order
  Eigen::VectorXi labels;   // vertex order
  Eigen::MatrixXi a_scores; // N x T
};

ClassTable read_classes(const fs::path& path, const RouteGraph& graph, Index weeks) {
  const auto table =
      read_csv(path, {"node_id", "week", "torque", "class", "theta", "a_score"});
  const Index n = graph.size();
  if (static_cast<Index>(table.rows.size()) != n * weeks) {
    throw ValidationError(path.string() + ": classes do not cover every node and week");
  }
  ClassTable c{Eigen::VectorXd::Zero(n * weeks), Eigen::VectorXi::Zero(n * weeks),
               Eigen::MatrixXi::Zero(n, weeks)};
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto i = graph.find(parse_int(table, r, 0));
    const Index t = parse_int(table, r, 1);
    if (!i || t < 1 || t > weeks) {
      throw ValidationError(path.string() + ":" + std::to_string(table.lines[r]) +
                            ": unknown node or week");
    }
    const Index v = (t - 1) * n + *i;
    c.torque[v] = parse_double(table, r, 2);
    c.labels[v] = static_cast<int>(parse_int(table, r, 3));
    c.a_scores(*i, t - 1) = static_cast<int>(parse_int(table, r, 5));
  }
  return c;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, std::ostream* log) : config_(std::move(config)), log_(log) {
  config_.validate();
}

fs::path Pipeline::out(const std::string& name) const { return output_dir() / name; }

void Pipeline::record(const fs::path& path) {
  if (std::find(written_.begin(), written_.end(), path) == written_.end()) {
    written_.push_back(path);
  }
}

void Pipeline::save_manifest(const std::string& section,
                             const std::map<std::string, std::string>& values) {
  const fs::path path = out(files::kManifest);
  Manifest manifest;
  manifest.load(path);
  manifest.merge(config_.resolved());
  for (const auto& [key, value] : values) manifest.set(section, key, value);
  for (const auto& f : written_) {
    if (f.filename() != files::kManifest && fs::exists(f)) {
      manifest.set("outputs", f.filename().string(), git_blob_hash(f));
    }
  }
  record(path);
  manifest.save(path);
}

void Pipeline::run_stage(Stage stage) {
  const std::size_t before = written_.size();
  try {
    fs::create_directories(output_dir());
    switch (stage) {
      case Stage::kBuildGraph: build_graph(); break;
      case Stage::kTrain: train(); break;
      case Stage::kProduct: product(); break;
      case Stage::kTransform: transform(); break;
      case Stage::kClassify: classify(); break;
      case Stage::kRank: rank(); break;
      case Stage::kReport: report(); break;
    }
  } catch (const Error& e) {
    for (std::size_t k = before; k < written_.size(); ++k) {
      std::error_code ignored;
      fs::remove(written_[k], ignored);
    }
    written_.resize(before);
    throw Error("stage " + stage_name(stage) + ": " + e.what(), e.code());
  } catch (const fs::filesystem_error& e) {
    for (std::size_t k = before; k < written_.size(); ++k) {
      std::error_code ignored;
      fs::remove(written_[k], ignored);
    }
    written_.resize(before);
    throw IoError("stage " + stage_name(stage) + ": " + e.what());
  }
}

void Pipeline::run() {
  std::error_code ignored;
  fs::remove(out(files::kManifest), ignored);
  try {
    for (Stage s : all_stages()) run_stage(s);
  } catch (...) {
    for (const auto& f : written_) fs::remove(f, ignored);
    written_.clear();
    throw;
  }
}

void Pipeline::build_graph() {
  const Dataset d = load_dataset(config_);
  const CaseMatrix x = normalize_cases(d.cases, d.graph);
  write_cases(out(files::kSignal), d.graph, x.values, "x");
  record(out(files::kSignal));

  const auto mask = downsample_mask(d.graph);
  CsvWriter w(out(files::kMask), {"node_id"});
  for (NodeId id : mask) w.row({std::to_string(id)});
  w.close();
  record(out(files::kMask));

  std::vector<std::string> isolated;
  for (NodeId id : d.graph.isolated()) isolated.push_back(std::to_string(id));
  if (log_) {
    *log_ << "build-graph: N=" << d.graph.size() << " |E|=" << d.graph.edges().size()
          << " T=" << d.cases.weeks() << " isolated=" << isolated.size() << '\n';
  }
  save_manifest("stage.build-graph",
                {{"nodes", std::to_string(d.graph.size())},
                 {"edges", std::to_string(d.graph.edges().size())},
                 {"weeks", std::to_string(d.cases.weeks())},
                 {"isolated", join(isolated, ",")},
                 {"mask_hidden", std::to_string(mask.size())},
                 {"input_nodes_hash", git_blob_hash(config_.io.nodes)},
                 {"input_edges_hash", git_blob_hash(config_.io.edges)},
                 {"input_cases_hash", git_blob_hash(config_.io.cases)}});
}

void Pipeline::train() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x =
      standardize_features(read_signal(out(files::kSignal), d.graph));

  GatShape shape;
  shape.input_dim = x.cols();
  shape.heads = config_.gat.heads;
  shape.hidden = config_.gat.hidden;
  shape.output = config_.gat.out;
  const GatModel initial = init_model(shape, config_.gat.seed);
  const SampleSets samples = make_samples(d.graph, config_.gat.seed);
  const Neighborhoods nb = closed_neighborhoods(d.graph);

  TrainConfig tc;
  tc.learning_rate = config_.gat.lr;
  tc.patience = config_.gat.patience;
  tc.max_epochs = config_.gat.max_epochs;
  tc.seed = config_.gat.seed;
  tc.leaky_slope = config_.gat.leaky_slope;
  const TrainResult result = stgw::train(initial, x, nb, samples, tc);
  const double accuracy =
      samples.test.empty() ? 0.0
                           : edge_accuracy(result.model, x, nb, samples.test, tc.leaky_slope);
  const TransitionMatrix transition =
      extract_transition(result.model, x, nb, tc.leaky_slope);
  validate_transition(transition, d.graph);
  const auto test_positives = static_cast<std::size_t>(std::count_if(
      samples.test.begin(), samples.test.end(), [](const LabeledPair& p) { return p.label == 1; }));

  save_checkpoint(out(files::kModel).string(), result.model);
  record(out(files::kModel));
  {
    CsvWriter w(out(files::kTraining), {"epoch", "train_loss", "validation_loss"});
    for (std::size_t e = 0; e < result.train_loss.size(); ++e) {
      w.row({std::to_string(e + 1), format_number(result.train_loss[e]),
             format_number(result.validation_loss[e])});
    }
    w.close();
    record(out(files::kTraining));
  }
  write_transition(out(files::kTransition), d.graph, transition);
  record(out(files::kTransition));

  if (log_) {
    *log_ << "train: epochs=" << result.epochs_run << " best=" << result.best_epoch
          << " test_accuracy=" << format_number(accuracy) << '\n';
    for (const auto& w : samples.warnings) *log_ << "train: warning: " << w << '\n';
  }
  save_manifest("stage.train",
                {{"epochs_run", std::to_string(result.epochs_run)},
                 {"best_epoch", std::to_string(result.best_epoch)},
                 {"positives", std::to_string(samples.positives)},
                 {"negatives", std::to_string(samples.negatives)},
                 {"train_pairs", std::to_string(samples.train.size())},
                 {"validation_pairs", std::to_string(samples.validation.size())},
                 {"test_pairs", std::to_string(samples.test.size())},
                 {"test_positives", std::to_string(test_positives)},
                 {"test_negatives", std::to_string(samples.test.size() - test_positives)},
                 {"test_accuracy", format_number(accuracy)},
                 {"warnings", join(samples.warnings, " | ")}});
}

void Pipeline::product() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x = read_signal(out(files::kSignal), d.graph);
  const TransitionMatrix transition = read_transition(out(files::kTransition), d.graph);
  const SpatioTemporalGraph g = strong_product(d.graph, transition, x.cols());

  const Index n = d.graph.size();
  CsvWriter w(out(files::kProduct), {"src_id", "src_week", "dst_id", "dst_week", "w"});
  for (Index u = 0; u < g.arcs.outerSize(); ++u) {
    for (RowSparseMatrix::InnerIterator it(g.arcs, u); it; ++it) {
      const Index v = it.col();
      w.row({std::to_string(d.graph.node(u % n).node_id), std::to_string(u / n + 1),
             std::to_string(d.graph.node(v % n).node_id), std::to_string(v / n + 1),
             format_number(it.value())});
    }
  }
  w.close();
  record(out(files::kProduct));

  const Index expected = strong_product_arc_count(
      n, static_cast<Index>(d.graph.edges().size()), x.cols());
  if (log_) *log_ << "product: vertices=" << g.vertex_count() << " arcs=" << g.arc_count() << '\n';
  save_manifest("stage.product", {{"vertices", std::to_string(g.vertex_count())},
                                  {"arcs", std::to_string(g.arc_count())},
                                  {"expected_arcs", std::to_string(expected)}});
}

void Pipeline::transform() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x = read_signal(out(files::kSignal), d.graph);
  const Index n = d.graph.size();
  const Index slices = x.cols();
  const SpatioTemporalGraph g = read_product(out(files::kProduct), d.graph, slices);
  const SymmetricLaplacian L = laplacian(g);

  const KernelDictionary dict =
      make_dictionary(L.lambda_max_estimate, config_.sgwt.filters, config_.sgwt.scale_lo,
                      config_.sgwt.scale_hi);
  const ChebyshevExpansion expansion =
      make_expansion(dict, config_.sgwt.cheb_order, config_.sgwt.quadrature_points);
  // Column-major N x T storage is already the t*N + i vertex order.
  const Eigen::VectorXd signal = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  ChebyshevStats stats;
  const Eigen::MatrixXd W = cheb_apply(L.matrix, signal, expansion, &stats);
  if (!W.allFinite()) throw NumericError("wavelet coefficients are not finite");

  CsvWriter w(out(files::kCoefficients), {"vertex_id", "slice", "filter", "coef"});
  for (Index t = 0; t < slices; ++t) {
    for (Index i = 0; i < n; ++i) {
      for (Index m = 0; m < W.cols(); ++m) {
        w.row({std::to_string(d.graph.node(i).node_id), std::to_string(t + 1),
               std::to_string(m + 1), format_number(W(t * n + i, m))});
      }
    }
  }
  w.close();
  record(out(files::kCoefficients));

  std::vector<std::string> scales;
  for (double s : dict.scales) scales.push_back(format_number(s));
  if (log_) {
    *log_ << "transform: lambda_max=" << format_number(L.lambda_max_estimate)
          << " matvecs=" << stats.matvecs << '\n';
  }
  save_manifest("stage.transform",
                {{"lambda_max", format_number(L.lambda_max_estimate)},
                 {"lambda_converged", L.lambda_converged ? "true" : "false"},
                 {"scaling_amplitude", format_number(dict.amplitude)},
                 {"scales", join(scales, ",")},
                 {"dictionary_degenerate", dict.degenerate ? "true" : "false"},
                 {"cheb_order", std::to_string(config_.sgwt.cheb_order)},
                 {"quadrature_points", std::to_string(expansion.quadrature_points)},
                 {"matvecs", std::to_string(stats.matvecs)}});
}

void Pipeline::classify() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x = read_signal(out(files::kSignal), d.graph);
  const Index n = d.graph.size();
  const Index slices = x.cols();
  const Index filters = config_.sgwt.filters;

  const auto table = read_csv(out(files::kCoefficients), {"vertex_id", "slice", "filter", "coef"});
  if (static_cast<Index>(table.rows.size()) != n * slices * filters) {
    throw ValidationError(out(files::kCoefficients).string() +
                          ": coefficient table does not cover every vertex and filter");
  }
  Eigen::MatrixXd W(n * slices, filters);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto i = d.graph.find(parse_int(table, r, 0));
    const Index t = parse_int(table, r, 1);
    const Index m = parse_int(table, r, 2);
    if (!i || t < 1 || t > slices || m < 1 || m > filters) {
      throw ValidationError(table.path + ":" + std::to_string(table.lines[r]) +
                            ": coefficient index outside the product graph");
    }
    W((t - 1) * n + *i, m - 1) = parse_double(table, r, 3);
  }

  const RobustScaled scaled = robust_scale(W);
  const TorqueField phi = torque(log_normalize(scaled.scaled));
  const NodeClasses classes = classify_nodes(phi);
  const SliceSummary summary = slice_classification(classes.labels, n, slices);
  const Eigen::MatrixXd ratio = anomaly_metric(x, d.graph);
  const AScoreThresholds thresholds{config_.classify.theta_hi, config_.classify.theta_lo};
  const Eigen::MatrixXi scores = a_score_table(classes.labels, ratio, thresholds);

  {
    CsvWriter w(out(files::kClasses), {"node_id", "week", "torque", "class", "theta", "a_score"});
    for (Index t = 0; t < slices; ++t) {
      for (Index i = 0; i < n; ++i) {
        const Index v = t * n + i;
        w.row({std::to_string(d.graph.node(i).node_id), std::to_string(t + 1),
               format_number(phi.phi[v]), std::to_string(classes.labels[v]),
               format_number(ratio(i, t)), std::to_string(scores(i, t))});
      }
    }
    w.close();
    record(out(files::kClasses));
  }
  {
    CsvWriter w(out(files::kSlices),
                {"week", "sigma1", "sigma2", "sigma3", "sigma4", "sigma5", "slice_class"});
    for (Index t = 0; t < slices; ++t) {
      std::vector<std::string> row{std::to_string(t + 1)};
      for (int j = 0; j < kClassCount; ++j) row.push_back(format_number(summary.sigma(t, j)));
      row.push_back(std::to_string(summary.classes[t]));
      w.row(row);
    }
    w.close();
    record(out(files::kSlices));
  }

  std::vector<std::string> fallback;
  for (Index m : scaled.fallback_columns) fallback.push_back(std::to_string(m + 1));
  if (log_) {
    *log_ << "classify: torque range [" << format_number(phi.min) << ", "
          << format_number(phi.max) << "]" << (classes.degenerate ? " (degenerate)" : "") << '\n';
    for (const auto& w : scaled.warnings) *log_ << "classify: warning: " << w << '\n';
  }
  save_manifest("stage.classify", {{"torque_min", format_number(phi.min)},
                                   {"torque_max", format_number(phi.max)},
                                   {"degenerate", classes.degenerate ? "true" : "false"},
                                   {"iqr_fallback_filters", join(fallback, ",")}});
}

void Pipeline::rank() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x = read_signal(out(files::kSignal), d.graph);
  const ClassTable c = read_classes(out(files::kClasses), d.graph, x.cols());
  const TransitionMatrix transition = read_transition(out(files::kTransition), d.graph);

  const Ranking ranking =
      average_a_score(c.a_scores, WeekWindow{config_.rank.first_week, config_.rank.last_week});
  const Eigen::VectorXd influence = influential_scores(transition);

  CsvWriter w(out(files::kRankings), {"node_id", "name", "a_bar", "influential_score",
                                      "rank_least_successful", "rank_most_successful"});
  for (Index i : ranking.order) {
    w.row({std::to_string(d.graph.node(i).node_id), d.graph.node(i).name,
           format_number(ranking.a_bar[i]), format_number(influence[i]),
           std::to_string(ranking.rank_least_successful[i]),
           std::to_string(ranking.rank_most_successful[i])});
  }
  w.close();
  record(out(files::kRankings));

  const Index last = config_.rank.last_week == 0 ? x.cols() : config_.rank.last_week;
  if (log_) {
    *log_ << "rank: weeks " << config_.rank.first_week << ".." << last;
    if (!ranking.order.empty()) *log_ << " top=" << d.graph.node(ranking.order.front()).name;
    *log_ << '\n';
  }
  save_manifest("stage.rank", {{"first_week", std::to_string(config_.rank.first_week)},
                               {"last_week", std::to_string(last)}});
}

void Pipeline::report() {
  const Dataset d = load_dataset(config_);
  const Eigen::MatrixXd x = read_signal(out(files::kSignal), d.graph);
  const Index n = d.graph.size();
  const Index slices = x.cols();
  const ClassTable c = read_classes(out(files::kClasses), d.graph, slices);

  SliceSummary summary;
  {
    const auto table = read_csv(out(files::kSlices), {"week", "sigma1", "sigma2", "sigma3",
                                                      "sigma4", "sigma5", "slice_class"});
    if (static_cast<Index>(table.rows.size()) != slices) {
      throw ValidationError(table.path + ": expected one row per week");
    }
    summary.sigma.resize(slices, kClassCount);
    summary.classes.resize(slices);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const Index t = parse_int(table, r, 0);
      if (t < 1 || t > slices) throw ValidationError(table.path + ": week out of range");
      for (int j = 0; j < kClassCount; ++j) {
        summary.sigma(t - 1, j) = parse_double(table, r, static_cast<std::size_t>(j + 1));
      }
      summary.classes[t - 1] = static_cast<int>(parse_int(table, r, 6));
    }
  }

  Ranking ranking;
  {
    const auto table = read_csv(out(files::kRankings),
                                {"node_id", "name", "a_bar", "influential_score",
                                 "rank_least_successful", "rank_most_successful"});
    ranking.a_bar = Eigen::VectorXd::Zero(n);
    ranking.rank_least_successful = Eigen::VectorXi::Zero(n);
    ranking.rank_most_successful = Eigen::VectorXi::Zero(n);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto i = d.graph.find(parse_int(table, r, 0));
      if (!i) throw ValidationError(table.path + ": unknown node");
      ranking.a_bar[*i] = parse_double(table, r, 2);
      ranking.rank_least_successful[*i] = static_cast<int>(parse_int(table, r, 4));
      ranking.rank_most_successful[*i] = static_cast<int>(parse_int(table, r, 5));
      ranking.order.push_back(*i);
    }
  }

  std::set<NodeId> hidden;
  if (config_.report.mask) {
    const auto table = read_csv(out(files::kMask), {"node_id"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) hidden.insert(parse_int(table, r, 0));
  }

  Index week = config_.report.map_week;
  if (week == 0) {
    week = 1;
    for (Index t = 1; t < slices; ++t) {
      if (summary.sigma(t, kClassCount - 1) > summary.sigma(week - 1, kClassCount - 1)) {
        week = t + 1;
      }
    }
  }
  if (week > slices) {
    throw ValidationError("report.map_week " + std::to_string(week) + " outside 1.." +
                          std::to_string(slices));
  }
  const Eigen::VectorXi week_labels = c.labels.segment((week - 1) * n, n);
  const fs::path map = out("map_classes_week" + std::to_string(week) + ".svg");
  write_text(map, class_map_svg(d.graph, week_labels, week, hidden));
  record(map);
  write_text(out(files::kSlicePlot), slices_svg(summary));
  record(out(files::kSlicePlot));
  write_text(out(files::kRankingPlot), ranking_svg(d.graph, ranking, config_.report.top_k));
  record(out(files::kRankingPlot));

  if (log_) *log_ << "report: " << map.filename().string() << ", slices.svg, ranking.svg\n";
  save_manifest("stage.report", {{"map_week", std::to_string(week)},
                                 {"hidden_nodes", std::to_string(hidden.size())}});
}

}  // namespace stgw
