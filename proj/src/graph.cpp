#include "stgw/graph.hpp"

#include <algorithm>
#include <set>

#include <Eigen/Eigenvalues>

#include "stgw/error.hpp"

namespace stgw {

bool RouteGraph::adjacent(Index i, Index j) const {
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::optional<Index> RouteGraph::find(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index RouteGraph::index_of(NodeId id) const {
  auto found = find(id);
  if (!found) throw ValidationError("unknown node id " + std::to_string(id));
  return *found;
}

RouteGraph RouteGraph::without_nodes(const std::vector<NodeId>& drop) const {
  const std::set<NodeId> dropped(drop.begin(), drop.end());
  std::vector<NodeRecord> kept;
  for (const auto& n : nodes_) {
    if (!dropped.count(n.node_id)) kept.push_back(n);
  }
  std::vector<std::pair<NodeId, NodeId>> kept_edges;
  for (const auto& [i, j] : edges_) {
    const NodeId a = node(i).node_id;
    const NodeId b = node(j).node_id;
    if (!dropped.count(a) && !dropped.count(b)) kept_edges.emplace_back(a, b);
  }
  return build_route_graph(std::move(kept), kept_edges);
}

RouteGraph build_route_graph(std::vector<NodeRecord> nodes,
                             const std::vector<std::pair<NodeId, NodeId>>& edges) {
  RouteGraph g;
  g.nodes_ = std::move(nodes);
  const Index n = g.size();
  for (Index i = 0; i < n; ++i) {
    const NodeRecord& rec = g.node(i);
    if (!g.index_.emplace(rec.node_id, i).second) {
      throw ValidationError("duplicate node id " + std::to_string(rec.node_id));
    }
    if (rec.population < 1) {
      throw ValidationError("node " + std::to_string(rec.node_id) +
                            " has population " + std::to_string(rec.population) +
                            " (must be >= 1)");
    }
  }

  std::set<std::pair<Index, Index>> unique;
  for (const auto& [a, b] : edges) {
    auto ia = g.find(a);
    auto ib = g.find(b);
    if (!ia || !ib) {
      throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") references unknown node " + std::to_string(ia ? b : a));
    }
    if (*ia == *ib) {
      throw ValidationError("self-loop edge on node " + std::to_string(a));
    }
    unique.emplace(std::min(*ia, *ib), std::max(*ia, *ib));
  }
  g.edges_.assign(unique.begin(), unique.end());

  g.neighbors_.assign(static_cast<std::size_t>(n), {});
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.edges_.size());
  for (const auto& [i, j] : g.edges_) {
    g.neighbors_[static_cast<std::size_t>(i)].push_back(j);
    g.neighbors_[static_cast<std::size_t>(j)].push_back(i);
    triplets.emplace_back(i, j, 1.0);
    triplets.emplace_back(j, i, 1.0);
  }
  for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
  g.adjacency_.resize(n, n);
  g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());

  for (Index i = 0; i < n; ++i) {
    if (g.neighbors(i).empty()) g.isolated_.push_back(g.node(i).node_id);
  }
  return g;
}

CaseMatrix normalize_cases(const CaseMatrix& raw, const Eigen::VectorXd& populations) {
  if (populations.size() != raw.nodes()) {
    throw ValidationError("population vector has " + std::to_string(populations.size()) +
                          " entries for " + std::to_string(raw.nodes()) + " nodes");
  }
  CaseMatrix out;
  out.values.resize(raw.nodes(), raw.weeks());
  for (Index i = 0; i < raw.nodes(); ++i) {
    if (!(populations[i] > 0.0)) {
      throw ValidationError("node index " + std::to_string(i) +
                            " has non-positive population");
    }
    if ((raw.values.row(i).array() < 0.0).any()) {
      throw ValidationError("node index " + std::to_string(i) + " has negative case counts");
    }
    out.values.row(i) = raw.values.row(i) * (1000.0 / populations[i]);
  }
  return out;
}

CaseMatrix normalize_cases(const CaseMatrix& raw, const RouteGraph& graph) {
  Eigen::VectorXd pop(graph.size());
  for (Index i = 0; i < graph.size(); ++i) {
    pop[i] = static_cast<double>(graph.node(i).population);
    if (!(pop[i] > 0.0)) {
      throw ValidationError("node " + std::to_string(graph.node(i).node_id) +
                            " has non-positive population");
    }
  }
  return normalize_cases(raw, pop);
}

void validate_transition(const TransitionMatrix& transition, const RouteGraph& base,
                         double tol) {
  const Eigen::MatrixXd& P = transition.P;
  const Index n = base.size();
  if (P.rows() != n || P.cols() != n) {
    throw ValidationError("transition matrix is " + std::to_string(P.rows()) + "x" +
                          std::to_string(P.cols()) + ", graph has " + std::to_string(n) +
                          " nodes");
  }
  for (Index i = 0; i < n; ++i) {
    const double row_sum = P.row(i).sum();
    if (!(std::abs(row_sum - 1.0) <= tol)) {
      throw ValidationError("transition row of node " + std::to_string(base.node(i).node_id) +
                            " sums to " + std::to_string(row_sum));
    }
    for (Index j = 0; j < n; ++j) {
      const bool expected = i == j || base.adjacent(i, j);
      const bool present = P(i, j) > 0.0;
      if (P(i, j) < 0.0 || expected != present) {
        throw ValidationError("transition support mismatch at (" +
                              std::to_string(base.node(i).node_id) + "," +
                              std::to_string(base.node(j).node_id) + ")");
      }
    }
  }
}

Index strong_product_arc_count(Index nodes, Index edges, Index slices) {
  return slices * 2 * edges + (slices - 1) * (nodes + 2 * edges);
}

SpatioTemporalGraph strong_product(const RouteGraph& base, const TransitionMatrix& transition,
                                   Index slices) {
  if (slices < 2) {
    throw ValidationError("strong product needs at least 2 time slices, got " +
                          std::to_string(slices));
  }
  validate_transition(transition, base);
  const Eigen::MatrixXd& P = transition.P;
  const Index n = base.size();

  SpatioTemporalGraph g;
  g.base_node_count = n;
  g.slice_count = slices;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(
      strong_product_arc_count(n, static_cast<Index>(base.edges().size()), slices)));
  for (Index t = 0; t < slices; ++t) {
    for (Index i = 0; i < n; ++i) {
      const Index u = g.vertex(i, t);
      for (Index j : base.neighbors(i)) {
        triplets.emplace_back(u, g.vertex(j, t), P(i, j));
      }
      if (t + 1 < slices) {
        triplets.emplace_back(u, g.vertex(i, t + 1), P(i, i));
        for (Index j : base.neighbors(i)) {
          triplets.emplace_back(u, g.vertex(j, t + 1), P(j, i));
        }
      }
    }
  }
  g.arcs.resize(g.vertex_count(), g.vertex_count());
  g.arcs.setFromTriplets(triplets.begin(), triplets.end());
  g.arcs.makeCompressed();
  return g;
}

SparseMatrix directed_laplacian(const SpatioTemporalGraph& graph) {
  const Index n = graph.vertex_count();
  const Eigen::VectorXd out_degree = graph.arcs * Eigen::VectorXd::Ones(n);
  SparseMatrix degree(n, n);
  degree.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < n; ++i) degree.insert(i, i) = out_degree[i];
  SparseMatrix L = degree - SparseMatrix(graph.arcs);
  L.makeCompressed();
  return L;
}

SymmetricLaplacian laplacian(const SpatioTemporalGraph& graph) {
  const Index n = graph.vertex_count();
  const SparseMatrix W(graph.arcs);
  const SparseMatrix Wt = W.transpose();
  const SparseMatrix sym = 0.5 * (W + Wt);
  const Eigen::VectorXd degree_values = sym * Eigen::VectorXd::Ones(n);
  SparseMatrix degree(n, n);
  degree.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < n; ++i) degree.insert(i, i) = degree_values[i];

  SymmetricLaplacian out;
  out.matrix = degree - sym;
  out.matrix.prune(0.0);
  out.matrix.makeCompressed();
  const auto estimate = estimate_lambda_max(out.matrix);
  out.lambda_max_estimate = estimate.value;
  out.lambda_converged = estimate.converged;
  return out;
}

SparseMatrix route_laplacian(const RouteGraph& graph) {
  const Index n = graph.size();
  SparseMatrix L(n, n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, static_cast<double>(graph.neighbors(i).size()));
    for (Index j : graph.neighbors(i)) triplets.emplace_back(i, j, -1.0);
  }
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

std::vector<Index> negative_nodal_domain(const Eigen::VectorXd& eigenvector) {
  std::vector<Index> out;
  if (eigenvector.size() == 0) return out;
  Index pivot = 0;
  eigenvector.cwiseAbs().maxCoeff(&pivot);
  const double sign = eigenvector[pivot] < 0.0 ? -1.0 : 1.0;
  const double floor = 1e-10 * std::abs(eigenvector[pivot]);
  for (Index i = 0; i < eigenvector.size(); ++i) {
    if (sign * eigenvector[i] < -floor) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> downsample_mask(const RouteGraph& base) {
  std::vector<NodeId> out;
  if (base.size() == 0 || base.edges().empty()) return out;
  const Eigen::MatrixXd L(route_laplacian(base));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed on the route graph Laplacian");
  }
  const Index top = base.size() - 1;
  for (Index i : negative_nodal_domain(solver.eigenvectors().col(top))) {
    out.push_back(base.node(i).node_id);
  }
  return out;
}

}  // namespace stgw
