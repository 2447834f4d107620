#pragma once

// Route graph, case signals, strong-product spatio-temporal graph and its
// Laplacian. Vertex (i, t) of the product graph is stored at index t*N + i.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace stgw {

using Index = Eigen::Index;
using NodeId = std::int64_t;
using SparseMatrix = Eigen::SparseMatrix<double>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct NodeRecord {
  NodeId node_id = 0;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t population = 1;
};

/// N x T non-negative matrix; row order follows the owning RouteGraph.
struct CaseMatrix {
  Eigen::MatrixXd values;

  Index nodes() const { return values.rows(); }
  Index weeks() const { return values.cols(); }
};

/// Undirected, self-loop-free spatial graph. Immutable once built.
class RouteGraph {
 public:
  Index size() const { return static_cast<Index>(nodes_.size()); }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const NodeRecord& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }

  /// Symmetric binary adjacency.
  const SparseMatrix& adjacency() const { return adjacency_; }
  /// Unordered edges as index pairs with first < second, sorted.
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }
  /// Sorted one-hop neighbours of i, excluding i.
  const std::vector<Index>& neighbors(Index i) const {
    return neighbors_[static_cast<std::size_t>(i)];
  }
  bool adjacent(Index i, Index j) const;

  std::optional<Index> find(NodeId id) const;
  /// Throws ValidationError for unknown ids.
  Index index_of(NodeId id) const;

  /// Node ids with no incident edge. Kept in the graph; callers decide.
  const std::vector<NodeId>& isolated() const { return isolated_; }

  /// Copy of the graph without the given nodes (and their edges).
  RouteGraph without_nodes(const std::vector<NodeId>& drop) const;

 private:
  friend RouteGraph build_route_graph(
      std::vector<NodeRecord> nodes,
      const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::vector<NodeRecord> nodes_;
  std::unordered_map<NodeId, Index> index_;
  SparseMatrix adjacency_;
  std::vector<std::pair<Index, Index>> edges_;
  std::vector<std::vector<Index>> neighbors_;
  std::vector<NodeId> isolated_;
};

/// Duplicate and reversed edges collapse to one. Rejects duplicate node ids,
/// dangling endpoints, self-loops and populations below 1.
RouteGraph build_route_graph(std::vector<NodeRecord> nodes,
                             const std::vector<std::pair<NodeId, NodeId>>& edges);

/// Cases per thousand inhabitants: 1000 * raw / population.
CaseMatrix normalize_cases(const CaseMatrix& raw, const Eigen::VectorXd& populations);
CaseMatrix normalize_cases(const CaseMatrix& raw, const RouteGraph& graph);

/// Row-stochastic attention matrix; support is adjacency plus diagonal.
struct TransitionMatrix {
  Eigen::MatrixXd P;
};

/// Throws ValidationError when rows do not sum to one within `tol`, or the
/// positive entries differ from adjacency-plus-diagonal.
void validate_transition(const TransitionMatrix& transition, const RouteGraph& base,
                         double tol = 1e-9);

struct SpatioTemporalGraph {
  Index base_node_count = 0;
  Index slice_count = 0;
  /// arcs(u, v) is the weight of the directed arc u -> v.
  RowSparseMatrix arcs;

  Index vertex_count() const { return base_node_count * slice_count; }
  Index arc_count() const { return arcs.nonZeros(); }
  Index vertex(Index node, Index slice) const { return slice * base_node_count + node; }
};

/// Strong product of the route graph with a directed path of `slices`
/// vertices. Spatial arc (i,t)->(j,t) carries p_ij; temporal arc
/// (i,t)->(j,t+1) carries p_ji for j in the closed neighbourhood of i.
SpatioTemporalGraph strong_product(const RouteGraph& base, const TransitionMatrix& transition,
                                   Index slices);

/// Expected arc count T*2|E| + (T-1)*(N + 2|E|).
Index strong_product_arc_count(Index nodes, Index edges, Index slices);

struct LambdaMaxEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline constexpr double kLambdaInflation = 1.01;

/// Power iteration on the norm ratio |Lv|/|v| (relative tolerance 1e-6, at
/// most 1000 steps), inflated by 1.01. Falls back to the Gershgorin bound
/// with converged = false.
template <typename MatrixType>
LambdaMaxEstimate estimate_lambda_max(const MatrixType& L, double rel_tol = 1e-6,
                                      int max_iterations = 1000);

struct SymmetricLaplacian {
  SparseMatrix matrix;
  double lambda_max_estimate = 0.0;
  bool lambda_converged = false;
};

/// Directed Laplacian D_out - W; rows sum to zero.
SparseMatrix directed_laplacian(const SpatioTemporalGraph& graph);

/// Laplacian of the symmetrized weights (W + W^T)/2. Exactly symmetric and
/// positive semi-definite; the lambda_max estimate is filled in.
SymmetricLaplacian laplacian(const SpatioTemporalGraph& graph);

/// Combinatorial Laplacian D - A of the route graph.
SparseMatrix route_laplacian(const RouteGraph& graph);

/// Nodes with strictly negative entries in the top Laplacian eigenvector,
/// sign-fixed so its largest-magnitude entry is positive.
std::vector<NodeId> downsample_mask(const RouteGraph& base);

/// Sign-fixing and thresholding step of downsample_mask, exposed for tests.
std::vector<Index> negative_nodal_domain(const Eigen::VectorXd& eigenvector);

// ---------------------------------------------------------------------------

template <typename MatrixType>
LambdaMaxEstimate estimate_lambda_max(const MatrixType& L, double rel_tol,
                                      int max_iterations) {
  const Index n = L.rows();
  LambdaMaxEstimate out;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double gershgorin = n == 0 ? 0.0 : (L.cwiseAbs() * ones).maxCoeff();

  // Deterministic start vector that is not orthogonal to generic eigenvectors
  // and not constant (constants lie in a Laplacian's null space).
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + 2.0 * static_cast<double>(i));
  double norm = v.norm();
  if (norm == 0.0) {
    out.value = gershgorin;
    return out;
  }
  v /= norm;

  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd w = L * v;
    const double estimate = w.norm();
    out.iterations = it;
    if (!(estimate > 0.0) || !std::isfinite(estimate)) break;
    v = w / estimate;
    if (it > 1 && std::abs(estimate - previous) <= rel_tol * estimate) {
      out.value = kLambdaInflation * estimate;
      out.converged = true;
      return out;
    }
    previous = estimate;
  }
  out.value = gershgorin;
  out.converged = false;
  return out;
}

}  // namespace stgw
