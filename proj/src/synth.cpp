#include "stgw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "stgw/error.hpp"

namespace stgw {

namespace {

constexpr double kLatLo = 41.3, kLatHi = 42.8;
constexpr double kLonLo = -73.4, kLonHi = -70.0;
constexpr double kTemporalMemory = 0.6; // AR(1) coefficient of the latent factors
constexpr double kRateSpread = 0.5;

struct Point {
  double x, y;
};

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Index find_root(std::vector<Index>& parent, Index v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

// Unit-variance AR(1) series.
Eigen::RowVectorXd ar_series(Index weeks, std::mt19937_64& rng,
                             std::normal_distribution<double>& normal) {
  Eigen::RowVectorXd s(weeks);
  const double innovation = std::sqrt(1.0 - kTemporalMemory * kTemporalMemory);
  s[0] = normal(rng);
  for (Index t = 1; t < weeks; ++t) s[t] = kTemporalMemory * s[t - 1] + innovation * normal(rng);
  return s;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  const Index n = spec.nodes;
  const Index weeks = spec.weeks;
  if (n < 3) throw ValidationError("synthetic graph needs at least 3 nodes");
  if (weeks < 1) throw ValidationError("synthetic data needs at least 1 week");
  if (spec.neighbors < 1 || spec.neighbors >= n) {
    throw ValidationError("synthetic neighbour count must lie in 1.." + std::to_string(n - 1));
  }
  if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) throw ValidationError("rho must lie in [0, 1]");
  for (const auto& inj : spec.injections) {
    if (inj.node < 1 || inj.node > n) {
      throw ValidationError("injection names node " + std::to_string(inj.node) +
                            ", outside 1.." + std::to_string(n));
    }
    if (inj.first_week < 1 || inj.last_week < inj.first_week || inj.last_week > weeks) {
      throw ValidationError("injection weeks " + std::to_string(inj.first_week) + "-" +
                            std::to_string(inj.last_week) + " outside 1.." +
                            std::to_string(weeks));
    }
    if (!(inj.multiplier > 0.0)) throw ValidationError("injection multiplier must be positive");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticData data;
  std::vector<Point> points(static_cast<std::size_t>(n));
  const double lon_scale = std::cos(42.0 * std::numbers::pi / 180.0);
  for (Index i = 0; i < n; ++i) {
    NodeRecord rec;
    rec.node_id = i + 1;
    rec.name = "Town " + std::to_string(i + 1);
    rec.lat = kLatLo + (kLatHi - kLatLo) * unit(rng);
    rec.lon = kLonLo + (kLonHi - kLonLo) * unit(rng);
    rec.population = static_cast<std::int64_t>(std::round(std::exp(
        std::log(5000.0) + (std::log(200000.0) - std::log(5000.0)) * unit(rng))));
    points[static_cast<std::size_t>(i)] = {rec.lon * lon_scale, rec.lat};
    data.nodes.push_back(std::move(rec));
  }

  // Balanced spatial clusters of about neighbors + 2 towns: the seeds take
  // turns claiming their nearest unclaimed town.
  const Index cluster_count = std::max<Index>(1, (n + spec.neighbors + 1) / (spec.neighbors + 2));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> cluster(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(cluster_count));
  for (Index c = 0; c < cluster_count; ++c) {
    cluster[order[c]] = c;
    members[c].push_back(order[c]);
  }
  for (Index assigned = cluster_count; assigned < n;) {
    for (Index c = 0; c < cluster_count && assigned < n; ++c) {
      const Point& seed = points[members[c].front()];
      Index best = -1;
      for (Index i = 0; i < n; ++i) {
        if (cluster[i] >= 0) continue;
        if (best < 0 || distance(seed, points[i]) < distance(seed, points[best])) best = i;
      }
      cluster[best] = c;
      members[c].push_back(best);
      ++assigned;
    }
  }

  // k-nearest-neighbour links inside each cluster, symmetrized.
  std::set<std::pair<Index, Index>> links;
  for (const auto& group : members) {
    for (Index i : group) {
      std::vector<std::pair<double, Index>> by_distance;
      for (Index j : group) {
        if (j != i) by_distance.emplace_back(distance(points[i], points[j]), j);
      }
      std::sort(by_distance.begin(), by_distance.end());
      const std::size_t k = std::min(by_distance.size(), static_cast<std::size_t>(spec.neighbors));
      for (std::size_t r = 0; r < k; ++r) {
        const Index j = by_distance[r].second;
        links.emplace(std::min(i, j), std::max(i, j));
      }
    }
  }

  // Join components through their closest pairs until connected.
  std::vector<Index> parent(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) parent[i] = i;
  for (const auto& [a, b] : links) parent[find_root(parent, a)] = find_root(parent, b);
  while (true) {
    const Index root0 = find_root(parent, 0);
    double best = std::numeric_limits<double>::infinity();
    std::pair<Index, Index> bridge{-1, -1};
    for (Index i = 0; i < n; ++i) {
      if (find_root(parent, i) != root0) continue;
      for (Index j = 0; j < n; ++j) {
        if (find_root(parent, j) == root0) continue;
        const double d = distance(points[i], points[j]);
        if (d < best) {
          best = d;
          bridge = {std::min(i, j), std::max(i, j)};
        }
      }
    }
    if (bridge.first < 0) break;
    links.insert(bridge);
    parent[find_root(parent, bridge.first)] = find_root(parent, bridge.second);
  }
  for (const auto& [a, b] : links) data.edges.emplace_back(a + 1, b + 1);

  // One latent factor per cluster: towns in a cluster share
  // z = sqrt(rho) u_c + sqrt(1 - rho) e.
  Eigen::MatrixXd factor(cluster_count, weeks);
  for (Index c = 0; c < cluster_count; ++c) factor.row(c) = ar_series(weeks, rng, normal);
  Eigen::MatrixXd noise(n, weeks);
  for (Index i = 0; i < n; ++i) noise.row(i) = ar_series(weeks, rng, normal);

  Eigen::MatrixXd multiplier = Eigen::MatrixXd::Ones(n, weeks);
  for (const auto& inj : spec.injections) {
    for (Index t = inj.first_week; t <= inj.last_week; ++t) {
      multiplier(inj.node - 1, t - 1) *= inj.multiplier;
    }
  }

  data.cases.resize(n, weeks);
  for (Index t = 0; t < weeks; ++t) {
    const double centre = (static_cast<double>(t) - 0.4 * weeks) / (0.25 * weeks + 1.0);
    const double base = 5.0 + 20.0 * std::exp(-centre * centre);
    for (Index i = 0; i < n; ++i) {
      const double z =
          std::sqrt(spec.rho) * factor(cluster[i], t) + std::sqrt(1.0 - spec.rho) * noise(i, t);
      const double rate = base * std::exp(kRateSpread * z) * multiplier(i, t);
      data.cases(i, t) = std::round(rate * static_cast<double>(data.nodes[i].population) / 1000.0);
    }
  }
  return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_nodes(dir / "nodes.csv", data.nodes);
  write_edges(dir / "edges.csv", data.edges);
  const RouteGraph graph = build_route_graph(data.nodes, data.edges);
  write_cases(dir / "cases.csv", graph, data.cases);
}

}  // namespace stgw
