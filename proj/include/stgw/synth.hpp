#pragma once

// Planted-geometry synthetic datasets.

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "stgw/graph.hpp"
#include "stgw/io.hpp"

namespace stgw {

struct SyntheticData {
  std::vector<NodeRecord> nodes;  // node ids 1..N
  std::vector<std::pair<NodeId, NodeId>> edges;
  Eigen::MatrixXd cases;          // N x T integer counts
};

/// Random towns in a lat/lon box linked to their k nearest neighbours (plus
/// extra links until connected). Weekly per-capita rates mix a smooth spatial
/// latent field with independent noise: z = sqrt(rho) f + sqrt(1 - rho) e.
/// Injections multiply the counts of one node over a week range.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes nodes.csv, edges.csv and cases.csv into `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace stgw
