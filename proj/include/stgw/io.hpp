#pragma once

// CSV schemas, run configuration and the run manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "stgw/graph.hpp"

namespace stgw {

// --- CSV --------------------------------------------------------------------

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};

/// Reads a comma-separated file with double-quote escaping. The header must
/// equal `expected_header` exactly; every row must have the same width.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& expected_header);

std::int64_t parse_int(const CsvTable& table, std::size_t row, std::size_t column);
double parse_double(const CsvTable& table, std::size_t row, std::size_t column);

/// Shortest decimal representation that round-trips.
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<NodeRecord> read_nodes(const std::filesystem::path& path);
std::vector<std::pair<NodeId, NodeId>> read_edges(const std::filesystem::path& path);
/// Long-format cases; `weeks` = 0 infers T from the largest week present.
CaseMatrix read_cases(const std::filesystem::path& path, const RouteGraph& graph,
                      Index weeks = 0);

void write_nodes(const std::filesystem::path& path, const std::vector<NodeRecord>& nodes);
void write_edges(const std::filesystem::path& path,
                 const std::vector<std::pair<NodeId, NodeId>>& edges);
void write_cases(const std::filesystem::path& path, const RouteGraph& graph,
                 const Eigen::MatrixXd& cases, const std::string& value_column = "cases");

struct Dataset {
  RouteGraph graph;
  CaseMatrix cases;
};

/// Reads and cross-validates nodes.csv, edges.csv and cases.csv.
Dataset ingest(const std::filesystem::path& nodes, const std::filesystem::path& edges,
               const std::filesystem::path& cases, Index weeks = 0);

/// transition.csv: src_id,dst_id,p over the support, ascending (src, dst).
void write_transition(const std::filesystem::path& path, const RouteGraph& graph,
                      const TransitionMatrix& transition);
TransitionMatrix read_transition(const std::filesystem::path& path, const RouteGraph& graph);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::filesystem::path& path);

// --- configuration -----------------------------------------------------------

struct SyntheticSpec {
  Index nodes = 20;
  Index weeks = 10;
  Index neighbors = 3;  // k-nearest-neighbour links before symmetrization
  double rho = 0.9;
  std::uint64_t seed = 42;

  struct Injection {
    NodeId node = 0;
    Index first_week = 1;
    Index last_week = 1;
    double multiplier = 1.0;
  };
  std::vector<Injection> injections;
};

/// Parses "node:first-last:multiplier" items separated by ';'.
std::vector<SyntheticSpec::Injection> parse_injections(const std::string& text);
std::string format_injections(const std::vector<SyntheticSpec::Injection>& injections);

struct RunConfig {
  struct Gat {
    Index heads = 7;
    Index hidden = 122;
    Index out = 88;
    double lr = 0.005;
    int patience = 100;
    int max_epochs = 3000;
    std::uint64_t seed = 42;
    double leaky_slope = 0.35;
  } gat;
  struct Sgwt {
    Index filters = 8;
    Index cheb_order = 40;
    double scale_lo = 1.0;
    double scale_hi = 40.0;
    Index quadrature_points = Index(1) << 14;
  } sgwt;
  struct Classify {
    double theta_hi = 1.5;
    double theta_lo = 2.0 / 3.0;
  } classify;
  struct Graph {
    bool drop_isolated = false;
  } graph;
  struct Rank {
    Index first_week = 1;
    Index last_week = 0;  // 0: through the last week
  } rank;
  struct Report {
    bool mask = true;
    Index top_k = 10;
    Index map_week = 0;  // 0: slice with the largest class-5 share
  } report;
  struct Io {
    std::string nodes = "nodes.csv";
    std::string edges = "edges.csv";
    std::string cases = "cases.csv";
    std::string output_dir = "out";
    Index weeks = 0;
  } io;
  SyntheticSpec synth;

  /// Every tunable as section -> key -> value text.
  std::map<std::string, std::map<std::string, std::string>> resolved() const;
  /// Rejects non-positive numeric fields and inconsistent windows.
  void validate() const;
};

/// INI-style `[section]` / `key = value` text, or JSON (an object of
/// sections) when the file starts with '{'. Missing keys keep defaults;
/// unknown keys are errors. Relative io paths resolve against the config
/// file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

// --- manifest ----------------------------------------------------------------

/// Sectioned key/value record of a run, written sorted for reproducibility.
class Manifest {
 public:
  void set(const std::string& section, const std::string& key, const std::string& value);
  void merge(const std::map<std::string, std::map<std::string, std::string>>& values);
  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }
  std::string get(const std::string& section, const std::string& key) const;

  void load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace stgw
