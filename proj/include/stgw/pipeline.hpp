#pragma once

// Stage-by-stage driver. Every stage reads its inputs from the dataset files
// and from files written by earlier stages in the output directory, so any
// stage can be replayed on its own.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "stgw/io.hpp"

namespace stgw {

enum class Stage { kBuildGraph, kTrain, kProduct, kTransform, kClassify, kRank, kReport };

std::string stage_name(Stage stage);
const std::vector<Stage>& all_stages();

namespace files {
inline constexpr const char* kSignal = "signal.csv";
inline constexpr const char* kMask = "mask.csv";
inline constexpr const char* kModel = "model.ckpt";
inline constexpr const char* kTraining = "training.csv";
inline constexpr const char* kTransition = "transition.csv";
inline constexpr const char* kProduct = "product.csv";
inline constexpr const char* kCoefficients = "coefficients.csv";
inline constexpr const char* kClasses = "classes.csv";
inline constexpr const char* kSlices = "slices.csv";
inline constexpr const char* kRankings = "rankings.csv";
inline constexpr const char* kSlicePlot = "slices.svg";
inline constexpr const char* kRankingPlot = "ranking.svg";
inline constexpr const char* kManifest = "run-manifest.txt";
}  // namespace files

class Pipeline {
 public:
  /// `log` receives one-line stage summaries; may be null.
  explicit Pipeline(RunConfig config, std::ostream* log = nullptr);

  /// Runs one stage. On failure the files it wrote are removed and the error
  /// is rethrown with the stage name prefixed, keeping its exit code.
  void run_stage(Stage stage);
  /// Every stage in order; on failure all files written by this run go.
  void run();

  const RunConfig& config() const { return config_; }
  std::filesystem::path output_dir() const { return config_.io.output_dir; }
  /// Files written so far, in write order.
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  void build_graph();
  void train();
  void product();
  void transform();
  void classify();
  void rank();
  void report();

  std::filesystem::path out(const std::string& name) const;
  void record(const std::filesystem::path& path);
  void save_manifest(const std::string& section,
                     const std::map<std::string, std::string>& values);

  RunConfig config_;
  std::ostream* log_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace stgw
