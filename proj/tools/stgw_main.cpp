// stgw: command line driver for the spatio-temporal graph wavelet pipeline.

#include <charconv>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stgw/error.hpp"
#include "stgw/io.hpp"
#include "stgw/pipeline.hpp"
#include "stgw/synth.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::optional<std::uint64_t> seed;
  std::optional<bool> mask;
  std::string weeks;

  // synth
  std::optional<stgw::Index> nodes;
  std::optional<stgw::Index> num_weeks;
  std::optional<double> rho;
  std::optional<stgw::Index> neighbors;
  std::string inject;
};

std::pair<stgw::Index, stgw::Index> parse_window(const std::string& text) {
  const auto dots = text.find("..");
  stgw::Index a = 0, b = 0;
  auto number = [&](const std::string& s, stgw::Index& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
  };
  if (dots == std::string::npos || !number(text.substr(0, dots), a) ||
      !number(text.substr(dots + 2), b) || a < 1 || b < a) {
    throw stgw::ValidationError("--weeks expects a..b with 1 <= a <= b, got '" + text + "'");
  }
  return {a, b};
}

stgw::RunConfig resolve(const Options& o) {
  stgw::RunConfig config = o.config.empty() ? stgw::RunConfig{} : stgw::load_config(o.config);
  if (!o.data.empty()) {
    const std::filesystem::path dir(o.data);
    config.io.nodes = (dir / "nodes.csv").string();
    config.io.edges = (dir / "edges.csv").string();
    config.io.cases = (dir / "cases.csv").string();
  }
  if (!o.out.empty()) config.io.output_dir = o.out;
  if (o.seed) {
    config.gat.seed = *o.seed;
    config.synth.seed = *o.seed;
  }
  if (o.mask) config.report.mask = *o.mask;
  if (!o.weeks.empty()) {
    const auto [a, b] = parse_window(o.weeks);
    config.rank.first_week = a;
    config.rank.last_week = b;
  }
  if (o.nodes) config.synth.nodes = *o.nodes;
  if (o.num_weeks) config.synth.weeks = *o.num_weeks;
  if (o.rho) config.synth.rho = *o.rho;
  if (o.neighbors) config.synth.neighbors = *o.neighbors;
  if (!o.inject.empty()) config.synth.injections = stgw::parse_injections(o.inject);
  config.validate();
  return config;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "INI or JSON run configuration");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--data", o.data, "directory holding nodes.csv, edges.csv and cases.csv");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](const std::uint64_t& s) { o.seed = s; }, "random seed");
  cmd->add_flag_function(
      "--mask,!--no-mask", [&o](std::int64_t count) { o.mask = count > 0; },
      "hide the downsampled nodes in the class map");
  cmd->add_option("--weeks", o.weeks, "ranking window a..b (1-based, inclusive)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal graph wavelet analysis of weekly case counts"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::optional<stgw::Stage>>> commands = {
      {"build-graph", stgw::Stage::kBuildGraph},
      {"train", stgw::Stage::kTrain},
      {"product", stgw::Stage::kProduct},
      {"transform", stgw::Stage::kTransform},
      {"classify", stgw::Stage::kClassify},
      {"rank", stgw::Stage::kRank},
      {"report", stgw::Stage::kReport},
      {"run", std::nullopt},
  };
  const std::map<std::string, std::string> help = {
      {"build-graph", "validate the inputs and write the normalized signal and display mask"},
      {"train", "train the attention model and extract the transition matrix"},
      {"product", "build the spatio-temporal strong product graph"},
      {"transform", "Chebyshev wavelet transform of the signal on the product graph"},
      {"classify", "torque values, node and slice classes, a-scores"},
      {"rank", "mean a-score ranking and influential scores"},
      {"report", "SVG plots"},
      {"run", "every stage in order"},
  };
  std::vector<std::pair<CLI::App*, std::optional<stgw::Stage>>> subs;
  for (const auto& [name, stage] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help.at(name));
    add_common(cmd, o);
    subs.emplace_back(cmd, stage);
  }
  CLI::App* synth = app.add_subcommand("synth", "write a planted synthetic dataset");
  add_common(synth, o);
  synth->add_option_function<stgw::Index>(
      "--nodes", [&o](const stgw::Index& v) { o.nodes = v; }, "node count");
  synth->add_option_function<stgw::Index>(
      "--num-weeks", [&o](const stgw::Index& v) { o.num_weeks = v; }, "number of weeks");
  synth->add_option_function<double>(
      "--rho", [&o](const double& v) { o.rho = v; }, "neighbour correlation in [0, 1]");
  synth->add_option_function<stgw::Index>(
      "--neighbors", [&o](const stgw::Index& v) { o.neighbors = v; }, "k nearest neighbours");
  synth->add_option("--inject", o.inject, "anomalies as node:first-last:multiplier;...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(stgw::ExitCode::kValidation);
  }

  try {
    const stgw::RunConfig config = resolve(o);
    if (synth->parsed()) {
      const auto dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
      stgw::write_synthetic(stgw::generate_synthetic(config.synth), dir);
      std::cout << "synth: wrote " << config.synth.nodes << " nodes, " << config.synth.weeks
                << " weeks to " << dir.string() << '\n';
      return 0;
    }
    stgw::Pipeline pipeline(config, &std::cout);
    for (const auto& [cmd, stage] : subs) {
      if (!cmd->parsed()) continue;
      if (stage) {
        pipeline.run_stage(*stage);
      } else {
        pipeline.run();
      }
    }
    return 0;
  } catch (const stgw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(stgw::ExitCode::kIo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(stgw::ExitCode::kNumeric);
  }
}
