#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "stgw/error.hpp"
#include "stgw/io.hpp"
#include "stgw/pipeline.hpp"
#include "stgw/report.hpp"
#include "stgw/synth.hpp"

using namespace stgw;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const fs::path kFive = fs::path(STGW_FIXTURES) / "five";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("stgw_pipe_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& f) const { return path / f; }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config_for(const fs::path& data, const fs::path& out) {
  RunConfig c;
  c.io.nodes = (data / "nodes.csv").string();
  c.io.edges = (data / "edges.csv").string();
  c.io.cases = (data / "cases.csv").string();
  c.io.output_dir = out.string();
  return c;
}

// Counts elements with the given tag and class attribute anywhere in the tree.
int count_elements(const pt::ptree& tree, const std::string& tag, const std::string& cls) {
  int n = 0;
  for (const auto& [name, child] : tree) {
    if (name == tag && child.get<std::string>("<xmlattr>.class", "") == cls) ++n;
    n += count_elements(child, tag, cls);
  }
  return n;
}

pt::ptree parse_svg(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STGW_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("synthetic data is deterministic and correlated along edges") {
  SyntheticSpec spec;
  spec.nodes = 30;
  spec.weeks = 12;
  spec.seed = 5;
  spec.injections = {{3, 5, 8, 4.0}};
  const SyntheticData a = generate_synthetic(spec);
  const SyntheticData b = generate_synthetic(spec);
  CHECK(a.cases == b.cases);
  CHECK(a.edges == b.edges);

  TempDir d1("synth1"), d2("synth2");
  write_synthetic(a, d1.path);
  write_synthetic(b, d2.path);
  for (const char* f : {"nodes.csv", "edges.csv", "cases.csv"}) {
    CHECK(read_file(d1 / f) == read_file(d2 / f));
  }

  // connected
  const RouteGraph g = build_route_graph(a.nodes, a.edges);
  CHECK(g.isolated().empty());
  std::vector<bool> seen(30, false);
  std::vector<Index> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j : g.neighbors(i))
      if (!seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }));

  SyntheticSpec other = spec;
  other.seed = 6;
  CHECK(generate_synthetic(other).cases != a.cases);

  SyntheticSpec plain = spec;
  plain.injections.clear();
  const SyntheticData c = generate_synthetic(plain);
  const Index node3 = g.index_of(3);
  for (Index t = 4; t < 8; ++t) CHECK(a.cases(node3, t) >= 3.0 * c.cases(node3, t));

  SyntheticSpec bad = spec;
  bad.injections = {{99, 1, 2, 2.0}};
  CHECK_THROWS_AS(generate_synthetic(bad), ValidationError);
  bad = spec;
  bad.neighbors = 30;
  CHECK_THROWS_AS(generate_synthetic(bad), ValidationError);
}

TEST_CASE("end-to-end run on a 20-node synthetic dataset") {
  TempDir data("e2e_data"), out("e2e_out");
  SyntheticSpec spec;
  spec.injections = {{3, 5, 8, 4.0}};
  write_synthetic(generate_synthetic(spec), data.path);

  RunConfig config = config_for(data.path, out.path);
  std::ostringstream log;
  const auto start = std::chrono::steady_clock::now();
  Pipeline(config, &log).run();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 60.0);

  for (const char* f : {files::kSignal, files::kTransition, files::kProduct, files::kCoefficients,
                        files::kClasses, files::kSlices, files::kRankings, files::kSlicePlot,
                        files::kRankingPlot, files::kManifest, files::kModel}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  int maps = 0;
  for (const auto& name : listing(out.path)) maps += name.rfind("map_classes_week", 0) == 0;
  CHECK(maps == 1);
  CHECK(log.str().find("build-graph: N=20") != std::string::npos);

  for (const auto& name : listing(out.path)) {
    if (name.size() > 4 && name.substr(name.size() - 4) == ".svg") {
      CHECK_NOTHROW(parse_svg(read_file(out / name)));
    }
  }

  Manifest m;
  m.load(out / files::kManifest);
  CHECK(m.get("gat", "heads") == "7");
  CHECK(m.get("sgwt", "cheb_order") == "40");
  CHECK(m.get("outputs", files::kClasses) == git_blob_hash(out / files::kClasses));
  CHECK(m.get("stage.product", "arcs") == m.get("stage.product", "expected_arcs"));
  CHECK(m.get("stage.build-graph", "input_cases_hash") == git_blob_hash(data / "cases.csv"));

  // replaying the stages one by one reproduces the same bytes
  TempDir replay("e2e_replay");
  RunConfig stepwise = config;
  stepwise.io.output_dir = replay.path.string();
  Pipeline p(stepwise);
  for (Stage s : all_stages()) p.run_stage(s);
  for (const auto& name : listing(out.path)) {
    if (name == files::kManifest) continue;
    CHECK_MESSAGE(read_file(out / name) == read_file(replay / name), name);
  }
}

TEST_CASE("missing config sections fall back to defaults in the manifest") {
  TempDir out("defaults");
  std::ofstream(out / "run.ini") << "[io]\nnodes = " << (kFive / "nodes.csv").string()
                                 << "\nedges = " << (kFive / "edges.csv").string()
                                 << "\ncases = " << (kFive / "cases.csv").string()
                                 << "\noutput_dir = " << (out / "o").string() << "\n";
  RunConfig config = load_config(out / "run.ini");
  Pipeline(config).run_stage(Stage::kBuildGraph);
  Manifest m;
  m.load(out / "o" / files::kManifest);
  CHECK(m.get("gat", "heads") == "7");
  CHECK(m.get("gat", "hidden") == "122");
  CHECK(m.get("classify", "theta_hi") == "1.5");
  CHECK(m.get("sgwt", "scale_hi") == "40");
  CHECK(m.get("stage.build-graph", "nodes") == "5");
  CHECK(m.get("stage.build-graph", "weeks") == "3");
}

TEST_CASE("class map legend and masking") {
  const RouteGraph g = build_route_graph(read_nodes(kFive / "nodes.csv"), read_edges(kFive / "edges.csv"));
  const Eigen::VectorXi ones = Eigen::VectorXi::Ones(5);
  const pt::ptree single = parse_svg(class_map_svg(g, ones, 1));
  CHECK(count_elements(single, "rect", "legend-entry") == 1);
  CHECK(count_elements(single, "circle", "node") == 5);

  Eigen::VectorXi mixed(5);
  mixed << 1, 5, 3, 5, 2;
  CHECK(count_elements(parse_svg(class_map_svg(g, mixed, 2)), "rect", "legend-entry") == 4);

  const auto mask = downsample_mask(g);
  REQUIRE(!mask.empty());
  const std::set<NodeId> hidden(mask.begin(), mask.end());
  const pt::ptree masked = parse_svg(class_map_svg(g, mixed, 2, hidden));
  CHECK(count_elements(masked, "circle", "node") == 5 - static_cast<int>(hidden.size()));
}

TEST_CASE("report honours the mask switch") {
  TempDir data("mask_data"), on("mask_on"), off("mask_off");
  SyntheticSpec spec;
  spec.nodes = 12;
  spec.weeks = 4;
  write_synthetic(generate_synthetic(spec), data.path);
  RunConfig a = config_for(data.path, on.path);
  a.report.map_week = 2;
  a.gat.max_epochs = 50;
  RunConfig b = a;
  b.io.output_dir = off.path.string();
  b.report.mask = false;
  Pipeline(a).run();
  Pipeline(b).run();
  const auto hidden = read_csv(on / files::kMask, {"node_id"}).rows.size();
  REQUIRE(hidden > 0);
  const int with = count_elements(parse_svg(read_file(on / "map_classes_week2.svg")), "circle", "node");
  const int without = count_elements(parse_svg(read_file(off / "map_classes_week2.svg")), "circle", "node");
  CHECK(without == 12);
  CHECK(with == 12 - static_cast<int>(hidden));
}

TEST_CASE("failed runs name the stage and leave no partial output") {
  TempDir out("fail");
  RunConfig config = config_for(kFive, out / "o");
  config.report.map_week = 9;
  config.gat.max_epochs = 20;
  std::string message;
  try {
    Pipeline(config).run();
  } catch (const Error& e) {
    message = e.what();
    CHECK(e.code() == ExitCode::kValidation);
  }
  CHECK(message.find("stage report") != std::string::npos);
  CHECK(message.find("map_week") != std::string::npos);
  CHECK(listing(out / "o").empty());

  RunConfig missing = config_for(out.path, out / "p");
  try {
    Pipeline(missing).run_stage(Stage::kBuildGraph);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ExitCode::kIo);
    CHECK(std::string(e.what()).find("stage build-graph") != std::string::npos);
  }

  // a later stage with no earlier outputs to read
  RunConfig orphan = config_for(kFive, out / "q");
  try {
    Pipeline(orphan).run_stage(Stage::kClassify);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ExitCode::kIo);
  }
}

TEST_CASE("command line exit codes") {
  TempDir out("cli");
  const std::string data = "--data " + kFive.string();
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --weeks 3..1 " + data) == 2);
  CHECK(run_cli("build-graph --data " + (out / "nowhere").string() + " --out " + (out / "a").string()) == 4);
  CHECK(run_cli("build-graph " + data + " --out " + (out / "b").string()) == 0);
  CHECK(fs::exists(out / "b" / files::kSignal));

  fs::create_directories(out / "bad");
  for (const char* f : {"nodes.csv", "edges.csv"}) fs::copy_file(kFive / f, out / "bad" / f);
  std::ofstream(out / "bad" / "cases.csv") << read_file(kFive / "cases.csv") << "99,1,3\n";
  CHECK(run_cli("build-graph --data " + (out / "bad").string() + " --out " + (out / "c").string()) == 2);

  CHECK(run_cli("synth --nodes 8 --num-weeks 3 --rho 0.5 --seed 2 --out " + (out / "s").string()) == 0);
  CHECK(fs::exists(out / "s" / "cases.csv"));
  CHECK(run_cli("synth --rho 2 --out " + (out / "s2").string()) == 2);
}
