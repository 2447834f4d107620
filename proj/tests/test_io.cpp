#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stgw/error.hpp"
#include "stgw/io.hpp"

using namespace stgw;
namespace fs = std::filesystem;

namespace {

const fs::path kFive = fs::path(STGW_FIXTURES) / "five";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("stgw_io_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& f) const { return path / f; }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("five-node fixture ingests") {
  const Dataset d = ingest(kFive / "nodes.csv", kFive / "edges.csv", kFive / "cases.csv");
  CHECK(d.graph.size() == 5);
  CHECK(d.cases.weeks() == 3);
  CHECK(d.graph.edges().size() == 6);
  CHECK(d.graph.node(4).name == "West Newbury, MA");
  CHECK(d.cases.values(d.graph.index_of(4), 1) == 4.0);
  CHECK(d.cases.values(d.graph.index_of(2), 2) == 47.0);
}

TEST_CASE("case validation names the offending row") {
  TempDir dir("cases");
  const RouteGraph g = build_route_graph(read_nodes(kFive / "nodes.csv"), read_edges(kFive / "edges.csv"));
  std::string base = read_file(kFive / "cases.csv");

  write_file(dir / "unknown.csv", base + "99,1,3\n");
  const std::string unknown = error_of([&] { read_cases(dir / "unknown.csv", g); });
  CHECK(unknown.find("node 99") != std::string::npos);
  CHECK(unknown.find(":17") != std::string::npos);

  std::string zero = base;
  zero.replace(zero.find("1,1,42"), 6, "1,0,42");
  write_file(dir / "zero.csv", zero);
  CHECK(error_of([&] { read_cases(dir / "zero.csv", g); }).find("week 0") != std::string::npos);
  CHECK_THROWS_AS(read_cases(dir / "zero.csv", g), ValidationError);

  std::string missing = base;
  missing.erase(missing.find("3,2,50\n"), 7);
  write_file(dir / "missing.csv", missing);
  CHECK(error_of([&] { read_cases(dir / "missing.csv", g); }).find("missing cases for node 3") !=
        std::string::npos);

  write_file(dir / "dup.csv", base + "1,2,5\n");
  CHECK(error_of([&] { read_cases(dir / "dup.csv", g); }).find("duplicate") != std::string::npos);

  std::string negative = base;
  negative.replace(negative.find("4,2,4"), 5, "4,2,-4");
  write_file(dir / "neg.csv", negative);
  CHECK_THROWS_AS(read_cases(dir / "neg.csv", g), ValidationError);

  write_file(dir / "header.csv", "node,week,cases\n1,1,1\n");
  CHECK_THROWS_AS(read_cases(dir / "header.csv", g), ValidationError);

  write_file(dir / "text.csv", "node_id,week,cases\n1,1,many\n");
  CHECK(error_of([&] { read_cases(dir / "text.csv", g); }).find("'cases'") != std::string::npos);

  CHECK_THROWS_AS(read_cases(dir / "absent.csv", g), IoError);
}

TEST_CASE("CSV quoting round trip") {
  TempDir dir("quote");
  std::vector<NodeRecord> nodes = {{1, "Plain", 42.5, -71.25, 100},
                                   {2, "Comma, Town", 0.1, 0.2, 5},
                                   {3, "Say \"hi\"", -1e-7, 3.0, 7}};
  write_nodes(dir / "nodes.csv", nodes);
  const auto back = read_nodes(dir / "nodes.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].node_id == nodes[i].node_id);
    CHECK(back[i].name == nodes[i].name);
    CHECK(back[i].lat == nodes[i].lat);
    CHECK(back[i].lon == nodes[i].lon);
    CHECK(back[i].population == nodes[i].population);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("git-style content hash") {
  CHECK(git_blob_hash(kFive / "nodes.csv") == "ebb064831fdae5c13e19a89ab805dbb3e1e617dd");
  TempDir dir("hash");
  write_file(dir / "hello.txt", "hello\n");
  CHECK(git_blob_hash(dir / "hello.txt") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("configuration text") {
  const RunConfig ini = parse_config_text(
      "# comment\n[gat]\nheads = 3\nlr = 0.01\n\n[report]\nmask = false\n[synth]\ninjections = 3:5-8:4;7:1-2:0.5\n");
  CHECK(ini.gat.heads == 3);
  CHECK(ini.gat.lr == 0.01);
  CHECK(ini.gat.hidden == 122);
  CHECK_FALSE(ini.report.mask);
  REQUIRE(ini.synth.injections.size() == 2);
  CHECK(ini.synth.injections[0].node == 3);
  CHECK(ini.synth.injections[0].first_week == 5);
  CHECK(ini.synth.injections[0].last_week == 8);
  CHECK(ini.synth.injections[1].multiplier == 0.5);
  CHECK(format_injections(ini.synth.injections) == "3:5-8:4;7:1-2:0.5");

  const RunConfig json = parse_config_text(R"({"sgwt": {"cheb_order": 20}, "classify": {"theta_hi": 2}})");
  CHECK(json.sgwt.cheb_order == 20);
  CHECK(json.classify.theta_hi == 2.0);
  CHECK(json.classify.theta_lo == doctest::Approx(2.0 / 3.0));

  CHECK(error_of([] { parse_config_text("[gat]\nheadz = 3\n"); }).find("headz") != std::string::npos);
  CHECK(error_of([] { parse_config_text("[model]\n"); }).find("model") != std::string::npos);
  CHECK_THROWS_AS(parse_config_text(R"({"gat": {"nope": 1}})"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("[gat]\nlr = fast\n"), ValidationError);
  CHECK_THROWS_AS(parse_injections("3:8-5:4"), ValidationError);
  CHECK_THROWS_AS(parse_injections("3:5-8:0"), ValidationError);

  RunConfig bad;
  bad.gat.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = RunConfig{};
  bad.classify.theta_lo = 2.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = RunConfig{};
  bad.sgwt.filters = 6;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = RunConfig{};
  bad.synth.rho = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("configuration file paths and resolved values") {
  TempDir dir("config");
  write_file(dir / "run.ini", "[io]\nnodes = data/n.csv\noutput_dir = /abs/out\n");
  const RunConfig c = load_config(dir / "run.ini");
  CHECK(fs::path(c.io.nodes) == dir.path / "data/n.csv");
  CHECK(c.io.output_dir == "/abs/out");
  CHECK_THROWS_AS(load_config(dir / "none.ini"), IoError);

  const auto resolved = RunConfig{}.resolved();
  for (const char* section : {"gat", "sgwt", "classify", "graph", "rank", "report", "io", "synth"}) {
    CHECK(resolved.count(section) == 1);
  }
  CHECK(resolved.at("gat").at("heads") == "7");
  CHECK(resolved.at("sgwt").at("cheb_order") == "40");
  CHECK(resolved.at("classify").at("theta_hi") == "1.5");
}

TEST_CASE("manifest round trip") {
  TempDir dir("manifest");
  Manifest m;
  m.set("zeta", "b", "2");
  m.set("alpha", "x", "hello world");
  m.merge({{"alpha", {{"a", "1"}}}});
  m.save(dir / "m.txt");
  CHECK(read_file(dir / "m.txt") == "[alpha]\na = 1\nx = hello world\n\n[zeta]\nb = 2\n");
  Manifest back;
  back.load(dir / "m.txt");
  CHECK(back.sections() == m.sections());
  CHECK(back.get("alpha", "x") == "hello world");
  CHECK(back.get("alpha", "missing").empty());
}
