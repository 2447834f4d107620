#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "stgw/error.hpp"
#include "stgw/io.hpp"

namespace stgw {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw ValidationError(where + ": unterminated quoted field");
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

std::string location(const CsvTable& table, std::size_t row) {
  return table.path + ":" + std::to_string(table.lines[row]);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

CsvTable read_csv(const fs::path& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  table.path = path.string();
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const std::string where = table.path + ":" + std::to_string(line_no);
    auto fields = split_line(line, where);
    if (!have_header) {
      if (fields != expected_header) {
        std::string expected;
        for (const auto& h : expected_header) expected += (expected.empty() ? "" : ",") + h;
        throw ValidationError(where + ": expected header '" + expected + "'");
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ValidationError(where + ": expected " + std::to_string(table.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (!have_header) throw ValidationError(table.path + ": missing header");
  return table;
}

std::int64_t parse_int(const CsvTable& table, std::size_t row, std::size_t column) {
  const std::string& s = table.rows[row][column];
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(location(table, row) + ": column '" + table.header[column] +
                          "' expects an integer, found '" + s + "'");
  }
  return v;
}

double parse_double(const CsvTable& table, std::size_t row, std::size_t column) {
  const std::string& s = table.rows[row][column];
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError(location(table, row) + ": column '" + table.header[column] +
                          "' expects a number, found '" + s + "'");
  }
  return v;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << quote_if_needed(fields[k]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("failed while writing " + path_.string());
}

std::vector<NodeRecord> read_nodes(const fs::path& path) {
  const auto table = read_csv(path, {"node_id", "name", "lat", "lon", "population"});
  std::vector<NodeRecord> nodes;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    NodeRecord n;
    n.node_id = parse_int(table, r, 0);
    n.name = table.rows[r][1];
    n.lat = parse_double(table, r, 2);
    n.lon = parse_double(table, r, 3);
    n.population = parse_int(table, r, 4);
    if (n.population < 1) {
      throw ValidationError(location(table, r) + ": node " + std::to_string(n.node_id) +
                            " has population " + std::to_string(n.population));
    }
    nodes.push_back(std::move(n));
  }
  return nodes;
}

std::vector<std::pair<NodeId, NodeId>> read_edges(const fs::path& path) {
  const auto table = read_csv(path, {"src_id", "dst_id"});
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    edges.emplace_back(parse_int(table, r, 0), parse_int(table, r, 1));
  }
  return edges;
}

CaseMatrix read_cases(const fs::path& path, const RouteGraph& graph, Index weeks) {
  const auto table = read_csv(path, {"node_id", "week", "cases"});
  Index inferred = weeks;
  if (weeks == 0) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      inferred = std::max<Index>(inferred, parse_int(table, r, 1));
    }
  }
  if (inferred < 1) throw ValidationError(table.path + ": no weeks present");

  CaseMatrix cases;
  cases.values = Eigen::MatrixXd::Constant(graph.size(), inferred, -1.0);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const NodeId id = parse_int(table, r, 0);
    const auto node = graph.find(id);
    if (!node) {
      throw ValidationError(location(table, r) + ": unknown node " + std::to_string(id));
    }
    const std::int64_t week = parse_int(table, r, 1);
    if (week < 1 || week > inferred) {
      throw ValidationError(location(table, r) + ": week " + std::to_string(week) +
                            " outside 1.." + std::to_string(inferred));
    }
    const double value = parse_double(table, r, 2);
    if (value < 0.0) {
      throw ValidationError(location(table, r) + ": negative case count");
    }
    double& slot = cases.values(*node, week - 1);
    if (slot >= 0.0) {
      throw ValidationError(location(table, r) + ": duplicate entry for node " +
                            std::to_string(id) + " week " + std::to_string(week));
    }
    slot = value;
  }
  for (Index i = 0; i < graph.size(); ++i) {
    for (Index t = 0; t < inferred; ++t) {
      if (cases.values(i, t) < 0.0) {
        throw ValidationError(table.path + ": missing cases for node " +
                              std::to_string(graph.node(i).node_id) + " week " +
                              std::to_string(t + 1));
      }
    }
  }
  return cases;
}

void write_nodes(const fs::path& path, const std::vector<NodeRecord>& nodes) {
  CsvWriter w(path, {"node_id", "name", "lat", "lon", "population"});
  for (const auto& n : nodes) {
    w.row({std::to_string(n.node_id), n.name, format_number(n.lat), format_number(n.lon),
           std::to_string(n.population)});
  }
  w.close();
}

void write_edges(const fs::path& path, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  CsvWriter w(path, {"src_id", "dst_id"});
  for (const auto& [a, b] : edges) w.row({std::to_string(a), std::to_string(b)});
  w.close();
}

void write_cases(const fs::path& path, const RouteGraph& graph, const Eigen::MatrixXd& cases,
                 const std::string& value_column) {
  CsvWriter w(path, {"node_id", "week", value_column});
  for (Index i = 0; i < graph.size(); ++i) {
    for (Index t = 0; t < cases.cols(); ++t) {
      w.row({std::to_string(graph.node(i).node_id), std::to_string(t + 1),
             format_number(cases(i, t))});
    }
  }
  w.close();
}

Dataset ingest(const fs::path& nodes, const fs::path& edges, const fs::path& cases,
               Index weeks) {
  Dataset d{build_route_graph(read_nodes(nodes), read_edges(edges)), {}};
  d.cases = read_cases(cases, d.graph, weeks);
  return d;
}

void write_transition(const fs::path& path, const RouteGraph& graph,
                      const TransitionMatrix& transition) {
  std::vector<Index> order(static_cast<std::size_t>(graph.size()));
  for (Index i = 0; i < graph.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return graph.node(a).node_id < graph.node(b).node_id; });
  CsvWriter w(path, {"src_id", "dst_id", "p"});
  for (Index i : order) {
    for (Index j : order) {
      if (i != j && !graph.adjacent(i, j)) continue;
      w.row({std::to_string(graph.node(i).node_id), std::to_string(graph.node(j).node_id),
             format_number(transition.P(i, j))});
    }
  }
  w.close();
}

TransitionMatrix read_transition(const fs::path& path, const RouteGraph& graph) {
  const auto table = read_csv(path, {"src_id", "dst_id", "p"});
  TransitionMatrix t{Eigen::MatrixXd::Zero(graph.size(), graph.size())};
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const NodeId a = parse_int(table, r, 0);
    const NodeId b = parse_int(table, r, 1);
    const auto i = graph.find(a);
    const auto j = graph.find(b);
    if (!i || !j) {
      throw ValidationError(location(table, r) + ": unknown node " + std::to_string(i ? b : a));
    }
    t.P(*i, *j) = parse_double(table, r, 2);
  }
  validate_transition(t, graph);
  return t;
}

std::string git_blob_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream content;
  content << in.rdbuf();
  const std::string data = content.str();
  const std::string header = "blob " + std::to_string(data.size()) + std::string(1, '\0');

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-1 failed for " + path.string());
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

}  // namespace stgw
