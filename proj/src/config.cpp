#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

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

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError(what + ": cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ValidationError(what + ": expected a boolean, found '" + text + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// Binds every (section, key) to a setter and a getter on a RunConfig.
struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number_field(T RunConfig::*section_ptr, auto member) {
  return {[section_ptr, member](RunConfig& c, const std::string& v, const std::string& what) {
            auto& field = (c.*section_ptr).*member;
            field = parse_number<std::remove_reference_t<decltype(field)>>(v, what);
          },
          [section_ptr, member](const RunConfig& c) {
            const auto value = (c.*section_ptr).*member;
            if constexpr (std::is_floating_point_v<decltype(value)>) {
              return format_number(value);
            } else {
              return std::to_string(value);
            }
          }};
}

template <typename T>
Field bool_field(T RunConfig::*section_ptr, bool T::*member) {
  return {[section_ptr, member](RunConfig& c, const std::string& v, const std::string& what) {
            (c.*section_ptr).*member = parse_bool(v, what);
          },
          [section_ptr, member](const RunConfig& c) { return bool_text((c.*section_ptr).*member); }};
}

template <typename T>
Field string_field(T RunConfig::*section_ptr, std::string T::*member) {
  return {[section_ptr, member](RunConfig& c, const std::string& v, const std::string&) {
            (c.*section_ptr).*member = v;
          },
          [section_ptr, member](const RunConfig& c) { return (c.*section_ptr).*member; }};
}

const std::map<std::string, std::map<std::string, Field>>& schema() {
  using C = RunConfig;
  static const std::map<std::string, std::map<std::string, Field>> fields = {
      {"gat",
       {{"heads", number_field(&C::gat, &C::Gat::heads)},
        {"hidden", number_field(&C::gat, &C::Gat::hidden)},
        {"out", number_field(&C::gat, &C::Gat::out)},
        {"lr", number_field(&C::gat, &C::Gat::lr)},
        {"patience", number_field(&C::gat, &C::Gat::patience)},
        {"max_epochs", number_field(&C::gat, &C::Gat::max_epochs)},
        {"seed", number_field(&C::gat, &C::Gat::seed)},
        {"leaky_slope", number_field(&C::gat, &C::Gat::leaky_slope)}}},
      {"sgwt",
       {{"filters", number_field(&C::sgwt, &C::Sgwt::filters)},
        {"cheb_order", number_field(&C::sgwt, &C::Sgwt::cheb_order)},
        {"scale_lo", number_field(&C::sgwt, &C::Sgwt::scale_lo)},
        {"scale_hi", number_field(&C::sgwt, &C::Sgwt::scale_hi)},
        {"quadrature_points", number_field(&C::sgwt, &C::Sgwt::quadrature_points)}}},
      {"classify",
       {{"theta_hi", number_field(&C::classify, &C::Classify::theta_hi)},
        {"theta_lo", number_field(&C::classify, &C::Classify::theta_lo)}}},
      {"graph", {{"drop_isolated", bool_field(&C::graph, &C::Graph::drop_isolated)}}},
      {"rank",
       {{"first_week", number_field(&C::rank, &C::Rank::first_week)},
        {"last_week", number_field(&C::rank, &C::Rank::last_week)}}},
      {"report",
       {{"mask", bool_field(&C::report, &C::Report::mask)},
        {"top_k", number_field(&C::report, &C::Report::top_k)},
        {"map_week", number_field(&C::report, &C::Report::map_week)}}},
      {"io",
       {{"nodes", string_field(&C::io, &C::Io::nodes)},
        {"edges", string_field(&C::io, &C::Io::edges)},
        {"cases", string_field(&C::io, &C::Io::cases)},
        {"output_dir", string_field(&C::io, &C::Io::output_dir)},
        {"weeks", number_field(&C::io, &C::Io::weeks)}}},
      {"synth",
       {{"nodes", number_field(&C::synth, &SyntheticSpec::nodes)},
        {"weeks", number_field(&C::synth, &SyntheticSpec::weeks)},
        {"neighbors", number_field(&C::synth, &SyntheticSpec::neighbors)},
        {"rho", number_field(&C::synth, &SyntheticSpec::rho)},
        {"seed", number_field(&C::synth, &SyntheticSpec::seed)},
        {"injections",
         {[](C& c, const std::string& v, const std::string&) {
            c.synth.injections = parse_injections(v);
          },
          [](const C& c) { return format_injections(c.synth.injections); }}}}},
  };
  return fields;
}

void assign(RunConfig& config, const std::string& section, const std::string& key,
            const std::string& value, const std::string& where) {
  const auto& fields = schema();
  const auto s = fields.find(section);
  if (s == fields.end()) throw ValidationError(where + ": unknown section [" + section + "]");
  const auto f = s->second.find(key);
  if (f == s->second.end()) {
    throw ValidationError(where + ": unknown key '" + key + "' in [" + section + "]");
  }
  f->second.set(config, value, where + ": " + section + "." + key);
}

RunConfig parse_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(origin + ": top level must be an object");
  RunConfig config;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) {
      throw ValidationError(origin + ": section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : body.items()) {
      std::string text_value;
      if (value.is_string()) {
        text_value = value.get<std::string>();
      } else if (value.is_boolean()) {
        text_value = bool_text(value.get<bool>());
      } else if (value.is_number_integer()) {
        text_value = std::to_string(value.get<std::int64_t>());
      } else if (value.is_number()) {
        text_value = format_number(value.get<double>());
      } else {
        throw ValidationError(origin + ": " + section + "." + key + " has an unsupported type");
      }
      assign(config, section, key, text_value, origin);
    }
  }
  return config;
}

}  // namespace

std::vector<SyntheticSpec::Injection> parse_injections(const std::string& text) {
  std::vector<SyntheticSpec::Injection> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto c1 = item.find(':');
    const auto c2 = item.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    const auto dash = item.find('-', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || dash == std::string::npos ||
        dash > c2) {
      throw ValidationError("injection '" + item + "' must look like node:first-last:multiplier");
    }
    SyntheticSpec::Injection inj;
    const std::string what = "injection '" + item + "'";
    inj.node = parse_number<NodeId>(trim(item.substr(0, c1)), what);
    inj.first_week = parse_number<Index>(trim(item.substr(c1 + 1, dash - c1 - 1)), what);
    inj.last_week = parse_number<Index>(trim(item.substr(dash + 1, c2 - dash - 1)), what);
    inj.multiplier = parse_number<double>(trim(item.substr(c2 + 1)), what);
    if (inj.first_week < 1 || inj.last_week < inj.first_week) {
      throw ValidationError(what + ": bad week range");
    }
    if (!(inj.multiplier > 0.0)) throw ValidationError(what + ": multiplier must be positive");
    out.push_back(inj);
  }
  return out;
}

std::string format_injections(const std::vector<SyntheticSpec::Injection>& injections) {
  std::string out;
  for (const auto& inj : injections) {
    if (!out.empty()) out += ';';
    out += std::to_string(inj.node) + ":" + std::to_string(inj.first_week) + "-" +
           std::to_string(inj.last_week) + ":" + format_number(inj.multiplier);
  }
  return out;
}

std::map<std::string, std::map<std::string, std::string>> RunConfig::resolved() const {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& [section, fields] : schema()) {
    for (const auto& [key, field] : fields) out[section][key] = field.get(*this);
  }
  return out;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
  };
  positive(static_cast<double>(gat.heads), "gat.heads");
  positive(static_cast<double>(gat.hidden), "gat.hidden");
  positive(static_cast<double>(gat.out), "gat.out");
  positive(gat.lr, "gat.lr");
  positive(gat.patience, "gat.patience");
  positive(gat.max_epochs, "gat.max_epochs");
  positive(gat.leaky_slope, "gat.leaky_slope");
  positive(static_cast<double>(sgwt.filters), "sgwt.filters");
  positive(static_cast<double>(sgwt.cheb_order), "sgwt.cheb_order");
  positive(sgwt.scale_lo, "sgwt.scale_lo");
  positive(sgwt.scale_hi, "sgwt.scale_hi");
  positive(static_cast<double>(sgwt.quadrature_points), "sgwt.quadrature_points");
  if (sgwt.scale_hi <= sgwt.scale_lo) throw ValidationError("sgwt.scale_hi must exceed scale_lo");
  if (sgwt.filters != 8) {
    throw ValidationError("sgwt.filters must be 8 (torque weights are defined for 8 filters)");
  }
  positive(classify.theta_hi, "classify.theta_hi");
  positive(classify.theta_lo, "classify.theta_lo");
  if (classify.theta_lo >= classify.theta_hi) {
    throw ValidationError("classify.theta_lo must be below theta_hi");
  }
  positive(static_cast<double>(rank.first_week), "rank.first_week");
  if (rank.last_week < 0 || (rank.last_week != 0 && rank.last_week < rank.first_week)) {
    throw ValidationError("rank window is empty");
  }
  positive(static_cast<double>(report.top_k), "report.top_k");
  if (report.map_week < 0) throw ValidationError("report.map_week must be non-negative");
  if (io.weeks < 0) throw ValidationError("io.weeks must be non-negative");
  positive(static_cast<double>(synth.nodes), "synth.nodes");
  positive(static_cast<double>(synth.weeks), "synth.weeks");
  positive(static_cast<double>(synth.neighbors), "synth.neighbors");
  if (!(synth.rho >= 0.0 && synth.rho <= 1.0)) throw ValidationError("synth.rho must lie in [0, 1]");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  const auto first = text.find_first_not_of(" \t\r\n");
  RunConfig config;
  if (first != std::string::npos && text[first] == '{') {
    config = parse_json(text, origin);
  } else {
    std::stringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string where = origin + ":" + std::to_string(line_no);
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ValidationError(where + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!schema().count(section)) {
          throw ValidationError(where + ": unknown section [" + section + "]");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
      if (section.empty()) throw ValidationError(where + ": key outside any section");
      assign(config, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  RunConfig config = parse_config_text(text.str(), path.string());
  const fs::path base = path.parent_path();
  for (std::string* p : {&config.io.nodes, &config.io.edges, &config.io.cases,
                         &config.io.output_dir}) {
    if (!p->empty() && fs::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return config;
}

void Manifest::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

void Manifest::merge(const std::map<std::string, std::map<std::string, std::string>>& values) {
  for (const auto& [section, entries] : values) {
    for (const auto& [key, value] : entries) sections_[section][key] = value;
  }
}

std::string Manifest::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return "";
  const auto k = s->second.find(key);
  return k == s->second.end() ? "" : k->second;
}

void Manifest::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ValidationError(path.string() + ": malformed manifest line");
    sections_[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
}

void Manifest::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  bool first = true;
  for (const auto& [section, entries] : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << section << "]\n";
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace stgw
