// Checkpoint layout (text):
//
//   GATCKPT1
//   blocks <count>
//   <name> <rows> <cols>
//   <rows lines, each with <cols> shortest round-trip decimals>
//   ...
//
// Values are written row by row. Block names follow parameter_blocks().

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "stgw/error.hpp"
#include "stgw/gat.hpp"

namespace stgw {

namespace {

constexpr const char* kMagic = "GATCKPT1";

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_checkpoint(const std::string& path, const GatModel& model) {
  GatModel copy = model;
  const auto blocks = parameter_blocks(copy);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out << kMagic << "\n" << "blocks " << blocks.size() << "\n";
  for (const auto& b : blocks) {
    out << b.name << " " << b.rows << " " << b.cols << "\n";
    for (Index r = 0; r < b.rows; ++r) {
      for (Index c = 0; c < b.cols; ++c) {
        if (c) out << ' ';
        out << format_value(b.values[c * b.rows + r]);
      }
      out << "\n";
    }
  }
  if (!out) throw IoError("failed while writing checkpoint " + path);
}

GatModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) throw ValidationError(path + ": not a GATCKPT1 checkpoint");
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "blocks") {
    throw ValidationError(path + ": missing block count");
  }

  std::map<std::size_t, std::pair<Eigen::MatrixXd, Eigen::VectorXd>> layer1;
  std::map<std::size_t, std::pair<Eigen::MatrixXd, Eigen::VectorXd>> layer2;
  Eigen::VectorXd theta;
  const std::regex head_name(R"((layer[12])\.head(\d+)\.([Wa]))");

  for (std::size_t b = 0; b < count; ++b) {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw ValidationError(path + ": malformed block header #" + std::to_string(b));
    }
    Eigen::MatrixXd values(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        std::string token;
        if (!(in >> token)) throw ValidationError(path + ": truncated block " + name);
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
          throw ValidationError(path + ": bad value '" + token + "' in block " + name);
        }
        values(r, c) = v;
      }
    }
    std::smatch match;
    if (name == "theta") {
      theta = values.col(0);
    } else if (std::regex_match(name, match, head_name)) {
      auto& layer = match[1] == "layer1" ? layer1 : layer2;
      auto& slot = layer[std::stoul(match[2])];
      if (match[3] == "W") {
        slot.first = values;
      } else {
        slot.second = values.col(0);
      }
    } else {
      throw ValidationError(path + ": unknown block " + name);
    }
  }

  GatModel model;
  auto assemble = [&](auto& heads, GatLayerParams& layer) {
    std::size_t expected = 0;
    for (auto& [index, tensors] : heads) {
      if (index != expected++) throw ValidationError(path + ": non-contiguous head indices");
      layer.weights.push_back(std::move(tensors.first));
      layer.attention.push_back(std::move(tensors.second));
    }
  };
  assemble(layer1, model.layer1);
  assemble(layer2, model.layer2);
  model.theta = theta;
  check_model(model);
  return model;
}

}  // namespace stgw
