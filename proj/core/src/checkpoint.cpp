#include "tpinn/checkpoint.h"

#include <fstream>

#include <json.hpp>

#include "tpinn/config.h"
#include "tpinn/errors.h"

namespace tpinn {

using nlohmann::json;

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  check_shape(ckpt.spec, ckpt.params);
  const NetSpec& s = ckpt.spec;
  json j;
  j["format"] = "tpinn-checkpoint";
  j["version"] = kCheckpointVersion;
  j["label"] = ckpt.label;
  j["spec"] = {{"hidden_layers", s.hidden_layers},
               {"width", s.width},
               {"activation", to_string(s.activation)},
               {"output_mode", to_string(s.output_mode)},
               {"scaler",
                {{"x_min", s.scaler.x_min},
                 {"x_max", s.scaler.x_max},
                 {"t_min", s.scaler.t_min},
                 {"t_max", s.scaler.t_max}}}};
  j["layers"] = json::array();
  for (const DenseLayer& l : ckpt.params.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weight.size()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    j["layers"].push_back({{"rows", l.weight.rows()},
                           {"cols", l.weight.cols()},
                           {"weight", w},
                           {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  return j.dump() + "\n";
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  Checkpoint ckpt;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "tpinn-checkpoint") {
      throw IoError("not a tpinn checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw IoError("unsupported checkpoint version " + std::to_string(version));
    }
    ckpt.label = j.value("label", std::string());
    const json& s = j.at("spec");
    ckpt.spec.hidden_layers = s.at("hidden_layers").get<int>();
    ckpt.spec.width = s.at("width").get<int>();
    ckpt.spec.activation = parse_activation(s.at("activation").get<std::string>());
    ckpt.spec.output_mode = parse_output_mode(s.at("output_mode").get<std::string>());
    const json& sc = s.at("scaler");
    ckpt.spec.scaler = {sc.at("x_min").get<double>(), sc.at("x_max").get<double>(),
                        sc.at("t_min").get<double>(), sc.at("t_max").get<double>()};
    ckpt.spec.validate();
    for (const json& l : j.at("layers")) {
      const auto rows = l.at("rows").get<Eigen::Index>();
      const auto cols = l.at("cols").get<Eigen::Index>();
      const auto w = l.at("weight").get<std::vector<double>>();
      const auto b = l.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
        throw IoError("checkpoint layer has inconsistent sizes");
      }
      DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
        layer.bias(r) = b[static_cast<std::size_t>(r)];
      }
      ckpt.params.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    check_shape(ckpt.spec, ckpt.params);
  } catch (const Error& e) {
    throw IoError(std::string("checkpoint does not match its spec: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string text = serialize_checkpoint(ckpt);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write checkpoint " + path.string());
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("checkpoint not found: " + path.string());
  return deserialize_checkpoint(read_text_file(path));
}

}  // namespace tpinn
