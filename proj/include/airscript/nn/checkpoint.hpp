#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "airscript/difviz.hpp"
#include "airscript/nn/adam.hpp"
#include "airscript/pipeline.hpp"
#include "airscript/tensor.hpp"

namespace airscript::nn {

enum class ModelKind { Gru1, Gru2, Cnn };

inline std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gru1: return "gru1";
    case ModelKind::Gru2: return "gru2";
    case ModelKind::Cnn: return "cnn";
  }
  throw std::logic_error("to_string: bad ModelKind");
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "gru1") return ModelKind::Gru1;
  if (s == "gru2") return ModelKind::Gru2;
  if (s == "cnn") return ModelKind::Cnn;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

// Self-contained trained model: a text manifest followed by the named
// parameter tensors as little-endian 64-bit floats in manifest order.
// Everything inference needs (preprocessing config, scaler statistics,
// architecture) travels inside the file.
struct Checkpoint {
  std::string kind;  // "gru1" | "gru2" | "cnn"
  std::uint64_t seed = 0;
  std::uint64_t train_fingerprint = 0;
  AdamConfig hyper;
  std::size_t hidden_size = 32;     // gru kinds
  std::size_t input_dim = 0;        // gru kinds: per-step feature width
  DifVizConfig difviz;              // gru1 + cnn
  std::size_t raster_size = 64;     // cnn
  std::size_t conv1_filters = 8;    // cnn
  std::size_t conv2_filters = 16;   // cnn
  ScalerStats scaler;               // gru2
  std::vector<double> loss_history;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

namespace detail {

constexpr const char* kCheckpointMagic = "airscript-ckpt/1";

inline std::string rounding_name(RoundingMode m) {
  return m == RoundingMode::PerStepRound ? "per-step" : "carry";
}

inline RoundingMode rounding_from_name(const std::string& s) {
  if (s == "per-step") return RoundingMode::PerStepRound;
  if (s == "carry") return RoundingMode::RemainderCarry;
  throw std::invalid_argument("unknown rounding mode '" + s + "'");
}

inline nlohmann::ordered_json difviz_to_json(const DifVizConfig& c) {
  nlohmann::ordered_json j;
  j["sensitivity"] = c.sensitivity;
  j["pixel_density"] = c.pixel_density;
  j["frame_duration"] = c.frame_duration;
  j["rounding"] = rounding_name(c.rounding);
  return j;
}

inline DifVizConfig difviz_from_json(const nlohmann::json& j) {
  DifVizConfig c;
  c.sensitivity = j.at("sensitivity").get<double>();
  c.pixel_density = j.at("pixel_density").get<double>();
  c.frame_duration = j.at("frame_duration").get<double>();
  c.rounding = rounding_from_name(j.at("rounding").get<std::string>());
  return c;
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::ordered_json manifest;
  manifest["format"] = detail::kCheckpointMagic;
  manifest["kind"] = ckpt.kind;
  manifest["seed"] = ckpt.seed;
  manifest["train_fingerprint"] = ckpt.train_fingerprint;
  {
    nlohmann::ordered_json h;
    h["learning_rate"] = ckpt.hyper.learning_rate;
    h["beta1"] = ckpt.hyper.beta1;
    h["beta2"] = ckpt.hyper.beta2;
    h["epsilon"] = ckpt.hyper.epsilon;
    h["decay"] = ckpt.hyper.decay;
    h["epochs"] = ckpt.hyper.epochs;
    h["batch_size"] = ckpt.hyper.batch_size;
    manifest["hyper"] = std::move(h);
  }
  if (ckpt.kind == "gru1" || ckpt.kind == "gru2") {
    manifest["hidden_size"] = ckpt.hidden_size;
    manifest["input_dim"] = ckpt.input_dim;
  }
  if (ckpt.kind == "gru1" || ckpt.kind == "cnn") {
    manifest["difviz"] = detail::difviz_to_json(ckpt.difviz);
  }
  if (ckpt.kind == "cnn") {
    manifest["raster_size"] = ckpt.raster_size;
    manifest["conv1_filters"] = ckpt.conv1_filters;
    manifest["conv2_filters"] = ckpt.conv2_filters;
  }
  if (ckpt.kind == "gru2") {
    nlohmann::ordered_json s;
    s["max_abs"] = ckpt.scaler.max_abs;
    s["t_max"] = ckpt.scaler.t_max;
    manifest["scaler"] = std::move(s);
  }
  manifest["loss_history"] = ckpt.loss_history;
  auto& tensors = manifest["tensors"] = nlohmann::ordered_json::array();
  std::size_t payload_doubles = 0;
  for (const auto& [name, tensor] : ckpt.tensors) {
    nlohmann::ordered_json t;
    t["name"] = name;
    t["shape"] = tensor.shape();
    tensors.push_back(std::move(t));
    payload_doubles += tensor.size();
  }

  std::vector<std::uint8_t> payload;
  payload.reserve(payload_doubles * 8);
  for (const auto& [name, tensor] : ckpt.tensors) {
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      std::uint64_t bits;
      const double v = tensor[i];
      std::memcpy(&bits, &v, sizeof(bits));
      for (int b = 0; b < 8; ++b) payload.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open '" + path + "'");
  out << detail::kCheckpointMagic << '\n';
  out << manifest.dump() << '\n';
  out << "payload " << payload.size() << '\n';
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
  std::string magic, manifest_line, payload_line;
  if (!std::getline(in, magic) || magic != detail::kCheckpointMagic)
    throw std::runtime_error("load_checkpoint: '" + path + "' is not an airscript-ckpt/1 file");
  if (!std::getline(in, manifest_line))
    throw std::runtime_error("load_checkpoint: missing manifest");
  if (!std::getline(in, payload_line) || payload_line.rfind("payload ", 0) != 0)
    throw std::runtime_error("load_checkpoint: missing payload header");

  Checkpoint ckpt;
  const auto manifest = nlohmann::json::parse(manifest_line);
  if (manifest.at("format").get<std::string>() != detail::kCheckpointMagic)
    throw std::runtime_error("load_checkpoint: unknown format version");
  ckpt.kind = manifest.at("kind").get<std::string>();
  ckpt.seed = manifest.at("seed").get<std::uint64_t>();
  ckpt.train_fingerprint = manifest.at("train_fingerprint").get<std::uint64_t>();
  const auto& h = manifest.at("hyper");
  ckpt.hyper.learning_rate = h.at("learning_rate").get<double>();
  ckpt.hyper.beta1 = h.at("beta1").get<double>();
  ckpt.hyper.beta2 = h.at("beta2").get<double>();
  ckpt.hyper.epsilon = h.at("epsilon").get<double>();
  ckpt.hyper.decay = h.at("decay").get<double>();
  ckpt.hyper.epochs = h.at("epochs").get<std::size_t>();
  ckpt.hyper.batch_size = h.at("batch_size").get<std::size_t>();
  if (manifest.contains("hidden_size")) ckpt.hidden_size = manifest["hidden_size"].get<std::size_t>();
  if (manifest.contains("input_dim")) ckpt.input_dim = manifest["input_dim"].get<std::size_t>();
  if (manifest.contains("difviz")) ckpt.difviz = detail::difviz_from_json(manifest["difviz"]);
  if (manifest.contains("raster_size")) ckpt.raster_size = manifest["raster_size"].get<std::size_t>();
  if (manifest.contains("conv1_filters")) ckpt.conv1_filters = manifest["conv1_filters"].get<std::size_t>();
  if (manifest.contains("conv2_filters")) ckpt.conv2_filters = manifest["conv2_filters"].get<std::size_t>();
  if (manifest.contains("scaler")) {
    const auto& s = manifest["scaler"];
    const auto max_abs = s.at("max_abs").get<std::vector<double>>();
    if (max_abs.size() != kImuChannels)
      throw std::runtime_error("load_checkpoint: scaler arity mismatch");
    std::copy(max_abs.begin(), max_abs.end(), ckpt.scaler.max_abs.begin());
    ckpt.scaler.t_max = s.at("t_max").get<std::size_t>();
  }
  ckpt.loss_history = manifest.at("loss_history").get<std::vector<double>>();

  std::size_t payload_bytes = 0;
  {
    std::istringstream ss(payload_line.substr(8));
    ss >> payload_bytes;
  }
  std::vector<std::uint8_t> payload(payload_bytes);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload_bytes));
  if (static_cast<std::size_t>(in.gcount()) != payload_bytes)
    throw std::runtime_error("load_checkpoint: truncated payload");

  std::size_t offset = 0;
  for (const auto& t : manifest.at("tensors")) {
    const auto name = t.at("name").get<std::string>();
    const auto shape = t.at("shape").get<std::vector<std::size_t>>();
    Tensor tensor(shape);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      if (offset + 8 > payload.size())
        throw std::runtime_error("load_checkpoint: payload shorter than manifest declares");
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(payload[offset + b]) << (8 * b);
      double v;
      std::memcpy(&v, &bits, sizeof(v));
      tensor[i] = v;
      offset += 8;
    }
    ckpt.tensors.emplace_back(name, std::move(tensor));
  }
  if (offset != payload.size())
    throw std::runtime_error("load_checkpoint: payload longer than manifest declares");
  return ckpt;
}

}  // namespace airscript::nn
