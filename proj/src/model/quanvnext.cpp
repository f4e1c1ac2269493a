#include "quanvnext/model/quanvnext.hpp"

#include <random>
#include <string>

#include <json.hpp>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/model/layers.hpp"

namespace quanvnext::model {

using autodiff::Tape;
using autodiff::Var;

void CrossResidualConfig::validate() const {
  if (channels < 1) throw ConfigError("cross residual: channels must be positive");
  if (kernel < 1 || padding < 0) throw ConfigError("cross residual: invalid kernel/padding");
  if (2 * padding != kernel - 1) {
    throw ConfigError("cross residual: kernel " + std::to_string(kernel) + " with padding " +
                      std::to_string(padding) + " does not preserve sequence length");
  }
  if (!(temperature > 0.0)) throw ConfigError("cross residual: temperature must be positive");
  if (depth < 1) throw ConfigError("cross residual: circuit depth must be positive");
  if (use_shuffle) {
    for (int g : {shuffle_groups_1, shuffle_groups_2}) {
      if (g < 1 || channels % g != 0) {
        throw ConfigError("cross residual: " + std::to_string(channels) +
                          " channels not divisible by shuffle groups " + std::to_string(g));
      }
    }
  }
  if (use_aggregation && channels % 2 != 0) {
    throw ConfigError("cross residual: aggregation needs an even channel count");
  }
}

quanv::QuanvConfig CrossResidualConfig::quanv_config() const {
  return {.c_in = channels,
          .c_out = quanv_channels(),
          .kernel = kernel,
          .stride = 1,
          .padding = padding,
          .dilation = 1,
          .temperature = temperature,
          .depth = depth};
}

ModelConfig ModelConfig::dataset1() {
  ModelConfig c;
  c.preset = "dataset-1";
  c.input_channels = 19;
  c.input_length = 2048;
  c.embed_width = 32;
  c.blocks = {{7, 3, 1.5}, {17, 8, 1.2}, {11, 5, 0.8}, {7, 3, 0.5}};
  return c;
}

ModelConfig ModelConfig::dataset2() {
  ModelConfig c;
  c.preset = "dataset-2";
  c.input_channels = 128;
  c.input_length = 2000;
  c.embed_width = 8;
  c.blocks = {{7, 3, 1.5}, {15, 7, 1.2}, {9, 4, 0.8}, {7, 3, 0.5}};
  return c;
}

ModelConfig ModelConfig::micro(int input_channels, int input_length, int width) {
  ModelConfig c = dataset2();
  c.preset = "custom";
  c.input_channels = input_channels;
  c.input_length = input_length;
  c.embed_width = width;
  return c;
}

ModelConfig ModelConfig::preset_named(std::string_view name) {
  if (name == "dataset-1") return dataset1();
  if (name == "dataset-2") return dataset2();
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

quanv::QuanvConfig ModelConfig::embedding_config() const {
  return {.c_in = input_channels,
          .c_out = embed_width,
          .kernel = embed_kernel,
          .stride = embed_stride,
          .padding = 0,
          .dilation = 1,
          .temperature = embed_temperature,
          .depth = depth};
}

std::vector<CrossResidualConfig> ModelConfig::block_configs() const {
  std::vector<CrossResidualConfig> out;
  for (const auto& b : blocks) {
    CrossResidualConfig c;
    c.channels = embed_width;
    c.kernel = b.kernel;
    c.padding = b.padding;
    c.temperature = b.temperature;
    c.depth = depth;
    c.use_skip = use_skip;
    c.use_aggregation = use_aggregation;
    c.use_shuffle = use_shuffle;
    out.push_back(c);
  }
  return out;
}

quanv::QuanvConfig ModelConfig::projection_config() const {
  return {.c_in = embed_width,
          .c_out = num_classes,
          .kernel = proj_kernel,
          .stride = proj_stride,
          .padding = 0,
          .dilation = 1,
          .temperature = proj_temperature,
          .depth = depth};
}

std::size_t ModelConfig::embedding_length() const {
  return quanv::output_length(static_cast<std::size_t>(input_length), embed_kernel, embed_stride,
                              0, 1);
}

std::size_t ModelConfig::projection_length() const {
  return quanv::output_length(embedding_length(), proj_kernel, proj_stride, 0, 1);
}

void ModelConfig::validate() const {
  if (input_channels < 1 || input_length < 1 || embed_width < 1 || num_classes < 2 || depth < 1) {
    throw ConfigError("model config: sizes must be positive and num_classes >= 2");
  }
  try {
    embedding_config().validate();
    projection_config().validate();
    (void)projection_length();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  for (const auto& b : block_configs()) b.validate();
}

std::string ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["input_channels"] = input_channels;
  j["input_length"] = input_length;
  j["embed_width"] = embed_width;
  j["embed_kernel"] = embed_kernel;
  j["embed_stride"] = embed_stride;
  j["embed_temperature"] = embed_temperature;
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : blocks) {
    j["blocks"].push_back({{"kernel", b.kernel}, {"padding", b.padding}, {"temperature", b.temperature}});
  }
  j["proj_kernel"] = proj_kernel;
  j["proj_stride"] = proj_stride;
  j["proj_temperature"] = proj_temperature;
  j["num_classes"] = num_classes;
  j["depth"] = depth;
  j["use_skip"] = use_skip;
  j["use_aggregation"] = use_aggregation;
  j["use_shuffle"] = use_shuffle;
  return j.dump();
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelConfig c;
    c.preset = j.at("preset").get<std::string>();
    c.input_channels = j.at("input_channels").get<int>();
    c.input_length = j.at("input_length").get<int>();
    c.embed_width = j.at("embed_width").get<int>();
    c.embed_kernel = j.at("embed_kernel").get<int>();
    c.embed_stride = j.at("embed_stride").get<int>();
    c.embed_temperature = j.at("embed_temperature").get<double>();
    c.blocks.clear();
    for (const auto& b : j.at("blocks")) {
      c.blocks.push_back({b.at("kernel").get<int>(), b.at("padding").get<int>(),
                          b.at("temperature").get<double>()});
    }
    c.proj_kernel = j.at("proj_kernel").get<int>();
    c.proj_stride = j.at("proj_stride").get<int>();
    c.proj_temperature = j.at("proj_temperature").get<double>();
    c.num_classes = j.at("num_classes").get<int>();
    c.depth = j.at("depth").get<int>();
    c.use_skip = j.at("use_skip").get<bool>();
    c.use_aggregation = j.at("use_aggregation").get<bool>();
    c.use_shuffle = j.at("use_shuffle").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
}

std::vector<const Tensor*> Model::trainable() const {
  std::vector<const Tensor*> out{&embedding.theta, &embedding.lambda};
  for (const auto& b : blocks) {
    out.insert(out.end(), {&b.quanv.theta, &b.quanv.lambda, &b.gamma, &b.beta});
  }
  out.insert(out.end(), {&projection.theta, &projection.lambda});
  return out;
}

std::vector<Tensor*> Model::trainable() {
  std::vector<Tensor*> out{&embedding.theta, &embedding.lambda};
  for (auto& b : blocks) out.insert(out.end(), {&b.quanv.theta, &b.quanv.lambda, &b.gamma, &b.beta});
  out.insert(out.end(), {&projection.theta, &projection.lambda});
  return out;
}

std::vector<std::string> Model::trainable_names() const {
  std::vector<std::string> out{"embedding.theta", "embedding.lambda"};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string p = "block" + std::to_string(i + 1) + ".";
    out.insert(out.end(), {p + "theta", p + "lambda", p + "gamma", p + "beta"});
  }
  out.insert(out.end(), {"projection.theta", "projection.lambda"});
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : trainable()) n += t->size();
  return n;
}

std::vector<double> Model::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const Tensor* t : trainable()) out.insert(out.end(), t->values().begin(), t->values().end());
  return out;
}

void Model::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw ArgumentError("set_flat_parameters: expected " + std::to_string(parameter_count()) +
                        " values, got " + std::to_string(values.size()));
  }
  std::size_t offset = 0;
  for (Tensor* t : trainable()) {
    auto dst = t->flat();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  }
}

Model build_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Model m;
  m.config = config;
  m.embedding = quanv::QuanvLayer::random(config.embedding_config(), rng);
  for (const auto& bc : config.block_configs()) {
    const auto qc = bc.quanv_config();
    CrossResidualBlock b{bc, quanv::QuanvLayer::random(qc, rng),
                         Tensor(1, static_cast<std::size_t>(qc.c_out), 1.0),
                         Tensor(1, static_cast<std::size_t>(qc.c_out), 0.0)};
    m.blocks.push_back(std::move(b));
  }
  m.projection = quanv::QuanvLayer::random(config.projection_config(), rng);
  return m;
}

Model build_model(std::string_view preset, std::uint64_t seed) {
  return build_model(ModelConfig::preset_named(preset), seed);
}

std::size_t count_parameters(const ModelConfig& config) {
  config.validate();
  auto quanv_count = [](const quanv::QuanvConfig& q) {
    return static_cast<std::size_t>(q.n_filters()) * 2U * static_cast<std::size_t>(q.n_qubits()) *
           static_cast<std::size_t>(q.depth);
  };
  std::size_t n = quanv_count(config.embedding_config()) + quanv_count(config.projection_config());
  for (const auto& b : config.block_configs()) {
    n += quanv_count(b.quanv_config()) + 2U * static_cast<std::size_t>(b.quanv_channels());
  }
  return n;
}

Var record_block(Tape& tape, Var x, const CrossResidualBlock& block, Var theta, Var lambda,
                 Var gamma, Var beta) {
  const CrossResidualConfig& cfg = block.cfg;
  const auto channels = static_cast<std::size_t>(cfg.channels);
  if (tape.value(x).rows() != channels) {
    throw ArgumentError("cross residual block expects " + std::to_string(cfg.channels) +
                        " channels, got " + std::to_string(tape.value(x).rows()));
  }
  const Var s = cfg.use_shuffle ? autodiff::channel_shuffle(tape, x, cfg.shuffle_groups_1) : x;
  Var q = autodiff::quanv1d(tape, s, theta, lambda, block.quanv);
  q = autodiff::mish(tape, autodiff::layer_norm(tape, q, gamma, beta));
  Var a = q;
  if (cfg.use_aggregation) {
    a = autodiff::concat_channels(tape, q, autodiff::slice_channels(tape, s, 0, channels / 2));
  }
  if (cfg.use_shuffle) a = autodiff::channel_shuffle(tape, a, cfg.shuffle_groups_2);
  return cfg.use_skip ? autodiff::add(tape, a, x) : a;
}

ForwardTrace record_forward(Tape& tape, const Model& model, const Tensor& x, bool trainable,
                            bool input_requires_grad) {
  const ModelConfig& cfg = model.config;
  if (x.rows() != static_cast<std::size_t>(cfg.input_channels) ||
      x.cols() != static_cast<std::size_t>(cfg.input_length)) {
    throw ArgumentError("model expects input (" + std::to_string(cfg.input_channels) + ", " +
                        std::to_string(cfg.input_length) + "), got " + x.shape_string());
  }
  ForwardTrace tr;
  for (const Tensor* t : model.trainable()) {
    tr.parameters.push_back(trainable ? tape.parameter(*t) : tape.constant(*t));
  }
  tr.input = input_requires_grad ? tape.parameter(x) : tape.constant(x);
  std::size_t p = 0;
  tr.embedding = autodiff::quanv1d(tape, tr.input, tr.parameters[p], tr.parameters[p + 1],
                                   model.embedding);
  p += 2;
  Var h = tr.embedding;
  for (const auto& block : model.blocks) {
    h = record_block(tape, h, block, tr.parameters[p], tr.parameters[p + 1], tr.parameters[p + 2],
                     tr.parameters[p + 3]);
    p += 4;
    tr.blocks.push_back(h);
  }
  tr.projection = autodiff::quanv1d(tape, h, tr.parameters[p], tr.parameters[p + 1],
                                    model.projection);
  tr.logits = autodiff::global_avg_pool(tape, tr.projection);
  return tr;
}

Tensor cross_residual_forward(const Tensor& x, const CrossResidualBlock& block) {
  block.cfg.validate();
  Tape tape;
  const Var out = record_block(tape, tape.constant(x), block, tape.constant(block.quanv.theta),
                               tape.constant(block.quanv.lambda), tape.constant(block.gamma),
                               tape.constant(block.beta));
  return tape.value(out);
}

Tensor quanvnext_forward(const Tensor& x, const Model& model) {
  Tape tape;
  return tape.value(record_forward(tape, model, x, false).logits);
}

}  // namespace quanvnext::model
