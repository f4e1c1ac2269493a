#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quanvnext/autodiff/tape.hpp"
#include "quanvnext/quanv/quanv1d.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::model {

// One Cross Residual block. Dataflow (C channels in and out):
//   s = shuffle(x, g1)
//   q = mish(layer_norm(quanv(s -> C/2)))
//   a = shuffle(concat(q, s[:C/2]), g2)
//   out = a + x
// use_shuffle=false turns both shuffles into identities, use_aggregation=false
// replaces the concat with a full-width quanv (C maps), use_skip=false drops
// the final addition.
struct CrossResidualConfig {
  int channels = 8;
  int kernel = 7;
  int padding = 3;
  double temperature = 1.0;
  int depth = 1;
  int shuffle_groups_1 = 4;
  int shuffle_groups_2 = 8;
  bool use_skip = true;
  bool use_aggregation = true;
  bool use_shuffle = true;

  // Throws ConfigError.
  void validate() const;
  int quanv_channels() const noexcept { return use_aggregation ? channels / 2 : channels; }
  quanv::QuanvConfig quanv_config() const;
};

struct BlockSpec {
  int kernel = 7;
  int padding = 3;
  double temperature = 1.0;
  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct ModelConfig {
  std::string preset = "custom";
  int input_channels = 4;
  int input_length = 500;
  int embed_width = 8;
  int embed_kernel = 8;
  int embed_stride = 8;
  double embed_temperature = 1.0;
  std::vector<BlockSpec> blocks;
  int proj_kernel = 8;
  int proj_stride = 8;
  double proj_temperature = 1.0;
  int num_classes = 2;
  int depth = 1;
  bool use_skip = true;
  bool use_aggregation = true;
  bool use_shuffle = true;

  // Table-1 presets: 19 x 2048 @ width 32, and 128 x 2000 @ width 8.
  static ModelConfig dataset1();
  static ModelConfig dataset2();
  // Dataset-2 block schedule on a small custom input.
  static ModelConfig micro(int input_channels, int input_length, int width);
  // "dataset-1" | "dataset-2"; throws ConfigError otherwise.
  static ModelConfig preset_named(std::string_view name);

  // Throws ConfigError on divisibility or length-preservation violations.
  void validate() const;

  quanv::QuanvConfig embedding_config() const;
  std::vector<CrossResidualConfig> block_configs() const;
  quanv::QuanvConfig projection_config() const;
  std::size_t embedding_length() const;
  std::size_t projection_length() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct CrossResidualBlock {
  CrossResidualConfig cfg;
  quanv::QuanvLayer quanv;
  Tensor gamma;  // (1, quanv channels)
  Tensor beta;
};

// Per-channel z-score statistics of the training data, stored with the model
// so inference applies the same normalization.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  bool empty() const noexcept { return mean.empty(); }
  friend bool operator==(const NormStats&, const NormStats&) = default;
};

class Model {
 public:
  ModelConfig config;
  quanv::QuanvLayer embedding;
  std::vector<CrossResidualBlock> blocks;
  quanv::QuanvLayer projection;
  NormStats normalization;

  // Trainable tensors in a fixed order: embedding θ, λ; per block θ, λ, γ, β;
  // projection θ, λ.
  std::vector<const Tensor*> trainable() const;
  std::vector<Tensor*> trainable();
  std::vector<std::string> trainable_names() const;

  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
};

Model build_model(const ModelConfig& config, std::uint64_t seed);
Model build_model(std::string_view preset, std::uint64_t seed);

// Closed-form count: Σ_layers n_filters * 2 * n_qubits * depth + 2 * C per layer norm.
std::size_t count_parameters(const ModelConfig& config);

// Tape handles of one forward pass. `parameters` follows Model::trainable().
struct ForwardTrace {
  autodiff::Var input;
  autodiff::Var embedding;
  std::vector<autodiff::Var> blocks;
  autodiff::Var projection;
  autodiff::Var logits;  // (num_classes, 1)
  std::vector<autodiff::Var> parameters;
};

// Records the full network. With trainable=true, every trainable tensor becomes
// a tape parameter; otherwise they are constants. input_requires_grad makes the
// input a differentiable leaf too.
ForwardTrace record_forward(autodiff::Tape& tape, const Model& model, const Tensor& x,
                            bool trainable, bool input_requires_grad = false);

// Records one block on an existing tape.
autodiff::Var record_block(autodiff::Tape& tape, autodiff::Var x, const CrossResidualBlock& block,
                           autodiff::Var theta, autodiff::Var lambda, autodiff::Var gamma,
                           autodiff::Var beta);

Tensor cross_residual_forward(const Tensor& x, const CrossResidualBlock& block);

// Logits (num_classes, 1). Throws ArgumentError on input shape mismatch.
Tensor quanvnext_forward(const Tensor& x, const Model& model);

}  // namespace quanvnext::model
