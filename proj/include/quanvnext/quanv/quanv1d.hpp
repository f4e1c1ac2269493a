#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "quanvnext/qsim/filter.hpp"
#include "quanvnext/tensor.hpp"

namespace quanvnext::quanv {

// Geometry and normalization settings of one Quanv1D layer.
struct QuanvConfig {
  int c_in = 1;
  int c_out = 1;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int dilation = 1;
  double temperature = 1.0;
  int depth = 1;

  int patch_size() const noexcept { return c_in * kernel; }
  // ceil(log2(c_in * k)), at least 1
  int n_qubits() const noexcept;
  // floor((c_out + n - 1) / n)
  int n_filters() const noexcept;
  std::size_t state_dim() const noexcept { return std::size_t{1} << n_qubits(); }

  // Throws ArgumentError on non-positive sizes or temperature.
  void validate() const;

  friend bool operator==(const QuanvConfig&, const QuanvConfig&) = default;
};

// floor((L_in + 2p - d(k-1) - 1)/s + 1). Throws ArgumentError if the dilated
// kernel does not fit in the padded input.
std::size_t output_length(std::size_t l_in, int kernel, int stride, int padding, int dilation);

// im2col: row t holds the patch at output position t, channel-major
// (x[c][t*s - p + j*d] at column c*k + j), zero where the index falls in the
// padding. Shape (L_out, c_in * k).
Tensor extract_patches(const Tensor& x, const QuanvConfig& cfg);

// sqrt(softmax(patch / temp)), zero-padded to target_dim.
std::vector<double> normalize_patch(std::span<const double> patch, double temperature,
                                    std::size_t target_dim);

// A bank of n_filters circuits sharing the layer geometry. Filter f, layer l
// lives in row f*depth + l of each (n_filters*depth, n_qubits) angle tensor.
struct QuanvLayer {
  QuanvConfig cfg;
  Tensor theta;
  Tensor lambda;
  Tensor phi;

  static QuanvLayer random(const QuanvConfig& cfg, std::mt19937_64& rng);
  static QuanvLayer identity(const QuanvConfig& cfg);

  qsim::FilterCircuit filter(int f) const;
  std::size_t trainable_count() const noexcept { return theta.size() + lambda.size(); }
  // Throws ArgumentError if the angle tensors do not match cfg.
  void check_shapes() const;
};

// Everything the backward pass needs from the forward pass.
struct QuanvContext {
  std::size_t input_length = 0;
  Tensor amplitudes;  // (L_out, 2^n) normalized patches
  bool valid() const noexcept { return !amplitudes.empty(); }
};

// Feature map (c_out, L_out) with values in [-1, 1]. Fills ctx when non-null.
Tensor quanv1d_forward(const Tensor& x, const QuanvLayer& layer, QuanvContext* ctx = nullptr);

struct QuanvGradients {
  Tensor theta;
  Tensor lambda;
  Tensor input;  // (c_in, L_in)
};

// Throws StateError when ctx holds no forward pass.
QuanvGradients quanv1d_backward(const Tensor& upstream, const QuanvContext& ctx,
                                const QuanvLayer& layer);

}  // namespace quanvnext::quanv
