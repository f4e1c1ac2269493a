#pragma once

#include <cstddef>
#include <vector>

#include "quanvnext/tensor.hpp"

namespace quanvnext::model {

inline constexpr double kLayerNormEpsilon = 1e-5;

// Channel permutation of ShuffleNet: view channels as (g, C/g), transpose to
// (C/g, g), flatten. Output channel j*g + i is input channel i*(C/g) + j.
// Throws ArgumentError when C is not divisible by g.
Tensor channel_shuffle(const Tensor& x, int groups);
// source[out] = input channel feeding output channel `out`
std::vector<std::size_t> channel_shuffle_permutation(std::size_t channels, int groups);

// Normalizes every time position across the channel axis, then applies the
// per-channel affine (gamma, beta given as 1 x C).
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta);

// ln(1 + e^x) without overflow
double softplus(double x) noexcept;
// x * tanh(softplus(x))
double mish(double x) noexcept;
double mish_derivative(double x) noexcept;
Tensor mish(const Tensor& x);

// (C, L) -> (C, 1) per-channel mean
Tensor global_avg_pool(const Tensor& x);

Tensor concat_channels(const Tensor& top, const Tensor& bottom);
Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t count);

}  // namespace quanvnext::model
