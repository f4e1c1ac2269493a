#include "quanvnext/model/layers.hpp"

#include <cmath>
#include <string>

#include "quanvnext/error.hpp"

namespace quanvnext::model {

std::vector<std::size_t> channel_shuffle_permutation(std::size_t channels, int groups) {
  if (groups < 1 || channels % static_cast<std::size_t>(groups) != 0) {
    throw ArgumentError("channel_shuffle: " + std::to_string(channels) +
                        " channels not divisible into " + std::to_string(groups) + " groups");
  }
  const auto g = static_cast<std::size_t>(groups);
  const std::size_t per_group = channels / g;
  std::vector<std::size_t> source(channels);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < per_group; ++j) source[j * g + i] = i * per_group + j;
  }
  return source;
}

Tensor channel_shuffle(const Tensor& x, int groups) {
  const auto source = channel_shuffle_permutation(x.rows(), groups);
  Tensor out(x.rows(), x.cols());
  for (std::size_t c = 0; c < x.rows(); ++c) {
    const auto src = x.row(source[c]);
    std::copy(src.begin(), src.end(), out.row(c).begin());
  }
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
  const std::size_t channels = x.rows();
  if (channels == 0) throw ArgumentError("layer_norm: no channels to normalize");
  if (gamma.size() != channels || beta.size() != channels) {
    throw ArgumentError("layer_norm: gamma/beta must have one entry per channel");
  }
  Tensor out(channels, x.cols());
  const auto n = static_cast<double>(channels);
  for (std::size_t t = 0; t < x.cols(); ++t) {
    double mean = 0.0;
    for (std::size_t c = 0; c < channels; ++c) mean += x(c, t);
    mean /= n;
    double var = 0.0;
    for (std::size_t c = 0; c < channels; ++c) var += (x(c, t) - mean) * (x(c, t) - mean);
    var /= n;
    const double inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    for (std::size_t c = 0; c < channels; ++c) {
      out(c, t) = gamma.flat()[c] * (x(c, t) - mean) * inv_std + beta.flat()[c];
    }
  }
  return out;
}

double softplus(double x) noexcept {
  // max(x, 0) + log1p(exp(-|x|))
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double mish(double x) noexcept { return x * std::tanh(softplus(x)); }

double mish_derivative(double x) noexcept {
  const double tsp = std::tanh(softplus(x));
  // d/dx softplus = sigmoid(x)
  const double sig = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return tsp + x * (1.0 - tsp * tsp) * sig;
}

Tensor mish(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.flat()) v = mish(v);
  return out;
}

Tensor global_avg_pool(const Tensor& x) {
  if (x.cols() == 0) throw ArgumentError("global_avg_pool: empty sequence");
  Tensor out(x.rows(), 1);
  for (std::size_t c = 0; c < x.rows(); ++c) {
    double s = 0.0;
    for (double v : x.row(c)) s += v;
    out(c, 0) = s / static_cast<double>(x.cols());
  }
  return out;
}

Tensor concat_channels(const Tensor& top, const Tensor& bottom) {
  if (top.cols() != bottom.cols()) throw ArgumentError("concat_channels: length mismatch");
  std::vector<double> data(top.values());
  data.insert(data.end(), bottom.values().begin(), bottom.values().end());
  return {top.rows() + bottom.rows(), top.cols(), std::move(data)};
}

Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t count) {
  if (begin + count > x.rows()) throw ArgumentError("slice_channels: range out of bounds");
  Tensor out(count, x.cols());
  for (std::size_t c = 0; c < count; ++c) {
    const auto src = x.row(begin + c);
    std::copy(src.begin(), src.end(), out.row(c).begin());
  }
  return out;
}

}  // namespace quanvnext::model
