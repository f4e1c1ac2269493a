#include "quanvnext/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "quanvnext/error.hpp"
#include "quanvnext/model/layers.hpp"

namespace quanvnext::autodiff {

Var add(Tape& tape, Var a, Var b) {
  Tensor out = tape.value(a);
  out += tape.value(b);
  return tape.record(std::move(out), {a, b}, [](const Tensor& g, std::span<Tensor* const> in) {
    if (in[0]) *in[0] += g;
    if (in[1]) *in[1] += g;
  });
}

Var channel_shuffle(Tape& tape, Var x, int groups) {
  const Tensor& xv = tape.value(x);
  auto source = model::channel_shuffle_permutation(xv.rows(), groups);
  Tensor out = model::channel_shuffle(xv, groups);
  return tape.record(std::move(out), {x},
                     [source = std::move(source)](const Tensor& g, std::span<Tensor* const> in) {
                       if (!in[0]) return;
                       for (std::size_t c = 0; c < source.size(); ++c) {
                         auto dst = in[0]->row(source[c]);
                         const auto src = g.row(c);
                         for (std::size_t t = 0; t < src.size(); ++t) dst[t] += src[t];
                       }
                     });
}

Var layer_norm(Tape& tape, Var x, Var gamma, Var beta) {
  const Tensor& xv = tape.value(x);
  Tensor out = model::layer_norm(xv, tape.value(gamma), tape.value(beta));
  return tape.record(
      std::move(out), {x, gamma, beta},
      [xv, gv = tape.value(gamma)](const Tensor& g, std::span<Tensor* const> in) {
        const std::size_t channels = xv.rows();
        const auto n = static_cast<double>(channels);
        std::vector<double> xhat(channels), dxhat(channels);
        for (std::size_t t = 0; t < xv.cols(); ++t) {
          double mean = 0.0;
          for (std::size_t c = 0; c < channels; ++c) mean += xv(c, t);
          mean /= n;
          double var = 0.0;
          for (std::size_t c = 0; c < channels; ++c) var += (xv(c, t) - mean) * (xv(c, t) - mean);
          var /= n;
          const double inv_std = 1.0 / std::sqrt(var + model::kLayerNormEpsilon);
          double sum_d = 0.0;
          double sum_dx = 0.0;
          for (std::size_t c = 0; c < channels; ++c) {
            xhat[c] = (xv(c, t) - mean) * inv_std;
            dxhat[c] = g(c, t) * gv.flat()[c];
            sum_d += dxhat[c];
            sum_dx += dxhat[c] * xhat[c];
            if (in[1]) in[1]->flat()[c] += g(c, t) * xhat[c];
            if (in[2]) in[2]->flat()[c] += g(c, t);
          }
          if (in[0]) {
            for (std::size_t c = 0; c < channels; ++c) {
              (*in[0])(c, t) += inv_std / n * (n * dxhat[c] - sum_d - xhat[c] * sum_dx);
            }
          }
        }
      });
}

Var mish(Tape& tape, Var x) {
  const Tensor& xv = tape.value(x);
  return tape.record(model::mish(xv), {x}, [xv](const Tensor& g, std::span<Tensor* const> in) {
    if (!in[0]) return;
    auto dst = in[0]->flat();
    const auto src = xv.flat();
    const auto gf = g.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += gf[i] * model::mish_derivative(src[i]);
  });
}

Var concat_channels(Tape& tape, Var top, Var bottom) {
  const std::size_t split = tape.value(top).size();
  Tensor out = model::concat_channels(tape.value(top), tape.value(bottom));
  return tape.record(std::move(out), {top, bottom},
                     [split](const Tensor& g, std::span<Tensor* const> in) {
                       const auto gf = g.flat();
                       if (in[0]) {
                         auto d = in[0]->flat();
                         for (std::size_t i = 0; i < d.size(); ++i) d[i] += gf[i];
                       }
                       if (in[1]) {
                         auto d = in[1]->flat();
                         for (std::size_t i = 0; i < d.size(); ++i) d[i] += gf[split + i];
                       }
                     });
}

Var slice_channels(Tape& tape, Var x, std::size_t begin, std::size_t count) {
  Tensor out = model::slice_channels(tape.value(x), begin, count);
  return tape.record(std::move(out), {x},
                     [begin, count](const Tensor& g, std::span<Tensor* const> in) {
                       if (!in[0]) return;
                       for (std::size_t c = 0; c < count; ++c) {
                         auto dst = in[0]->row(begin + c);
                         const auto src = g.row(c);
                         for (std::size_t t = 0; t < src.size(); ++t) dst[t] += src[t];
                       }
                     });
}

Var global_avg_pool(Tape& tape, Var x) {
  const std::size_t length = tape.value(x).cols();
  return tape.record(model::global_avg_pool(tape.value(x)), {x},
                     [length](const Tensor& g, std::span<Tensor* const> in) {
                       if (!in[0]) return;
                       const double scale = 1.0 / static_cast<double>(length);
                       for (std::size_t c = 0; c < in[0]->rows(); ++c) {
                         for (double& v : in[0]->row(c)) v += g(c, 0) * scale;
                       }
                     });
}

Var half_sum_squares(Tape& tape, Var x) {
  const Tensor& xv = tape.value(x);
  double s = 0.0;
  for (double v : xv.flat()) s += v * v;
  return tape.record(Tensor(1, 1, 0.5 * s), {x}, [xv](const Tensor& g, std::span<Tensor* const> in) {
    if (!in[0]) return;
    auto d = in[0]->flat();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g(0, 0) * xv.flat()[i];
  });
}

Var quanv1d(Tape& tape, Var x, Var theta, Var lambda, const quanv::QuanvLayer& frozen) {
  auto layer = std::make_shared<quanv::QuanvLayer>(frozen);
  layer->theta = tape.value(theta);
  layer->lambda = tape.value(lambda);
  auto ctx = std::make_shared<quanv::QuanvContext>();
  const bool need_ctx = tape.requires_grad(x) || tape.requires_grad(theta) ||
                        tape.requires_grad(lambda);
  Tensor out = quanv::quanv1d_forward(tape.value(x), *layer, need_ctx ? ctx.get() : nullptr);
  return tape.record(std::move(out), {x, theta, lambda},
                     [layer, ctx](const Tensor& g, std::span<Tensor* const> in) {
                       auto grads = quanv::quanv1d_backward(g, *ctx, *layer);
                       if (in[0]) *in[0] += grads.input;
                       if (in[1]) *in[1] += grads.theta;
                       if (in[2]) *in[2] += grads.lambda;
                     });
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double peak = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& v : p) total += (v = std::exp(v - peak));
  for (double& v : p) v /= total;
  return p;
}

double cross_entropy(std::span<const double> logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw ArgumentError("cross_entropy: label out of range");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - peak);
  return peak + std::log(total) - logits[static_cast<std::size_t>(label)];
}

Var cross_entropy(Tape& tape, Var logits, int label) {
  const Tensor& z = tape.value(logits);
  const double loss = cross_entropy(z.flat(), label);
  auto p = softmax(z.flat());
  return tape.record(Tensor(1, 1, loss), {logits},
                     [p = std::move(p), label](const Tensor& g, std::span<Tensor* const> in) {
                       if (!in[0]) return;
                       auto d = in[0]->flat();
                       for (std::size_t i = 0; i < d.size(); ++i) {
                         const double target = static_cast<int>(i) == label ? 1.0 : 0.0;
                         d[i] += g(0, 0) * (p[i] - target);
                       }
                     });
}

}  // namespace quanvnext::autodiff
