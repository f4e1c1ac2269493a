#pragma once

#include "quanvnext/autodiff/tape.hpp"
#include "quanvnext/quanv/quanv1d.hpp"

// Differentiable wrappers over the classical layers and the quanvolution.
namespace quanvnext::autodiff {

Var add(Tape& tape, Var a, Var b);
Var channel_shuffle(Tape& tape, Var x, int groups);
Var layer_norm(Tape& tape, Var x, Var gamma, Var beta);
Var mish(Tape& tape, Var x);
Var concat_channels(Tape& tape, Var top, Var bottom);
Var slice_channels(Tape& tape, Var x, std::size_t begin, std::size_t count);
Var global_avg_pool(Tape& tape, Var x);
// 0.5 * sum(x^2), mostly for tests
Var half_sum_squares(Tape& tape, Var x);

// θ and λ are tape values shaped like the layer's angle tensors; φ and the
// geometry come from `frozen`.
Var quanv1d(Tape& tape, Var x, Var theta, Var lambda, const quanv::QuanvLayer& frozen);

// -log softmax(logits)[label] for a (2, 1) or (1, 2) logit tensor.
Var cross_entropy(Tape& tape, Var logits, int label);

// Plain helpers shared with evaluation code.
double cross_entropy(std::span<const double> logits, int label);
std::vector<double> softmax(std::span<const double> logits);

}  // namespace quanvnext::autodiff
