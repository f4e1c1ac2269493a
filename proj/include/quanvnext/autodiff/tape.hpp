#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quanvnext/tensor.hpp"

namespace quanvnext::autodiff {

// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
  std::uint64_t tape = 0;
};

// Receives dL/d(out) and accumulates into dL/d(input_i) for each input. A
// null entry means that input does not need a gradient.
using Backward = std::function<void(const Tensor& grad_out, std::span<Tensor* const> grad_in)>;

// Append-only record of a computation. Nodes are stored in execution order, so
// every node's inputs precede it and one reverse sweep is a valid topological
// traversal.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Tensor value);
  // Trainable leaf. backward() fills its gradient.
  Var parameter(Tensor value);
  Var record(Tensor value, std::vector<Var> inputs, Backward backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  bool is_parameter(Var v) const;

  // Gradient from the last backward(); zeros when v did not influence the loss.
  Tensor grad(Var v) const;

  // Reverse sweep from a 1x1 loss. Throws StateError if the loss is not on
  // this tape, ArgumentError if it is not a scalar.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> inputs;
    Backward backward;
    bool requires_grad = false;
    bool trainable = false;
  };

  std::size_t index(Var v) const;
  Var push(Node node);

  std::uint64_t uid_;
  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

}  // namespace quanvnext::autodiff
