#include "quanvnext/autodiff/tape.hpp"

#include <atomic>

#include "quanvnext/error.hpp"

namespace quanvnext::autodiff {
namespace {
std::atomic<std::uint64_t> g_next_uid{1};
}

Tape::Tape() : uid_(g_next_uid++) {}

std::size_t Tape::index(Var v) const {
  if (v.tape != uid_ || v.id >= nodes_.size()) {
    throw StateError("Tape: variable is not recorded on this tape");
  }
  return v.id;
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1, uid_};
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  n.trainable = true;
  return push(std::move(n));
}

Var Tape::record(Tensor value, std::vector<Var> inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (Var in : inputs) {
    const std::size_t i = index(in);
    n.inputs.push_back(i);
    n.requires_grad = n.requires_grad || nodes_[i].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

const Tensor& Tape::value(Var v) const { return nodes_[index(v)].value; }
bool Tape::requires_grad(Var v) const { return nodes_[index(v)].requires_grad; }
bool Tape::is_parameter(Var v) const { return nodes_[index(v)].trainable; }

Tensor Tape::grad(Var v) const {
  const std::size_t i = index(v);
  if (i < grads_.size() && !grads_[i].empty()) return grads_[i];
  return Tensor(nodes_[i].value.rows(), nodes_[i].value.cols());
}

void Tape::backward(Var loss) {
  const std::size_t root = index(loss);
  if (nodes_[root].value.size() != 1) {
    throw ArgumentError("Tape::backward: loss must be a scalar, got " +
                        nodes_[root].value.shape_string());
  }
  grads_.assign(nodes_.size(), Tensor());
  grads_[root] = Tensor(1, 1, 1.0);

  std::vector<Tensor*> grad_in;
  for (std::size_t i = root + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (grads_[i].empty() || !node.backward) continue;
    grad_in.assign(node.inputs.size(), nullptr);
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      const std::size_t in = node.inputs[k];
      if (!nodes_[in].requires_grad) continue;
      if (grads_[in].empty()) grads_[in] = Tensor(nodes_[in].value.rows(), nodes_[in].value.cols());
      grad_in[k] = &grads_[in];
    }
    node.backward(grads_[i], grad_in);
  }
}

}  // namespace quanvnext::autodiff
