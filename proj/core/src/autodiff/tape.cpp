#include "rau/autodiff/tape.hpp"

#include <stdexcept>
#include <string>

#include "rau/error.hpp"

namespace rau::ad {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, true, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward) {
  const std::size_t id = nodes_.size();
  bool needs_grad = false;
  for (std::size_t in : inputs) {
    // Inputs must already exist; this is what keeps the tape acyclic.
    if (in >= id) throw std::logic_error("tape: input " + std::to_string(in) + " does not precede node");
    needs_grad = needs_grad || nodes_[in].requires_grad;
  }
  Node node{std::move(value), {}, needs_grad, std::move(inputs), {}};
  if (needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, id);
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.empty() && !n.value.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw std::logic_error("tape: loss belongs to another tape");
  const Matrix& lv = value(loss.id());
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ShapeError("backward: loss must be 1x1, got " + std::to_string(lv.rows()) + "x" +
                     std::to_string(lv.cols()));
  for (auto& n : nodes_) n.grad = Matrix();
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())(0, 0) = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.empty()) continue;
    for (std::size_t in : n.inputs)
      if (in >= i) throw std::logic_error("tape: cycle detected at node " + std::to_string(i));
    n.backward(*this, i, n.grad);
  }
}

}  // namespace rau::ad
