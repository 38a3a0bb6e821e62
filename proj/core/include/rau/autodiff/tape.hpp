#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rau/matrix.hpp"

namespace rau::ad {

class Tape;

/// Handle to a tensor recorded on a Tape. Cheap to copy; valid while the tape
/// lives and has not been cleared.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  /// Accumulated gradient after Tape::backward; empty when nothing flowed here.
  const Matrix& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;

  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) noexcept : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Append-only record of a forward computation. Node ids are assigned in
/// creation order, which is therefore a topological order.
class Tape {
 public:
  /// Called once during backward with the node's own id and the gradient that
  /// reached it.
  using BackwardFn = std::function<void(Tape& tape, std::size_t self, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf that receives a gradient.
  Var variable(Matrix value);

  /// Records an op result. The backward rule is kept only when some input
  /// requires a gradient; otherwise the node is a constant.
  Var record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  /// Reverse sweep from a 1x1 loss. Gradients of earlier sweeps are reset.
  void backward(Var loss);

  void clear() noexcept { nodes_.clear(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  const Matrix& grad(std::size_t id) const { return nodes_.at(id).grad; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

  /// Gradient buffer for `id`, zero-initialised on first use.
  Matrix& grad_buffer(std::size_t id);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

}  // namespace rau::ad
