#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "easrn/tensor.hpp"

namespace easrn::graph {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode recorder. Every op evaluates eagerly, stores its output and a
/// closure that pushes the output gradient back to its inputs.
///
/// A Tape is single-use and not thread-safe; build one per forward pass.
class Tape {
 public:
  /// Value that never receives a gradient.
  Var constant(Tensor value);
  /// Value whose gradient is accumulated (inputs, parameters).
  Var leaf(Tensor value);

  Var conv2d(Var x, Var weight, Var bias, int stride = 1);
  Var deconv2x(Var x, Var weight, Var bias);
  Var maxpool2x(Var x);
  Var lrelu(Var x, double slope);
  Var add(Var a, Var b);
  Var concat(std::span<const Var> parts);
  Var upsample2x(Var x, std::size_t height, std::size_t width);
  Var pyr_down(Var x);
  Var pad_reflect(Var x, std::size_t height, std::size_t width);
  Var crop(Var x, std::size_t height, std::size_t width);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  /// Accumulated gradient; a zero tensor of the value's shape if none arrived.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(objective)/d(var) for each pair, then runs every recorded
  /// closure in reverse order. May be called once per tape.
  void backward(std::span<const std::pair<Var, Tensor>> seeds);

 private:
  using Backward = std::function<void(Tape&, const Tensor& grad_out)>;

  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Tensor value, bool requires_grad, Backward backward);
  void accumulate(Var v, const Tensor& g);
  void accumulate(Var v, Tensor&& g);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace easrn::graph
