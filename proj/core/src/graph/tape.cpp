#include "easrn/graph/tape.hpp"

#include <memory>

#include "easrn/errors.hpp"
#include "easrn/graph/ops.hpp"
#include "easrn/pyramid.hpp"

namespace easrn::graph {

Var Tape::push(Tensor value, bool requires_grad, Backward backward) {
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad,
                        requires_grad ? std::move(backward) : Backward()});
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Tensor& g) {
  Node& n = nodes_.at(v.id);
  if (!n.requires_grad) return;
  if (n.grad.empty()) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::accumulate(Var v, Tensor&& g) {
  Node& n = nodes_.at(v.id);
  if (!n.requires_grad) return;
  if (n.grad.empty()) {
    n.grad = std::move(g);
  } else {
    n.grad += g;
  }
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.grad.empty() ? Tensor(n.value.shape()) : n.grad;
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, {}); }

Var Tape::leaf(Tensor value) { return push(std::move(value), true, {}); }

Var Tape::conv2d(Var x, Var weight, Var bias, int stride) {
  Tensor out = graph::conv2d(value(x), value(weight), value(bias), stride);
  const bool rg = requires_grad(x) || requires_grad(weight) || requires_grad(bias);
  return push(std::move(out), rg, [x, weight, bias, stride](Tape& t, const Tensor& g) {
    const bool need_params = t.requires_grad(weight) || t.requires_grad(bias);
    ConvGrads cg = conv2d_backward(t.value(x), t.value(weight), g, stride, t.requires_grad(x),
                                   need_params);
    if (t.requires_grad(x)) t.accumulate(x, std::move(cg.input));
    if (need_params) {
      t.accumulate(weight, std::move(cg.weight));
      t.accumulate(bias, std::move(cg.bias));
    }
  });
}

Var Tape::deconv2x(Var x, Var weight, Var bias) {
  Tensor out = graph::deconv2x(value(x), value(weight), value(bias));
  const bool rg = requires_grad(x) || requires_grad(weight) || requires_grad(bias);
  return push(std::move(out), rg, [x, weight, bias](Tape& t, const Tensor& g) {
    const bool need_params = t.requires_grad(weight) || t.requires_grad(bias);
    ConvGrads cg =
        deconv2x_backward(t.value(x), t.value(weight), g, t.requires_grad(x), need_params);
    if (t.requires_grad(x)) t.accumulate(x, std::move(cg.input));
    if (need_params) {
      t.accumulate(weight, std::move(cg.weight));
      t.accumulate(bias, std::move(cg.bias));
    }
  });
}

Var Tape::maxpool2x(Var x) {
  PoolResult r = graph::maxpool2x(value(x));
  auto argmax = std::make_shared<std::vector<std::size_t>>(std::move(r.argmax));
  return push(std::move(r.output), requires_grad(x), [x, argmax](Tape& t, const Tensor& g) {
    t.accumulate(x, maxpool2x_backward(g, *argmax, t.value(x).shape()));
  });
}

Var Tape::lrelu(Var x, double slope) {
  return push(graph::lrelu(value(x), slope), requires_grad(x),
              [x, slope](Tape& t, const Tensor& g) {
                t.accumulate(x, lrelu_backward(t.value(x), g, slope));
              });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "tape add");
  return push(value(a) + value(b), requires_grad(a) || requires_grad(b),
              [a, b](Tape& t, const Tensor& g) {
                t.accumulate(a, g);
                t.accumulate(b, g);
              });
}

Var Tape::concat(std::span<const Var> parts) {
  std::vector<const Tensor*> tensors;
  bool rg = false;
  for (Var p : parts) {
    tensors.push_back(&value(p));
    rg = rg || requires_grad(p);
  }
  Tensor out = concat_channels(tensors);
  std::vector<Var> ids(parts.begin(), parts.end());
  return push(std::move(out), rg, [ids](Tape& t, const Tensor& g) {
    std::size_t offset = 0;
    for (Var p : ids) {
      const Tensor& v = t.value(p);
      if (t.requires_grad(p)) {
        Tensor piece(v.shape());
        std::copy(g.data() + offset, g.data() + offset + v.size(), piece.data());
        t.accumulate(p, std::move(piece));
      }
      offset += v.size();
    }
  });
}

Var Tape::upsample2x(Var x, std::size_t height, std::size_t width) {
  return push(easrn::upsample2x(value(x), height, width), requires_grad(x),
              [x](Tape& t, const Tensor& g) {
                const Tensor& v = t.value(x);
                t.accumulate(x, upsample2x_adjoint(g, v.height(), v.width()));
              });
}

Var Tape::pyr_down(Var x) {
  return push(easrn::pyr_down(value(x)), requires_grad(x), [x](Tape& t, const Tensor& g) {
    const Tensor& v = t.value(x);
    t.accumulate(x, pyr_down_adjoint(g, v.height(), v.width()));
  });
}

Var Tape::pad_reflect(Var x, std::size_t height, std::size_t width) {
  return push(graph::pad_reflect(value(x), height, width), requires_grad(x),
              [x](Tape& t, const Tensor& g) {
                const Tensor& v = t.value(x);
                t.accumulate(x, pad_reflect_adjoint(g, v.height(), v.width()));
              });
}

Var Tape::crop(Var x, std::size_t height, std::size_t width) {
  return push(graph::crop(value(x), height, width), requires_grad(x),
              [x](Tape& t, const Tensor& g) {
                const Tensor& v = t.value(x);
                t.accumulate(x, crop_adjoint(g, v.height(), v.width()));
              });
}

void Tape::backward(std::span<const std::pair<Var, Tensor>> seeds) {
  if (consumed_) throw ContractError("Tape::backward called twice");
  consumed_ = true;
  for (const auto& [v, g] : seeds) {
    require_same_shape(value(v), g, "Tape::backward seed");
    accumulate(v, g);
  }
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    // Copy: the closure may append to other nodes' gradients but never to its own.
    const Tensor g = n.grad;
    n.backward(*this, g);
  }
}

}  // namespace easrn::graph
