#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "easrn/graph/tape.hpp"
#include "easrn/graph/weights.hpp"
#include "easrn/pyramid.hpp"

namespace easrn::graph {

/// Builds EASRN sub-graphs on a tape, binding each named parameter to one tape
/// variable. Parameters are shared wherever a name is reused, so the
/// per-scale subnets share weights.
class GraphBuilder {
 public:
  /// With `track_params`, parameters are gradient leaves; otherwise constants.
  GraphBuilder(const GraphWeights& weights, const GraphConfig& config, bool track_params);

  Tape& tape() { return tape_; }
  const Tape& tape() const { return tape_; }
  const GraphConfig& config() const { return config_; }

  Var param(const std::string& name);
  Var conv(const std::string& name, Var x, int stride = 1);
  Var lrelu(Var x) { return tape_.lrelu(x, config_.lrelu_slope); }

  /// Two nested residual blocks RB(u) = u + conv(lrelu(conv(u))) under a short
  /// skip: y = RB(RB(x)) = x + r0 + r1.
  Var res_in_res(const std::string& prefix, Var x);
  /// Channel concat of one conv per filter size. Linear; no activation.
  Var inception(const std::string& prefix, Var x);
  /// Encoder / inception / decoder with an input-to-output residual.
  /// Reflect-pads to a multiple of 8 and crops back.
  Var deblur(Var x);
  /// x_{i+1} = b_{i+1} + proj(RiR^3(lrelu(head([up(y_i), b_{i+1}])))).
  Var upsample(Var y, Var b_next);

  /// Gradients of every bound parameter (zeros for parameters that received none).
  GraphWeights param_grads() const;

 private:
  const GraphWeights& weights_;
  GraphConfig config_;
  bool track_params_;
  Tape tape_;
  std::map<std::string, Var> bound_;
};

/// One evaluated forward pass over the scale recurrence. Keeps the tape so the
/// caller can request gradients.
class EasrnPass {
 public:
  const Image& b(std::size_t i) const { return builder_->tape().value(b_.at(i)); }
  const Image& x(std::size_t i) const { return builder_->tape().value(x_.at(i)); }
  const Image& y(std::size_t i) const { return builder_->tape().value(y_.at(i)); }
  std::size_t scales() const { return y_.size(); }
  std::vector<Image> outputs() const;

  struct Gradients {
    GraphWeights weights;
    Image input;
  };
  /// d(objective)/d(y_i) for every scale, coarsest first. Single use.
  Gradients backward(std::span<const Tensor> grad_outputs);

 private:
  friend EasrnPass easrn_forward(const Image&, const GraphWeights&, const GraphConfig&, bool);
  std::unique_ptr<GraphBuilder> builder_;
  Var input_;
  std::vector<Var> b_, x_, y_;
};

/// Coarse-to-fine recurrence: x_1 = b_1, y_i = Deblur(x_i),
/// x_{i+1} = Upsample(y_i, b_{i+1}). y_N is the restored image.
EasrnPass easrn_forward(const Image& blurred, const GraphWeights& weights,
                        const GraphConfig& config, bool track_gradients = false);

// Standalone evaluation of the building blocks (no gradients).
Tensor res_in_res_block(const Tensor& x, const GraphWeights& weights, const std::string& prefix,
                        const GraphConfig& config);
Tensor inception_module(const Tensor& x, const GraphWeights& weights, const std::string& prefix,
                        const GraphConfig& config);
Tensor deblur_subnet(const Tensor& x, const GraphWeights& weights, const GraphConfig& config);
Tensor upsample_subnet(const Tensor& y, const Tensor& b_next, const GraphWeights& weights,
                       const GraphConfig& config);

}  // namespace easrn::graph
