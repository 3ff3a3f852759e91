#include "easrn/graph/network.hpp"

#include "easrn/errors.hpp"

namespace easrn::graph {

namespace {

std::size_t round_up8(std::size_t n) { return (n + 7) / 8 * 8; }

}  // namespace

GraphBuilder::GraphBuilder(const GraphWeights& weights, const GraphConfig& config,
                           bool track_params)
    : weights_(weights), config_(config), track_params_(track_params) {
  config_.validate();
}

Var GraphBuilder::param(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const Tensor& t = weights_.at(name);
  Var v = track_params_ ? tape_.leaf(t) : tape_.constant(t);
  bound_.emplace(name, v);
  return v;
}

Var GraphBuilder::conv(const std::string& name, Var x, int stride) {
  return tape_.conv2d(x, param(name + ".w"), param(name + ".b"), stride);
}

// The outer short skip is the composition of the two inner skips:
// y = x + r0 + r1, which is the identity when both branches vanish.
Var GraphBuilder::res_in_res(const std::string& prefix, Var x) {
  Var u = x;
  for (int rb = 0; rb < 2; ++rb) {
    const std::string p = prefix + ".rb" + std::to_string(rb);
    Var r = conv(p + ".conv1", lrelu(conv(p + ".conv0", u)));
    u = tape_.add(u, r);
  }
  return u;
}

Var GraphBuilder::inception(const std::string& prefix, Var x) {
  std::vector<Var> branches;
  for (std::size_t k : config_.inception_sizes) {
    branches.push_back(conv(prefix + ".k" + std::to_string(k), x));
  }
  return tape_.concat(branches);
}

Var GraphBuilder::deblur(Var x) {
  const Tensor& in = tape_.value(x);
  require_rank(in, 3, "deblur subnet");
  if (in.channels() != config_.image_channels) {
    throw ContractError("deblur subnet: expected " + std::to_string(config_.image_channels) +
                        "-channel input, got " + std::to_string(in.channels()));
  }
  const std::size_t h = in.height(), w = in.width();
  const std::size_t ph = round_up8(h), pw = round_up8(w);
  Var padded = (ph == h && pw == w) ? x : tape_.pad_reflect(x, ph, pw);

  const std::size_t stages = config_.stage_channels().size();
  std::vector<Var> skips;
  Var f = lrelu(conv("deblur.stem", padded));
  f = res_in_res("deblur.enc0.rir", f);
  skips.push_back(f);
  for (std::size_t s = 1; s < stages; ++s) {
    const std::string stage = "deblur.enc" + std::to_string(s);
    f = lrelu(conv(stage + ".down", tape_.maxpool2x(f)));
    f = res_in_res(stage + ".rir", f);
    skips.push_back(f);
  }
  f = lrelu(inception("deblur.inception", f));
  for (std::size_t s = stages - 1; s-- > 0;) {
    const std::string stage = "deblur.dec" + std::to_string(s);
    Var up = lrelu(tape_.deconv2x(f, param(stage + ".up.w"), param(stage + ".up.b")));
    f = res_in_res(stage + ".rir", tape_.add(up, skips[s]));
  }
  Var residual = conv("deblur.out", f);
  if (ph != h || pw != w) residual = tape_.crop(residual, h, w);
  return tape_.add(x, residual);
}

Var GraphBuilder::upsample(Var y, Var b_next) {
  const Tensor& b = tape_.value(b_next);
  Var up = tape_.upsample2x(y, b.height(), b.width());
  const Var parts[] = {up, b_next};
  Var f = lrelu(conv("upsample.head", tape_.concat(parts)));
  for (int r = 0; r < 3; ++r) f = res_in_res("upsample.rir" + std::to_string(r), f);
  return tape_.add(b_next, conv("upsample.proj", f));
}

GraphWeights GraphBuilder::param_grads() const {
  GraphWeights::Map m;
  for (const auto& [name, v] : bound_) m.emplace(name, tape_.grad(v));
  return GraphWeights(std::move(m));
}

std::vector<Image> EasrnPass::outputs() const {
  std::vector<Image> out;
  for (std::size_t i = 0; i < y_.size(); ++i) out.push_back(y(i));
  return out;
}

EasrnPass::Gradients EasrnPass::backward(std::span<const Tensor> grad_outputs) {
  if (grad_outputs.size() != y_.size()) {
    throw ContractError("EasrnPass::backward: expected " + std::to_string(y_.size()) +
                        " output gradients, got " + std::to_string(grad_outputs.size()));
  }
  std::vector<std::pair<Var, Tensor>> seeds;
  for (std::size_t i = 0; i < y_.size(); ++i) seeds.emplace_back(y_[i], grad_outputs[i]);
  builder_->tape().backward(seeds);
  return {builder_->param_grads(), builder_->tape().grad(input_)};
}

EasrnPass easrn_forward(const Image& blurred, const GraphWeights& weights,
                        const GraphConfig& config, bool track_gradients) {
  config.validate();
  weights.validate(config);
  require_rank(blurred, 3, "easrn_forward");
  const std::size_t min_dim = std::size_t{1} << (config.n_scales - 1);
  if (blurred.height() < min_dim || blurred.width() < min_dim) {
    throw ConfigError("easrn_forward: image smaller than " + std::to_string(min_dim) +
                      " pixels cannot form " + std::to_string(config.n_scales) + " scales");
  }

  EasrnPass pass;
  pass.builder_ = std::make_unique<GraphBuilder>(weights, config, track_gradients);
  Tape& t = pass.builder_->tape();
  pass.input_ = track_gradients ? t.leaf(blurred) : t.constant(blurred);

  const auto n = static_cast<std::size_t>(config.n_scales);
  pass.b_.resize(n);
  pass.b_[n - 1] = pass.input_;
  for (std::size_t i = n - 1; i-- > 0;) pass.b_[i] = t.pyr_down(pass.b_[i + 1]);

  Var x = pass.b_[0];
  for (std::size_t i = 0; i < n; ++i) {
    pass.x_.push_back(x);
    Var y = pass.builder_->deblur(x);
    pass.y_.push_back(y);
    if (i + 1 < n) x = pass.builder_->upsample(y, pass.b_[i + 1]);
  }
  return pass;
}

Tensor res_in_res_block(const Tensor& x, const GraphWeights& weights, const std::string& prefix,
                        const GraphConfig& config) {
  GraphBuilder g(weights, config, false);
  return g.tape().value(g.res_in_res(prefix, g.tape().constant(x)));
}

Tensor inception_module(const Tensor& x, const GraphWeights& weights, const std::string& prefix,
                        const GraphConfig& config) {
  GraphBuilder g(weights, config, false);
  return g.tape().value(g.inception(prefix, g.tape().constant(x)));
}

Tensor deblur_subnet(const Tensor& x, const GraphWeights& weights, const GraphConfig& config) {
  GraphBuilder g(weights, config, false);
  return g.tape().value(g.deblur(g.tape().constant(x)));
}

Tensor upsample_subnet(const Tensor& y, const Tensor& b_next, const GraphWeights& weights,
                       const GraphConfig& config) {
  GraphBuilder g(weights, config, false);
  Tape& t = g.tape();
  return t.value(g.upsample(t.constant(y), t.constant(b_next)));
}

}  // namespace easrn::graph
