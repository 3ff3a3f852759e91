#include <cmath>
#include <random>

#include "easrn/errors.hpp"
#include "easrn/graph/tape.hpp"
#include "easrn/losses.hpp"

namespace easrn {

namespace {

constexpr std::size_t kWidth1 = 8;
constexpr std::size_t kWidth2 = 16;
constexpr double kSlope = 0.2;

Tensor seeded_filter(std::mt19937_64& rng, std::size_t cin, std::size_t cout) {
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / (9.0 * static_cast<double>(cin))));
  Tensor w({3, 3, cin, cout});
  for (double& v : w.values()) v = normal(rng);
  return w;
}

Tensor seeded_bias(std::mt19937_64& rng, std::size_t cout) {
  std::uniform_real_distribution<double> uniform(-0.05, 0.05);
  Tensor b({cout});
  for (double& v : b.values()) v = uniform(rng);
  return b;
}

struct Features {
  graph::Var input, f1, f2;
};

Features build(graph::Tape& tape, const graph::GraphWeights& w, const Image& img, bool leaf) {
  Features f;
  f.input = leaf ? tape.leaf(img) : tape.constant(img);
  f.f1 = tape.lrelu(tape.conv2d(f.input, tape.constant(w.at("conv1.w")),
                                tape.constant(w.at("conv1.b"))),
                    kSlope);
  f.f2 = tape.lrelu(tape.conv2d(tape.maxpool2x(f.f1), tape.constant(w.at("conv2.w")),
                                tape.constant(w.at("conv2.b"))),
                    kSlope);
  return f;
}

}  // namespace

ReferenceFeatureExtractor::ReferenceFeatureExtractor(std::size_t image_channels,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  weights_.set("conv1.w", seeded_filter(rng, image_channels, kWidth1));
  weights_.set("conv1.b", seeded_bias(rng, kWidth1));
  weights_.set("conv2.w", seeded_filter(rng, kWidth1, kWidth2));
  weights_.set("conv2.b", seeded_bias(rng, kWidth2));
}

std::vector<Tensor> ReferenceFeatureExtractor::extract(const Image& img) const {
  graph::Tape tape;
  const Features f = build(tape, weights_, img, false);
  return {tape.value(f.f1), tape.value(f.f2)};
}

Image ReferenceFeatureExtractor::backward(const Image& img,
                                          std::span<const Tensor> grad_features) const {
  if (grad_features.size() != 2) {
    throw ContractError("reference feature extractor expects 2 feature gradients");
  }
  graph::Tape tape;
  const Features f = build(tape, weights_, img, true);
  const std::pair<graph::Var, Tensor> seeds[] = {{f.f1, grad_features[0]},
                                                 {f.f2, grad_features[1]}};
  tape.backward(seeds);
  return tape.grad(f.input);
}

}  // namespace easrn
