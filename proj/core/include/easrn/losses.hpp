#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "easrn/graph/weights.hpp"
#include "easrn/pyramid.hpp"
#include "easrn/tensor.hpp"

namespace easrn {

/// Weights of the edge, perceptual and total-variation terms.
struct LossWeights {
  double sed = 2.4;
  double perceptual = 3e-6;
  double tv = 0.8;

  void validate() const;
  bool operator==(const LossWeights&) const = default;

  /// {"w_p":..,"w_s":..,"w_t":..}; missing keys keep their defaults.
  std::string to_json() const;
  static LossWeights from_json(const std::string& text);
};

/// Salient-edge map provider. Any implementation must return a single-channel
/// map in [0, 1] and the vector-Jacobian product of that map.
class EdgeDetector {
 public:
  virtual ~EdgeDetector() = default;
  virtual Image detect(const Image& img) const = 0;
  virtual Image backward(const Image& img, const Image& grad_edges) const = 0;
};

/// Feature-map provider for the perceptual term.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::vector<Tensor> extract(const Image& img) const = 0;
  virtual Image backward(const Image& img, std::span<const Tensor> grad_features) const = 0;
};

/// Deterministic stand-in for a learned salient-edge network: smoothed
/// gradient magnitude, max-normalized, soft-thresholded at its 90th
/// percentile with a linear ramp up to the maximum.
class ReferenceEdgeDetector final : public EdgeDetector {
 public:
  Image detect(const Image& img) const override;
  Image backward(const Image& img, const Image& grad_edges) const override;
};

/// Two fixed, seeded conv + LReLU layers; the second runs at half resolution.
class ReferenceFeatureExtractor final : public FeatureExtractor {
 public:
  explicit ReferenceFeatureExtractor(std::size_t image_channels, std::uint64_t seed = 0x5EED);

  std::vector<Tensor> extract(const Image& img) const override;
  Image backward(const Image& img, std::span<const Tensor> grad_features) const override;

 private:
  graph::GraphWeights weights_;
};

/// A scalar loss and its gradient with respect to each compared output.
struct LossTerm {
  double value = 0.0;
  std::vector<Tensor> grad;
};

/// (1/N) sum_i mean|y_i - g_i|.
LossTerm fidelity_loss(const Pyramid& outputs, const Pyramid& truths);

/// w_s * mean|E(y_N) - E(g_N)| on the full-resolution pair only. grad has one entry.
LossTerm sed_loss(const Image& output, const Image& truth, const EdgeDetector& detector,
                  double w_s);

/// sum_i ( w_p sum_j mean (f_j(y_i) - f_j(g_i))^2 + w_t TV(y_i) / |y_i| ).
LossTerm perceptual_tv_loss(const Pyramid& outputs, const Pyramid& truths,
                            const FeatureExtractor& extractor, double w_p, double w_t);

/// Sum over channels and pixels of squared forward differences (zero past the
/// last row and column).
double total_variation(const Image& img);
Image total_variation_grad(const Image& img);

double total_loss(double fidelity, double sed, double detail);

struct LossBreakdown {
  double fidelity = 0.0;
  double sed = 0.0;
  double detail = 0.0;
  double total = 0.0;
  std::vector<Tensor> grad;  // d total / d y_i, coarsest first
};

LossBreakdown evaluate_losses(const Pyramid& outputs, const Pyramid& truths,
                              const EdgeDetector& detector, const FeatureExtractor& extractor,
                              const LossWeights& weights);

}  // namespace easrn
