#include "easrn/losses.hpp"

#include <cmath>
#include <string>

#include "easrn/errors.hpp"
#include "json.hpp"

namespace easrn {

void LossWeights::validate() const {
  if (!(sed >= 0.0 && perceptual >= 0.0 && tv >= 0.0)) {
    throw ConfigError("loss weights must be non-negative");
  }
}

std::string LossWeights::to_json() const {
  return nlohmann::json{{"w_p", perceptual}, {"w_s", sed}, {"w_t", tv}}.dump();
}

LossWeights LossWeights::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("loss weights: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("loss weights: expected a JSON object");
  LossWeights w;
  auto read = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(std::string("loss weights: ") + key + " must be a number");
    field = j[key].get<double>();
  };
  read("w_s", w.sed);
  read("w_p", w.perceptual);
  read("w_t", w.tv);
  for (const auto& [key, value] : j.items()) {
    if (key != "w_s" && key != "w_p" && key != "w_t") {
      throw ConfigError("loss weights: unknown key '" + key + "'");
    }
  }
  w.validate();
  return w;
}

namespace {

void check_pyramids(const Pyramid& outputs, const Pyramid& truths, const char* what) {
  if (outputs.size() != truths.size() || outputs.size() == 0) {
    throw ContractError(std::string(what) + ": pyramids must be non-empty with equal depth");
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    require_same_shape(outputs.levels[i], truths.levels[i], what);
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

LossTerm fidelity_loss(const Pyramid& outputs, const Pyramid& truths) {
  check_pyramids(outputs, truths, "fidelity_loss");
  const double n_scales = static_cast<double>(outputs.size());
  LossTerm r;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const Image& y = outputs.levels[i];
    const Image& g = truths.levels[i];
    const double count = static_cast<double>(y.size());
    double acc = 0.0;
    Tensor grad(y.shape());
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double d = y[k] - g[k];
      acc += std::abs(d);
      grad[k] = sign(d) / (count * n_scales);
    }
    r.value += acc / count;
    r.grad.push_back(std::move(grad));
  }
  r.value /= n_scales;
  return r;
}

LossTerm sed_loss(const Image& output, const Image& truth, const EdgeDetector& detector,
                  double w_s) {
  require_same_shape(output, truth, "sed_loss");
  LossTerm r;
  if (w_s == 0.0) {
    r.grad.emplace_back(output.shape());
    return r;
  }
  const Image ey = detector.detect(output);
  const Image eg = detector.detect(truth);
  require_same_shape(ey, eg, "sed_loss edge maps");
  const double count = static_cast<double>(ey.size());
  Image de(ey.shape());
  double acc = 0.0;
  for (std::size_t k = 0; k < ey.size(); ++k) {
    const double d = ey[k] - eg[k];
    acc += std::abs(d);
    de[k] = w_s * sign(d) / count;
  }
  r.value = w_s * acc / count;
  r.grad.push_back(detector.backward(output, de));
  return r;
}

LossTerm perceptual_tv_loss(const Pyramid& outputs, const Pyramid& truths,
                            const FeatureExtractor& extractor, double w_p, double w_t) {
  check_pyramids(outputs, truths, "perceptual_tv_loss");
  LossTerm r;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const Image& y = outputs.levels[i];
    const Image& g = truths.levels[i];
    Tensor grad(y.shape());
    if (w_p != 0.0) {
      const auto fy = extractor.extract(y);
      const auto fg = extractor.extract(g);
      if (fy.size() != fg.size()) throw ContractError("feature extractor returned ragged lists");
      std::vector<Tensor> dfeat;
      for (std::size_t j = 0; j < fy.size(); ++j) {
        require_same_shape(fy[j], fg[j], "perceptual features");
        const double count = static_cast<double>(fy[j].size());
        double acc = 0.0;
        Tensor d(fy[j].shape());
        for (std::size_t k = 0; k < d.size(); ++k) {
          const double diff = fy[j][k] - fg[j][k];
          acc += diff * diff;
          d[k] = w_p * 2.0 * diff / count;
        }
        r.value += w_p * acc / count;
        dfeat.push_back(std::move(d));
      }
      grad += extractor.backward(y, dfeat);
    }
    if (w_t != 0.0) {
      const double count = static_cast<double>(y.size());
      r.value += w_t * total_variation(y) / count;
      Image tg = total_variation_grad(y);
      tg *= w_t / count;
      grad += tg;
    }
    r.grad.push_back(std::move(grad));
  }
  return r;
}

double total_variation(const Image& img) {
  require_rank(img, 3, "total_variation");
  double acc = 0.0;
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        const double v = img.at(c, y, x);
        if (x + 1 < img.width()) {
          const double d = img.at(c, y, x + 1) - v;
          acc += d * d;
        }
        if (y + 1 < img.height()) {
          const double d = img.at(c, y + 1, x) - v;
          acc += d * d;
        }
      }
    }
  }
  return acc;
}

Image total_variation_grad(const Image& img) {
  require_rank(img, 3, "total_variation_grad");
  Image g(img.shape());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        const double v = img.at(c, y, x);
        if (x + 1 < img.width()) {
          const double d = img.at(c, y, x + 1) - v;
          g.at(c, y, x + 1) += 2.0 * d;
          g.at(c, y, x) -= 2.0 * d;
        }
        if (y + 1 < img.height()) {
          const double d = img.at(c, y + 1, x) - v;
          g.at(c, y + 1, x) += 2.0 * d;
          g.at(c, y, x) -= 2.0 * d;
        }
      }
    }
  }
  return g;
}

double total_loss(double fidelity, double sed, double detail) { return fidelity + sed + detail; }

LossBreakdown evaluate_losses(const Pyramid& outputs, const Pyramid& truths,
                              const EdgeDetector& detector, const FeatureExtractor& extractor,
                              const LossWeights& weights) {
  weights.validate();
  LossTerm f = fidelity_loss(outputs, truths);
  LossTerm s = sed_loss(outputs.finest(), truths.finest(), detector, weights.sed);
  LossTerm v = perceptual_tv_loss(outputs, truths, extractor, weights.perceptual, weights.tv);
  LossBreakdown b;
  b.fidelity = f.value;
  b.sed = s.value;
  b.detail = v.value;
  b.total = total_loss(f.value, s.value, v.value);
  b.grad = std::move(f.grad);
  for (std::size_t i = 0; i < b.grad.size(); ++i) b.grad[i] += v.grad[i];
  b.grad.back() += s.grad.front();
  return b;
}

}  // namespace easrn
