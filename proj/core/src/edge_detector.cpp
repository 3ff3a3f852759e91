#include <algorithm>
#include <cmath>
#include <numeric>

#include "easrn/errors.hpp"
#include "easrn/losses.hpp"

namespace easrn {

namespace {

constexpr double kEps = 1e-6;
constexpr double kPercentile = 0.9;
constexpr double kLuma[3] = {0.299, 0.587, 0.114};

Image to_luma(const Image& img) {
  require_rank(img, 3, "edge detector");
  Image l = Image::image(1, img.height(), img.width());
  if (img.channels() == 3) {
    for (std::size_t c = 0; c < 3; ++c) {
      const auto p = img.plane(c);
      auto out = l.plane(0);
      for (std::size_t i = 0; i < p.size(); ++i) out[i] += kLuma[c] * p[i];
    }
  } else {
    std::copy(img.plane(0).begin(), img.plane(0).end(), l.data());
  }
  return l;
}

Image luma_adjoint(const Image& grad, std::size_t channels) {
  Image g = Image::image(channels, grad.height(), grad.width());
  const auto src = grad.plane(0);
  if (channels == 3) {
    for (std::size_t c = 0; c < 3; ++c) {
      auto dst = g.plane(c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = kLuma[c] * src[i];
    }
  } else {
    std::copy(src.begin(), src.end(), g.plane(0).begin());
  }
  return g;
}

// Intermediate values shared by the forward map and its adjoint.
struct EdgeTrace {
  std::size_t h = 0, w = 0;
  std::vector<double> gx, gy, mag;
  double peak = 0.0;
  std::size_t peak_at = 0;
  double threshold = 0.0;
  std::size_t threshold_at = 0;
  bool flat = true;       // no gradient anywhere
  bool hard_step = false;  // threshold equals the peak
};

EdgeTrace trace_edges(const Image& img) {
  const Image smooth = binomial_blur(to_luma(img));
  EdgeTrace t;
  t.h = smooth.height();
  t.w = smooth.width();
  const std::size_t n = t.h * t.w;
  t.gx.resize(n);
  t.gy.resize(n);
  t.mag.resize(n);
  const auto s = smooth.plane(0);
  for (std::size_t y = 0; y < t.h; ++y) {
    const std::size_t yu = y == 0 ? 0 : y - 1, yd = std::min(y + 1, t.h - 1);
    for (std::size_t x = 0; x < t.w; ++x) {
      const std::size_t xl = x == 0 ? 0 : x - 1, xr = std::min(x + 1, t.w - 1);
      const std::size_t i = y * t.w + x;
      t.gx[i] = 0.5 * (s[y * t.w + xr] - s[y * t.w + xl]);
      t.gy[i] = 0.5 * (s[yd * t.w + x] - s[yu * t.w + x]);
      t.mag[i] = std::sqrt(t.gx[i] * t.gx[i] + t.gy[i] * t.gy[i] + kEps * kEps) - kEps;
    }
  }
  t.peak_at = static_cast<std::size_t>(std::max_element(t.mag.begin(), t.mag.end()) -
                                       t.mag.begin());
  t.peak = t.mag[t.peak_at];
  if (t.peak < 1e-12) return t;
  t.flat = false;

  // Nearest-rank percentile; ties resolved by pixel index for determinism.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(kPercentile * static_cast<double>(n))) - 1;
  std::nth_element(order.begin(), order.begin() + static_cast<long>(rank), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return t.mag[a] != t.mag[b] ? t.mag[a] < t.mag[b] : a < b;
                   });
  t.threshold_at = order[rank];
  t.threshold = t.mag[t.threshold_at] / t.peak;
  t.hard_step = 1.0 - t.threshold < 1e-12;
  return t;
}

}  // namespace

Image ReferenceEdgeDetector::detect(const Image& img) const {
  const EdgeTrace t = trace_edges(img);
  Image e = Image::image(1, t.h, t.w);
  if (t.flat) return e;
  for (std::size_t i = 0; i < t.mag.size(); ++i) {
    const double n = t.mag[i] / t.peak;
    if (t.hard_step) {
      e[i] = n >= 1.0 ? 1.0 : 0.0;
    } else {
      e[i] = std::clamp((n - t.threshold) / (1.0 - t.threshold), 0.0, 1.0);
    }
  }
  return e;
}

Image ReferenceEdgeDetector::backward(const Image& img, const Image& grad_edges) const {
  const EdgeTrace t = trace_edges(img);
  if (grad_edges.rank() != 3 || grad_edges.channels() != 1 || grad_edges.height() != t.h ||
      grad_edges.width() != t.w) {
    throw ContractError("edge detector backward: gradient must be a 1-channel map of the image size");
  }
  if (t.flat || t.hard_step) return Image(img.shape());

  const std::size_t n = t.mag.size();
  const double span = 1.0 - t.threshold;
  std::vector<double> dnorm(n, 0.0);
  double dthreshold = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = t.mag[i] / t.peak;
    const double e = (norm - t.threshold) / span;
    if (!(e > 0.0 && e < 1.0)) continue;
    dnorm[i] += grad_edges[i] / span;
    dthreshold += grad_edges[i] * (norm - 1.0) / (span * span);
  }
  dnorm[t.threshold_at] += dthreshold;

  std::vector<double> dmag(n);
  double dpeak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dmag[i] = dnorm[i] / t.peak;
    dpeak -= dnorm[i] * t.mag[i] / (t.peak * t.peak);
  }
  dmag[t.peak_at] += dpeak;

  Image dsmooth = Image::image(1, t.h, t.w);
  auto ds = dsmooth.plane(0);
  for (std::size_t y = 0; y < t.h; ++y) {
    const std::size_t yu = y == 0 ? 0 : y - 1, yd = std::min(y + 1, t.h - 1);
    for (std::size_t x = 0; x < t.w; ++x) {
      const std::size_t xl = x == 0 ? 0 : x - 1, xr = std::min(x + 1, t.w - 1);
      const std::size_t i = y * t.w + x;
      const double r = t.mag[i] + kEps;  // sqrt(gx^2 + gy^2 + eps^2)
      const double dgx = dmag[i] * t.gx[i] / r;
      const double dgy = dmag[i] * t.gy[i] / r;
      ds[y * t.w + xr] += 0.5 * dgx;
      ds[y * t.w + xl] -= 0.5 * dgx;
      ds[yd * t.w + x] += 0.5 * dgy;
      ds[yu * t.w + x] -= 0.5 * dgy;
    }
  }
  return luma_adjoint(binomial_blur_adjoint(dsmooth), img.channels());
}

}  // namespace easrn
