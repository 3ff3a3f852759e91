#include "easrn/pyramid.hpp"

#include <array>
#include <string>

#include "easrn/errors.hpp"

namespace easrn {

namespace {

constexpr std::array<double, 5> kBinomial = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

// One separable pass along x (axis 0) or y (axis 1). `adjoint` scatters
// instead of gathers.
Image binomial_pass(const Image& img, int axis, bool adjoint) {
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  Image out(img.shape());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    auto dst = out.plane(c);
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        const double v = src[y * w + x];
        double acc = 0.0;
        for (int k = -2; k <= 2; ++k) {
          const long sx = axis == 0 ? reflect101(x + k, w) : x;
          const long sy = axis == 1 ? reflect101(y + k, h) : y;
          if (adjoint) {
            dst[sy * w + sx] += kBinomial[k + 2] * v;
          } else {
            acc += kBinomial[k + 2] * src[sy * w + sx];
          }
        }
        if (!adjoint) dst[y * w + x] = acc;
      }
    }
  }
  return out;
}

}  // namespace

long reflect101(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Image binomial_blur(const Image& img) {
  require_rank(img, 3, "binomial_blur");
  return binomial_pass(binomial_pass(img, 0, false), 1, false);
}

Image binomial_blur_adjoint(const Image& grad) {
  require_rank(grad, 3, "binomial_blur_adjoint");
  return binomial_pass(binomial_pass(grad, 1, true), 0, true);
}

Image pyr_down(const Image& img) {
  const Image blurred = binomial_blur(img);
  const std::size_t h = (img.height() + 1) / 2;
  const std::size_t w = (img.width() + 1) / 2;
  Image out = Image::image(img.channels(), h, w);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out.at(c, y, x) = blurred.at(c, 2 * y, 2 * x);
    }
  }
  return out;
}

Image pyr_down_adjoint(const Image& grad, std::size_t fine_height, std::size_t fine_width) {
  require_rank(grad, 3, "pyr_down_adjoint");
  if (grad.height() != (fine_height + 1) / 2 || grad.width() != (fine_width + 1) / 2) {
    throw ContractError("pyr_down_adjoint: gradient size does not match the fine level");
  }
  Image up = Image::image(grad.channels(), fine_height, fine_width);
  for (std::size_t c = 0; c < grad.channels(); ++c) {
    for (std::size_t y = 0; y < grad.height(); ++y) {
      for (std::size_t x = 0; x < grad.width(); ++x) up.at(c, 2 * y, 2 * x) = grad.at(c, y, x);
    }
  }
  return binomial_blur_adjoint(up);
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// p/2 on the coarse grid, clamped at the last coarse sample.
Tap coarse_tap(std::size_t p, std::size_t n) {
  const std::size_t lo = p / 2;
  if (p % 2 == 0 || lo + 1 >= n) return {std::min(lo, n - 1), std::min(lo, n - 1), 0.0};
  return {lo, lo + 1, 0.5};
}

void check_upsample_dims(std::size_t in, std::size_t out, const char* axis) {
  if (out != 2 * in && out + 1 != 2 * in) {
    throw ContractError(std::string("upsample2x: ") + axis + " " + std::to_string(out) +
                        " is not 2x of " + std::to_string(in) + " (or one less)");
  }
}

}  // namespace

Image upsample2x(const Image& img, std::size_t out_height, std::size_t out_width) {
  require_rank(img, 3, "upsample2x");
  check_upsample_dims(img.height(), out_height, "height");
  check_upsample_dims(img.width(), out_width, "width");
  Image out = Image::image(img.channels(), out_height, out_width);
  for (std::size_t y = 0; y < out_height; ++y) {
    const Tap ty = coarse_tap(y, img.height());
    for (std::size_t x = 0; x < out_width; ++x) {
      const Tap tx = coarse_tap(x, img.width());
      for (std::size_t c = 0; c < img.channels(); ++c) {
        const double top = (1 - tx.frac) * img.at(c, ty.lo, tx.lo) + tx.frac * img.at(c, ty.lo, tx.hi);
        const double bot = (1 - tx.frac) * img.at(c, ty.hi, tx.lo) + tx.frac * img.at(c, ty.hi, tx.hi);
        out.at(c, y, x) = (1 - ty.frac) * top + ty.frac * bot;
      }
    }
  }
  return out;
}

Image upsample2x(const Image& img) { return upsample2x(img, 2 * img.height(), 2 * img.width()); }

Image upsample2x_adjoint(const Image& grad, std::size_t in_height, std::size_t in_width) {
  require_rank(grad, 3, "upsample2x_adjoint");
  check_upsample_dims(in_height, grad.height(), "height");
  check_upsample_dims(in_width, grad.width(), "width");
  Image out = Image::image(grad.channels(), in_height, in_width);
  for (std::size_t y = 0; y < grad.height(); ++y) {
    const Tap ty = coarse_tap(y, in_height);
    for (std::size_t x = 0; x < grad.width(); ++x) {
      const Tap tx = coarse_tap(x, in_width);
      for (std::size_t c = 0; c < grad.channels(); ++c) {
        const double g = grad.at(c, y, x);
        out.at(c, ty.lo, tx.lo) += (1 - ty.frac) * (1 - tx.frac) * g;
        out.at(c, ty.lo, tx.hi) += (1 - ty.frac) * tx.frac * g;
        out.at(c, ty.hi, tx.lo) += ty.frac * (1 - tx.frac) * g;
        out.at(c, ty.hi, tx.hi) += ty.frac * tx.frac * g;
      }
    }
  }
  return out;
}

Pyramid decompose(const Image& img, int levels) {
  require_rank(img, 3, "decompose");
  if (levels < 1) throw ConfigError("pyramid: levels must be >= 1");
  const std::size_t min_dim = std::size_t{1} << (levels - 1);
  if (img.height() < min_dim || img.width() < min_dim) {
    throw ConfigError("pyramid: " + std::to_string(img.height()) + "x" +
                      std::to_string(img.width()) + " image is too small for " +
                      std::to_string(levels) + " levels (needs >= " + std::to_string(min_dim) +
                      ")");
  }
  Pyramid p;
  p.levels.resize(static_cast<std::size_t>(levels));
  p.levels.back() = img;
  for (int i = levels - 2; i >= 0; --i) {
    p.levels[static_cast<std::size_t>(i)] = pyr_down(p.levels[static_cast<std::size_t>(i) + 1]);
  }
  return p;
}

}  // namespace easrn
