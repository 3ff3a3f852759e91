#pragma once

#include <vector>

#include "easrn/tensor.hpp"

namespace easrn {

/// Gaussian pyramid. levels[0] is the coarsest scale (i = 1), levels.back()
/// the full-resolution source (i = N).
struct Pyramid {
  std::vector<Image> levels;

  std::size_t size() const { return levels.size(); }
  const Image& finest() const { return levels.back(); }
};

/// Reflect-101 index into [0, n), repeated for offsets larger than n.
long reflect101(long i, long n);

/// 5-tap binomial [1 4 6 4 1]/16 blur, separable, reflect-101 borders.
Image binomial_blur(const Image& img);
/// Adjoint of binomial_blur (used for gradients).
Image binomial_blur_adjoint(const Image& grad);

/// Blur then keep even rows/columns: (h, w) -> (ceil(h/2), ceil(w/2)).
Image pyr_down(const Image& img);
Image pyr_down_adjoint(const Image& grad, std::size_t fine_height, std::size_t fine_width);

/// Bilinear 2x enlargement to (out_height, out_width), which must be 2h or
/// 2h - 1 (likewise for width). Output pixel p samples coarse position p / 2,
/// so coarse pixel j lands on the fine pixel 2j it was decimated from.
Image upsample2x(const Image& img, std::size_t out_height, std::size_t out_width);
/// Convenience overload: output is exactly twice the size.
Image upsample2x(const Image& img);
Image upsample2x_adjoint(const Image& grad, std::size_t in_height, std::size_t in_width);

/// Throws ConfigError if the image is smaller than 2^(levels-1) on either axis.
Pyramid decompose(const Image& img, int levels);

}  // namespace easrn
