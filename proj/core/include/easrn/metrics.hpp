#pragma once

#include <limits>

#include "easrn/tensor.hpp"

namespace easrn {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) over all channels jointly, peak 1.
double psnr(const Image& a, const Image& b);

/// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1. Colour images are compared on
/// BT.601 luma. Both sides must be at least 11x11.
double ssim(const Image& a, const Image& b);

/// BT.601 luma for 3-channel images; the single plane otherwise.
Image luma(const Image& img);

}  // namespace easrn
