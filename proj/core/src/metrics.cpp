#include "easrn/metrics.hpp"

#include <array>
#include <cmath>

#include "easrn/errors.hpp"

namespace easrn {

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b, "psnr");
  if (a.empty()) throw ContractError("psnr: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(1.0 / mse);
}

Image luma(const Image& img) {
  require_rank(img, 3, "luma");
  if (img.channels() != 3) {
    Image l = Image::image(1, img.height(), img.width());
    std::copy(img.plane(0).begin(), img.plane(0).end(), l.data());
    return l;
  }
  Image l = Image::image(1, img.height(), img.width());
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = 0.299 * img.plane(0)[i] + 0.587 * img.plane(1)[i] + 0.114 * img.plane(2)[i];
  }
  return l;
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    g[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable 'valid' Gaussian filter of a single plane.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h, std::size_t w) {
  static const auto g = gaussian_window();
  const std::size_t oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> tmp(h * ow), out(oh * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * src[y * w + x + k];
      tmp[y * ow + x] = acc;
    }
  }
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += g[k] * tmp[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kWindow || a.width() < kWindow) {
    throw ContractError("ssim: images must be at least 11x11");
  }
  const Image la = luma(a), lb = luma(b);
  const std::size_t h = la.height(), w = la.width(), n = h * w;
  std::vector<double> pa(la.data(), la.data() + n), pb(lb.data(), lb.data() + n);
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = pa[i] * pa[i];
    bb[i] = pb[i] * pb[i];
    ab[i] = pa[i] * pb[i];
  }
  const auto mu_a = filter_valid(pa, h, w), mu_b = filter_valid(pb, h, w);
  const auto e_aa = filter_valid(aa, h, w), e_bb = filter_valid(bb, h, w);
  const auto e_ab = filter_valid(ab, h, w);

  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

}  // namespace easrn
