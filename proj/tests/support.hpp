#pragma once
// Independent reference implementations and helpers shared by the test suites.
// Nothing here calls into the library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "easrn/tensor.hpp"
#include "easrn/trajectory.hpp"

namespace easrn::test {

inline Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

inline Image random_image(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  return random_tensor({c, h, w}, seed, 0.0, 1.0);
}

/// Smooth band-limited texture with a few sharp edges, values in [0, 1].
inline Image natural_like(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img = Image::image(c, h, w);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double fx[4], fy[4], ph[4], amp[4];
    for (int k = 0; k < 4; ++k) {
      fx[k] = 0.02 + 0.25 * u(rng);
      fy[k] = 0.02 + 0.25 * u(rng);
      ph[k] = 6.283 * u(rng);
      amp[k] = 0.1 * u(rng);
    }
    const double edge_x = static_cast<double>(w) * (0.3 + 0.4 * u(rng));
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double v = 0.45;
        for (int k = 0; k < 4; ++k) v += amp[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        if (static_cast<double>(x) > edge_x) v += 0.15;
        img.at(ch, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return img;
}

/// Splats displacements onto an offset grid: kernel[(dy + r) * (2r + 1) + (dx + r)].
struct SplatKernel {
  long radius = 0;
  std::vector<double> taps;
  double at(long dy, long dx) const {
    return taps[static_cast<std::size_t>((dy + radius) * (2 * radius + 1) + dx + radius)];
  }
};

inline SplatKernel splat_kernel(const Trajectory& traj) {
  SplatKernel k;
  k.radius = static_cast<long>(std::ceil(traj.max_extent())) + 1;
  const long n = 2 * k.radius + 1;
  k.taps.assign(static_cast<std::size_t>(n * n), 0.0);
  const double w = 1.0 / static_cast<double>(traj.size());
  for (const auto& s : traj.samples) {
    const double fx = std::floor(s.dx), fy = std::floor(s.dy);
    const double ax = s.dx - fx, ay = s.dy - fy;
    const long x0 = static_cast<long>(fx) + k.radius, y0 = static_cast<long>(fy) + k.radius;
    k.taps[static_cast<std::size_t>(y0 * n + x0)] += w * (1 - ax) * (1 - ay);
    k.taps[static_cast<std::size_t>(y0 * n + x0 + 1)] += w * ax * (1 - ay);
    k.taps[static_cast<std::size_t>((y0 + 1) * n + x0)] += w * (1 - ax) * ay;
    k.taps[static_cast<std::size_t>((y0 + 1) * n + x0 + 1)] += w * ax * ay;
  }
  return k;
}

/// out(p) = sum_q K(q) img(clamp(p + q)): the blur a translating camera produces
/// when the scene is read at p + d_t.
inline Image correlate_replicate(const Image& img, const SplatKernel& k) {
  struct Tap {
    long dy, dx;
    double w;
  };
  std::vector<Tap> taps;
  for (long dy = -k.radius; dy <= k.radius; ++dy)
    for (long dx = -k.radius; dx <= k.radius; ++dx)
      if (k.at(dy, dx) != 0.0) taps.push_back({dy, dx, k.at(dy, dx)});
  Image out = Image::image(img.channels(), img.height(), img.width());
  const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) {
        double acc = 0.0;
        for (const Tap& t : taps) {
          const long sy = std::clamp(y + t.dy, 0L, h - 1), sx = std::clamp(x + t.dx, 0L, w - 1);
          acc += t.w * img.at(c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
        }
        out.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
      }
  return out;
}

/// Direct "same" convolution with zero padding, filters (k, k, cin, cout).
inline Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, int stride = 1) {
  const long k = static_cast<long>(w.shape()[0]);
  const std::size_t cin = w.shape()[2], cout = w.shape()[3];
  const long h = static_cast<long>(x.height()), wd = static_cast<long>(x.width());
  const long oh = (h + stride - 1) / stride, ow = (wd + stride - 1) / stride;
  Tensor out({cout, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  for (std::size_t co = 0; co < cout; ++co)
    for (long oy = 0; oy < oh; ++oy)
      for (long ox = 0; ox < ow; ++ox) {
        double acc = b[co];
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (long ky = 0; ky < k; ++ky)
            for (long kx = 0; kx < k; ++kx) {
              const long iy = oy * stride + ky - k / 2, ix = ox * stride + kx - k / 2;
              if (iy < 0 || ix < 0 || iy >= h || ix >= wd) continue;
              const std::size_t widx =
                  ((static_cast<std::size_t>(ky) * k + kx) * cin + ci) * cout + co;
              acc += w[widx] * x.at(ci, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
            }
        out.at(co, static_cast<std::size_t>(oy), static_cast<std::size_t>(ox)) = acc;
      }
  return out;
}

/// Mean squared error by a plain double loop.
inline double naive_mse(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c)
    for (std::size_t y = 0; y < a.height(); ++y)
      for (std::size_t x = 0; x < a.width(); ++x) {
        const double d = a.at(c, y, x) - b.at(c, y, x);
        s += d * d;
      }
  return s / static_cast<double>(a.size());
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
};

/// Compares analytic[i] with a central difference of f at `probes` random
/// coordinates of x. The relative error denominator is floored at `floor`.
inline GradCheck check_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x,
                                const Tensor& analytic, std::size_t probes, std::uint64_t seed,
                                double step = 1e-6, double floor = 1e-6) {
  GradCheck r;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  Tensor probe = x;
  for (std::size_t p = 0; p < probes; ++p) {
    const std::size_t i = pick(rng);
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = f(probe);
    probe[i] = orig - step;
    const double down = f(probe);
    probe[i] = orig;
    const double numeric = (up - down) / (2 * step);
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    r.max_rel_error = std::max(r.max_rel_error, std::abs(a - numeric) / denom);
    ++r.probes;
  }
  return r;
}

/// <a, b> over all elements.
inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("easrn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace easrn::test
