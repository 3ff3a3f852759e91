#include "easrn/blur_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "easrn/errors.hpp"

namespace easrn {

namespace {

long clamp_index(long i, long n) { return std::clamp(i, 0L, n - 1); }

}  // namespace

double FlowField::max_extent() const {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max({m, std::abs(u[i]), std::abs(v[i])});
  return m;
}

FlowField trajectory_to_flow(Displacement sample, double rotation_deg, std::size_t height,
                             std::size_t width) {
  if (height == 0 || width == 0) throw ContractError("trajectory_to_flow: empty dimensions");
  FlowField flow{height, width, std::vector<double>(height * width),
                 std::vector<double>(height * width)};
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cx = (static_cast<double>(width) - 1.0) / 2.0;
  const double cy = (static_cast<double>(height) - 1.0) / 2.0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      if (theta == 0.0) {
        flow.u[i] = sample.dx;
        flow.v[i] = sample.dy;
        continue;
      }
      const double px = static_cast<double>(x) - cx;
      const double py = static_cast<double>(y) - cy;
      flow.u[i] = (c * px - s * py) - px + sample.dx;
      flow.v[i] = (s * px + c * py) - py + sample.dy;
    }
  }
  return flow;
}

Image warp_image(const Image& img, const FlowField& flow) {
  require_rank(img, 3, "warp_image");
  if (flow.height != img.height() || flow.width != img.width()) {
    throw ContractError("warp_image: flow is " + std::to_string(flow.height) + "x" +
                        std::to_string(flow.width) + " but image is " +
                        std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  Image out(img.shape());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y * w + x);
      const double sx = static_cast<double>(x) + flow.u[i];
      const double sy = static_cast<double>(y) + flow.v[i];
      const double fx = std::floor(sx);
      const double fy = std::floor(sy);
      const double ax = sx - fx;
      const double ay = sy - fy;
      // Clamp the integer taps, not the coordinate, so the warp is exactly a
      // bilinear-splatted kernel applied with edge replication.
      const long x0 = clamp_index(static_cast<long>(fx), w);
      const long x1 = clamp_index(static_cast<long>(fx) + 1, w);
      const long y0 = clamp_index(static_cast<long>(fy), h);
      const long y1 = clamp_index(static_cast<long>(fy) + 1, h);
      const double w00 = (1 - ax) * (1 - ay), w01 = ax * (1 - ay);
      const double w10 = (1 - ax) * ay, w11 = ax * ay;
      for (std::size_t c = 0; c < img.channels(); ++c) {
        const auto p = img.plane(c);
        out.at(c, y, x) = w00 * p[y0 * w + x0] + w01 * p[y0 * w + x1] +
                          w10 * p[y1 * w + x0] + w11 * p[y1 * w + x1];
      }
    }
  }
  return out;
}

Image shift_image(const Image& img, long dx, long dy) {
  require_rank(img, 3, "shift_image");
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  Image out(img.shape());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        out.at(c, y, x) = img.at(c, clamp_index(y + dy, h), clamp_index(x + dx, w));
      }
    }
  }
  return out;
}

double rotation_at(std::size_t t, std::size_t num_samples, double rotation_per_sample) {
  const double mid = (static_cast<double>(num_samples) - 1.0) / 2.0;
  return (static_cast<double>(t) - mid) * rotation_per_sample;
}

Image accumulate_blur(const Image& sharp, const Trajectory& trajectory,
                      double rotation_per_sample) {
  require_rank(sharp, 3, "accumulate_blur");
  if (trajectory.empty()) throw ContractError("accumulate_blur: empty trajectory");
  Image acc(sharp.shape());
  const std::size_t n = trajectory.size();
  for (std::size_t t = 0; t < n; ++t) {
    const double angle = rotation_at(t, n, rotation_per_sample);
    acc += warp_image(sharp,
                      trajectory_to_flow(trajectory.samples[t], angle, sharp.height(),
                                         sharp.width()));
  }
  acc *= 1.0 / static_cast<double>(n);
  return acc;
}

Image add_noise(const Image& img, const NoiseConfig& noise) {
  if (noise.sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (noise.sigma == 0.0) return img;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, noise.sigma);
  Image out = img;
  for (double& v : out.values()) v += normal(rng);
  return out;
}

Image clip_dynamic_range(const Image& img) {
  Image out = img;
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

RegistrationShift registration_shift(const Trajectory& trajectory) {
  const Displacement m = trajectory.mean();
  return {std::lround(m.dx), std::lround(m.dy)};
}

BlurPair synthesize_blur(const Image& sharp, const Trajectory& trajectory,
                         double rotation_per_sample, const NoiseConfig& noise) {
  if (trajectory.empty()) throw ContractError("synthesize_blur: empty trajectory");
  BlurPair pair;
  Image pre = add_noise(accumulate_blur(sharp, trajectory, rotation_per_sample), noise);
  pair.blurred_preclip_max = *std::max_element(pre.values().begin(), pre.values().end());
  pair.blurred = clip_dynamic_range(pre);
  const RegistrationShift shift = registration_shift(trajectory);
  pair.registered_sharp = clip_dynamic_range(shift_image(sharp, shift.dx, shift.dy));
  return pair;
}

}  // namespace easrn
