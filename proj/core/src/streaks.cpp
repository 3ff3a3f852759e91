#include "easrn/streaks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "easrn/errors.hpp"

namespace easrn {

void StreakConfig::validate() const {
  if (count_min < 0 || count_max < count_min) throw ConfigError("streaks: bad count range");
  if (!(intensity_min >= 1.0) || intensity_max < intensity_min) {
    throw ConfigError("streaks: intensities must satisfy 1 <= min <= max");
  }
  if (shape_size < 1) throw ConfigError("streaks: shape_size must be >= 1");
  if (shape_samples < 1) throw ConfigError("streaks: shape_samples must be >= 1");
}

Tensor render_source_shape(const Trajectory& trajectory, std::size_t size) {
  if (trajectory.empty()) throw ContractError("render_source_shape: empty trajectory");
  Tensor patch = Tensor::image(1, size, size);
  const double centre = static_cast<double>((size - 1) / 2);
  const long n = static_cast<long>(size);
  auto splat = [&](long x, long y, double w) {
    if (w == 0.0) return;
    if (x < 0 || y < 0 || x >= n || y >= n) {
      throw ContractError("render_source_shape: trajectory does not fit the patch");
    }
    patch.at(0, y, x) += w;
  };
  for (const auto& s : trajectory.samples) {
    const double px = centre + s.dx;
    const double py = centre + s.dy;
    const double fx = std::floor(px), fy = std::floor(py);
    const double ax = px - fx, ay = py - fy;
    const long x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
    splat(x0, y0, (1 - ax) * (1 - ay));
    splat(x0 + 1, y0, ax * (1 - ay));
    splat(x0, y0 + 1, (1 - ax) * ay);
    splat(x0 + 1, y0 + 1, ax * ay);
  }
  const double peak = patch.max_abs();
  patch *= 1.0 / peak;
  return patch;
}

Tensor make_source_shape(std::uint64_t shape_seed, std::size_t size, int samples) {
  MotionConfig motion;
  motion.num_samples = samples;
  // One pixel of slack for the bilinear footprint.
  motion.max_shift = std::max(0.5, static_cast<double>((size - 1) / 2) - 1.0);
  motion.seed = shape_seed;
  return render_source_shape(generate_trajectory(motion), size);
}

std::vector<LightSource> plan_light_sources(std::size_t channels, std::size_t height,
                                            std::size_t width, const StreakConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> count_dist(cfg.count_min, cfg.count_max);
  const long size = static_cast<long>(cfg.shape_size);
  std::uniform_int_distribution<long> x_dist(0, std::max(0L, static_cast<long>(width) - size));
  std::uniform_int_distribution<long> y_dist(0, std::max(0L, static_cast<long>(height) - size));
  std::uniform_real_distribution<double> intensity(cfg.intensity_min, cfg.intensity_max);

  const int count = count_dist(rng);
  std::vector<LightSource> sources;
  sources.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    LightSource s;
    s.shape_seed = rng();
    s.x = x_dist(rng);
    s.y = y_dist(rng);
    for (std::size_t c = 0; c < channels; ++c) s.intensities.push_back(intensity(rng));
    s.patch = make_source_shape(s.shape_seed, cfg.shape_size, cfg.shape_samples);
    sources.push_back(std::move(s));
  }
  return sources;
}

Image composite_light_sources(const Image& sharp, std::span<const LightSource> sources) {
  require_rank(sharp, 3, "composite_light_sources");
  Image out = sharp;
  const long h = static_cast<long>(sharp.height());
  const long w = static_cast<long>(sharp.width());
  for (const auto& s : sources) {
    if (s.intensities.size() != sharp.channels()) {
      throw ContractError("light source has " + std::to_string(s.intensities.size()) +
                          " intensities for a " + std::to_string(sharp.channels()) +
                          "-channel image");
    }
    const long size = static_cast<long>(s.patch.height());
    for (long py = 0; py < size; ++py) {
      const long y = s.y + py;
      if (y < 0 || y >= h) continue;
      for (long px = 0; px < size; ++px) {
        const long x = s.x + px;
        if (x < 0 || x >= w) continue;
        const double shape = s.patch.at(0, py, px);
        for (std::size_t c = 0; c < sharp.channels(); ++c) {
          out.at(c, y, x) += s.intensities[c] * shape;
        }
      }
    }
  }
  return out;
}

PrintResult print_light_sources(const Image& sharp, const StreakConfig& cfg) {
  require_rank(sharp, 3, "print_light_sources");
  PrintResult r;
  r.sources = plan_light_sources(sharp.channels(), sharp.height(), sharp.width(), cfg);
  r.image = composite_light_sources(sharp, r.sources);
  return r;
}

}  // namespace easrn
