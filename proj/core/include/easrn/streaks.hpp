#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "easrn/tensor.hpp"
#include "easrn/trajectory.hpp"

namespace easrn {

/// A saturated light source to be printed into a sharp image.
struct LightSource {
  Tensor patch;                     // (1, size, size), unit peak
  std::vector<double> intensities;  // one multiplier per image channel, each >= 1
  long x = 0;                       // top-left anchor
  long y = 0;
  std::uint64_t shape_seed = 0;     // regenerates `patch` via make_source_shape
};

struct StreakConfig {
  int count_min = 2;
  int count_max = 20;
  double intensity_min = 1.0;
  double intensity_max = 10.0;
  std::size_t shape_size = 17;
  int shape_samples = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Bilinear splat of the trajectory, started at the patch centre, normalized
/// to unit peak. Throws ContractError if a sample falls outside the patch.
Tensor render_source_shape(const Trajectory& trajectory, std::size_t size);

/// Random shape from a bounded walk seeded with `shape_seed`.
Tensor make_source_shape(std::uint64_t shape_seed, std::size_t size, int samples);

/// Draws count, shapes, positions and per-channel intensities.
std::vector<LightSource> plan_light_sources(std::size_t channels, std::size_t height,
                                            std::size_t width, const StreakConfig& cfg);

/// Additive composite; the parts of a patch that fall outside the image are dropped.
Image composite_light_sources(const Image& sharp, std::span<const LightSource> sources);

struct PrintResult {
  Image image;
  std::vector<LightSource> sources;
};

/// plan + composite. The result may exceed 1; clipping happens later.
PrintResult print_light_sources(const Image& sharp, const StreakConfig& cfg);

}  // namespace easrn
