#pragma once

#include <cstdint>

#include "easrn/tensor.hpp"
#include "easrn/trajectory.hpp"

namespace easrn {

/// Per-pixel backward displacement (u, v) in pixels at one time sample.
/// warp_image reads the source at (x + u, y + v).
struct FlowField {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> u;
  std::vector<double> v;

  /// Largest max(|u|, |v|) over the field.
  double max_extent() const;
};

struct NoiseConfig {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Rigid in-plane motion of pixel p about the image centre c:
/// flow(p) = R(rotation_deg) (p - c) + c + d - p. Pure translation when the
/// angle is zero.
FlowField trajectory_to_flow(Displacement sample, double rotation_deg, std::size_t height,
                             std::size_t width);

/// Bilinear backward warp; out-of-range taps clamp to the nearest edge pixel.
Image warp_image(const Image& img, const FlowField& flow);

/// Shift by whole pixels: out(x, y) = img(x + dx, y + dy), edge replicated.
Image shift_image(const Image& img, long dx, long dy);

/// Rotation angle of sample t in a T-sample exposure. Centred on the middle
/// of the exposure so the mean rotation is zero.
double rotation_at(std::size_t t, std::size_t num_samples, double rotation_per_sample);

/// Mean over t of warp(sharp, flow_t), before noise and clipping. Values may
/// exceed 1 when the sharp image carries light sources.
Image accumulate_blur(const Image& sharp, const Trajectory& trajectory,
                      double rotation_per_sample = 0.0);

/// i.i.d. zero-mean Gaussian noise per pixel and channel.
Image add_noise(const Image& img, const NoiseConfig& noise);

/// Clamp to [0, 1].
Image clip_dynamic_range(const Image& img);

/// Whole-pixel registration offset of a trajectory: its rounded mean.
struct RegistrationShift {
  long dx = 0;
  long dy = 0;
};
RegistrationShift registration_shift(const Trajectory& trajectory);

struct BlurPair {
  Image blurred;
  Image registered_sharp;
  double blurred_preclip_max = 0.0;
};

/// Full pair synthesis: blurred = clip(accumulate_blur + noise); the ground
/// truth is the sharp image shifted by the trajectory centroid, then clipped.
BlurPair synthesize_blur(const Image& sharp, const Trajectory& trajectory,
                         double rotation_per_sample, const NoiseConfig& noise);

}  // namespace easrn
