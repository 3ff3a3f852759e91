#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace easrn {

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
  bool operator==(const Displacement&) const = default;
};

/// Time-ordered camera (or light-source) displacements relative to the start
/// pose, in pixels. samples[0] is always (0, 0).
struct Trajectory {
  std::vector<Displacement> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  /// max over samples of max(|dx|, |dy|)
  double max_extent() const;
  Displacement mean() const;
  bool operator==(const Trajectory&) const = default;
};

struct MotionConfig {
  int num_samples = 100;
  double max_shift = 30.0;
  double step_sigma = 0.5;
  double centripetal_gain = 0.02;
  double impulse_prob = 0.05;
  std::uint64_t seed = 0;

  /// Throws ConfigError if any field is out of range.
  void validate() const;
};

/// Second-order random walk over (position, velocity).
///
///   v' = v + N(0, step_sigma^2) - centripetal_gain * p  [+ N(0, (5 step_sigma)^2) w.p. impulse_prob]
///   p' = p + v'
///
/// The whole state, including the engine and the distributions' cached
/// variates, lives in the object, so a copy taken mid-walk reproduces the
/// remainder exactly.
class TrajectoryWalker {
 public:
  explicit TrajectoryWalker(const MotionConfig& config);

  Displacement position() const { return position_; }
  Displacement velocity() const { return velocity_; }
  Displacement step();

 private:
  double step_sigma_;
  double centripetal_gain_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::bernoulli_distribution impulse_;
  Displacement position_;
  Displacement velocity_;
};

/// Runs the walker for num_samples - 1 steps and rescales to max_shift.
Trajectory generate_trajectory(const MotionConfig& config);

/// Uniformly scales so the max-norm extent is min(current extent, max_shift).
Trajectory rescale_trajectory(const Trajectory& trajectory, double max_shift);

/// Flattens to [dx0, dy0, dx1, dy1, ...] for manifests.
std::vector<double> flatten(const Trajectory& trajectory);
Trajectory unflatten(const std::vector<double>& flat);

}  // namespace easrn
