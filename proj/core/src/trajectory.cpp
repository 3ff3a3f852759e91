#include "easrn/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "easrn/errors.hpp"

namespace easrn {

double Trajectory::max_extent() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max({m, std::abs(s.dx), std::abs(s.dy)});
  return m;
}

Displacement Trajectory::mean() const {
  if (samples.empty()) throw ContractError("mean of an empty trajectory");
  Displacement acc;
  for (const auto& s : samples) {
    acc.dx += s.dx;
    acc.dy += s.dy;
  }
  const double n = static_cast<double>(samples.size());
  return {acc.dx / n, acc.dy / n};
}

void MotionConfig::validate() const {
  if (num_samples < 1) throw ConfigError("motion: num_samples must be >= 1");
  if (!(max_shift > 0.0)) throw ConfigError("motion: max_shift must be > 0");
  if (!(step_sigma >= 0.0)) throw ConfigError("motion: step_sigma must be >= 0");
  if (!(impulse_prob >= 0.0 && impulse_prob <= 1.0)) {
    throw ConfigError("motion: impulse_prob must lie in [0, 1]");
  }
  if (!std::isfinite(centripetal_gain)) throw ConfigError("motion: centripetal_gain must be finite");
}

TrajectoryWalker::TrajectoryWalker(const MotionConfig& config)
    : step_sigma_(config.step_sigma),
      centripetal_gain_(config.centripetal_gain),
      rng_(config.seed),
      impulse_(config.impulse_prob) {
  config.validate();
}

Displacement TrajectoryWalker::step() {
  // Draw order is fixed: x, y, impulse flag, then (if set) kick x, kick y.
  double ax = step_sigma_ * normal_(rng_) - centripetal_gain_ * position_.dx;
  double ay = step_sigma_ * normal_(rng_) - centripetal_gain_ * position_.dy;
  if (impulse_(rng_)) {
    ax += 5.0 * step_sigma_ * normal_(rng_);
    ay += 5.0 * step_sigma_ * normal_(rng_);
  }
  velocity_.dx += ax;
  velocity_.dy += ay;
  position_.dx += velocity_.dx;
  position_.dy += velocity_.dy;
  return position_;
}

Trajectory generate_trajectory(const MotionConfig& config) {
  config.validate();
  TrajectoryWalker walker(config);
  Trajectory raw;
  raw.samples.reserve(static_cast<std::size_t>(config.num_samples));
  raw.samples.push_back({0.0, 0.0});
  for (int t = 1; t < config.num_samples; ++t) raw.samples.push_back(walker.step());
  return rescale_trajectory(raw, config.max_shift);
}

Trajectory rescale_trajectory(const Trajectory& trajectory, double max_shift) {
  const double extent = trajectory.max_extent();
  if (extent <= max_shift || extent == 0.0) return trajectory;
  const double scale = max_shift / extent;
  Trajectory out = trajectory;
  for (auto& s : out.samples) {
    s.dx *= scale;
    s.dy *= scale;
    // Guard against the scaled extent landing one ulp above the bound.
    s.dx = std::clamp(s.dx, -max_shift, max_shift);
    s.dy = std::clamp(s.dy, -max_shift, max_shift);
  }
  return out;
}

std::vector<double> flatten(const Trajectory& trajectory) {
  std::vector<double> flat;
  flat.reserve(trajectory.size() * 2);
  for (const auto& s : trajectory.samples) {
    flat.push_back(s.dx);
    flat.push_back(s.dy);
  }
  return flat;
}

Trajectory unflatten(const std::vector<double>& flat) {
  if (flat.size() % 2 != 0) throw ContractError("trajectory list must have an even length");
  Trajectory t;
  for (std::size_t i = 0; i < flat.size(); i += 2) t.samples.push_back({flat[i], flat[i + 1]});
  return t;
}

}  // namespace easrn
