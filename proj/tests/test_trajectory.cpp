#include <gtest/gtest.h>

#include "easrn/errors.hpp"
#include "easrn/trajectory.hpp"

using namespace easrn;

namespace {

MotionConfig config(std::uint64_t seed, int samples = 100, double max_shift = 30.0) {
  MotionConfig c;
  c.seed = seed;
  c.num_samples = samples;
  c.max_shift = max_shift;
  return c;
}

}  // namespace

TEST(Trajectory, SingleSampleIsStartPose) {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const auto t = generate_trajectory(config(seed, 1));
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.samples[0], (Displacement{0, 0}));
  }
}

TEST(Trajectory, ZeroVarianceWalkStaysAtOrigin) {
  auto c = config(5, 10);
  c.step_sigma = 0.0;
  c.impulse_prob = 0.0;
  const auto t = generate_trajectory(c);
  ASSERT_EQ(t.size(), 10u);
  for (const auto& s : t.samples) EXPECT_EQ(s, (Displacement{0, 0}));
}

TEST(Trajectory, BoundHoldsAtSeven) {
  const auto t = generate_trajectory(config(7, 200, 30.0));
  ASSERT_EQ(t.size(), 200u);
  EXPECT_EQ(t.samples[0], (Displacement{0, 0}));
  EXPECT_LE(t.max_extent(), 30.0);
  EXPECT_GT(t.max_extent(), 0.0);
}

TEST(Trajectory, BoundHoldsOverManySeeds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double bound = 1.0 + static_cast<double>(seed % 40);
    const auto t = generate_trajectory(config(seed, 60, bound));
    for (const auto& s : t.samples) {
      ASSERT_LE(std::max(std::abs(s.dx), std::abs(s.dy)), bound) << "seed " << seed;
    }
  }
}

TEST(Trajectory, DeterministicPerSeed) {
  EXPECT_EQ(generate_trajectory(config(42)), generate_trajectory(config(42)));
  EXPECT_NE(generate_trajectory(config(42)), generate_trajectory(config(43)));
}

TEST(Trajectory, MarkovSuffixReproducedFromMidWalkState) {
  auto c = config(11);
  TrajectoryWalker walker(c);
  for (int i = 0; i < 37; ++i) walker.step();
  TrajectoryWalker fork = walker;
  for (int i = 0; i < 63; ++i) {
    const auto a = walker.step();
    const auto b = fork.step();
    ASSERT_EQ(a, b) << "step " << i;
  }
  EXPECT_EQ(walker.velocity(), fork.velocity());
}

TEST(Trajectory, WalkFollowsPositionVelocityRecurrence) {
  // p' - p is the new velocity: positions are the running sum of velocities.
  auto c = config(3);
  TrajectoryWalker w(c);
  for (int i = 0; i < 50; ++i) {
    const auto p0 = w.position();
    const auto p1 = w.step();
    EXPECT_NEAR(p1.dx - p0.dx, w.velocity().dx, 1e-12);
    EXPECT_NEAR(p1.dy - p0.dy, w.velocity().dy, 1e-12);
  }
}

TEST(Rescale, ZeroTrajectoryUnchanged) {
  Trajectory t{{{0, 0}, {0, 0}, {0, 0}}};
  EXPECT_EQ(rescale_trajectory(t, 30.0), t);
}

TEST(Rescale, HalvesWhenExtentIsTwiceTheBound) {
  Trajectory t{{{0, 0}, {60, -10}, {20, 45}, {-3, 7}}};
  const auto r = rescale_trajectory(t, 30.0);
  ASSERT_EQ(r.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.samples[i].dx, t.samples[i].dx / 2);
    EXPECT_DOUBLE_EQ(r.samples[i].dy, t.samples[i].dy / 2);
  }
  EXPECT_DOUBLE_EQ(r.max_extent(), 30.0);
}

TEST(Rescale, NonBindingBoundLeavesTrajectory) {
  Trajectory t{{{0, 0}, {12, -4}, {-6, 11.5}}};
  EXPECT_EQ(rescale_trajectory(t, 30.0), t);
}

TEST(Rescale, UsesMaxNormNotEuclidean) {
  // (30, 30) has L2 norm 42.4 but is already within a 30 px per-axis bound.
  Trajectory t{{{0, 0}, {30, 30}}};
  EXPECT_EQ(rescale_trajectory(t, 30.0), t);
}

TEST(Trajectory, FlattenRoundTrip) {
  const auto t = generate_trajectory(config(9, 17));
  const auto flat = flatten(t);
  ASSERT_EQ(flat.size(), 34u);
  EXPECT_EQ(flat[2], t.samples[1].dx);
  EXPECT_EQ(flat[3], t.samples[1].dy);
  EXPECT_EQ(unflatten(flat), t);
}

TEST(Trajectory, MeanAndExtent) {
  Trajectory t{{{0, 0}, {2, -4}, {4, 1}}};
  EXPECT_DOUBLE_EQ(t.mean().dx, 2.0);
  EXPECT_DOUBLE_EQ(t.mean().dy, -1.0);
  EXPECT_DOUBLE_EQ(t.max_extent(), 4.0);
}

TEST(MotionConfig, RejectsInvalidFields) {
  auto bad = [](auto mutate) {
    MotionConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(generate_trajectory(bad([](MotionConfig& c) { c.num_samples = 0; })), ConfigError);
  EXPECT_THROW(generate_trajectory(bad([](MotionConfig& c) { c.step_sigma = -1; })), ConfigError);
  EXPECT_THROW(generate_trajectory(bad([](MotionConfig& c) { c.max_shift = 0; })), ConfigError);
  EXPECT_THROW(generate_trajectory(bad([](MotionConfig& c) { c.impulse_prob = 1.5; })),
               ConfigError);
  EXPECT_NO_THROW(generate_trajectory(bad([](MotionConfig& c) { c.impulse_prob = 1.0; })));
}
