#include <benchmark/benchmark.h>

#include <random>

#include "easrn/blur_synth.hpp"
#include "easrn/graph/network.hpp"
#include "easrn/graph/ops.hpp"
#include "easrn/losses.hpp"
#include "easrn/streaks.hpp"

using namespace easrn;

namespace {

Tensor noise(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// One blurred/sharp pair per iteration: streak printing, T-sample accumulation,
// noise, clipping, registration.
void BM_SynthesizePair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Image sharp = noise({3, n, n}, 1);
  MotionConfig m;
  m.seed = 2;
  const Trajectory traj = generate_trajectory(m);
  StreakConfig sc;
  sc.seed = 3;
  for (auto _ : state) {
    const auto printed = print_light_sources(sharp, sc);
    benchmark::DoNotOptimize(synthesize_blur(printed.image, traj, 0.0, {0.01, 4}));
  }
  state.SetItemsProcessed(state.iterations());
  state.counters["px/s"] = benchmark::Counter(static_cast<double>(n * n) * state.iterations(),
                                              benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SynthesizePair)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Conv3x3(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const Tensor x = noise({c, 64, 64}, 5), w = noise({3, 3, c, c}, 6), b = noise({c}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(graph::conv2d(x, w, b));
  state.counters["MAC/s"] = benchmark::Counter(9.0 * c * c * 64 * 64 * state.iterations(),
                                               benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Conv3x3)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ConvBackward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const Tensor x = noise({c, 64, 64}, 8), w = noise({3, 3, c, c}, 9), g = noise({c, 64, 64}, 10);
  for (auto _ : state) benchmark::DoNotOptimize(graph::conv2d_backward(x, w, g));
}
BENCHMARK(BM_ConvBackward)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EasrnForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  graph::GraphConfig cfg;
  cfg.base_channels = static_cast<std::size_t>(state.range(1));
  const auto w = graph::GraphWeights::he_normal(cfg, 11);
  const Image img = noise({3, n, n}, 12);
  for (auto _ : state) benchmark::DoNotOptimize(graph::easrn_forward(img, w, cfg).outputs());
}
BENCHMARK(BM_EasrnForward)->Args({64, 4})->Args({128, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);

void BM_EasrnForwardBackward(benchmark::State& state) {
  graph::GraphConfig cfg;
  const auto w = graph::GraphWeights::he_normal(cfg, 13);
  const Image img = noise({3, 64, 64}, 14);
  const Pyramid truth = decompose(noise({3, 64, 64}, 15), 3);
  const ReferenceEdgeDetector det;
  const ReferenceFeatureExtractor fx(3);
  for (auto _ : state) {
    auto pass = graph::easrn_forward(img, w, cfg, true);
    Pyramid y{pass.outputs()};
    const auto losses = evaluate_losses(y, truth, det, fx, LossWeights{});
    benchmark::DoNotOptimize(pass.backward(losses.grad));
  }
}
BENCHMARK(BM_EasrnForwardBackward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
