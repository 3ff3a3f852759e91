// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//
//   acceptance [--cli <path to easrn>] [--work <scratch dir>]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "easrn/blur_synth.hpp"
#include "easrn/graph/network.hpp"
#include "easrn/graph/ops.hpp"
#include "easrn/losses.hpp"
#include "easrn/metrics.hpp"
#include "easrn/pipeline/dataset.hpp"
#include "easrn/pipeline/image_io.hpp"
#include "easrn/pipeline/manifest.hpp"
#include "support.hpp"

using namespace easrn;
using namespace easrn::graph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string cli_path;
fs::path work_dir;

// 1 ----------------------------------------------------------------------
Outcome convolution_oracle() {
  const auto t0 = Clock::now();
  double worst = kPsnrInfinity;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MotionConfig m;
    m.seed = 1000 + seed;
    const Trajectory traj = generate_trajectory(m);
    const Image crop = test::natural_like(3, 64, 64, seed);
    const Image blurred = synthesize_blur(crop, traj, 0.0, {0.0, 0}).blurred;
    const Image oracle = clip_dynamic_range(test::correlate_replicate(crop, test::splat_kernel(traj)));
    worst = std::min(worst, psnr(blurred, oracle));
  }
  const double dt = seconds_since(t0);
  return {worst > 45.0 && dt < 10.0,
          "min PSNR " + (std::isinf(worst) ? std::string("inf") : fmt("%.2f", worst)) +
              " dB over 20 seeds (> 45), " + fmt("%.2f", dt) + " s (< 10)"};
}

// 2 ----------------------------------------------------------------------
Outcome zero_motion_identity() {
  const Image sharp = test::natural_like(3, 64, 64, 7);
  const Trajectory zero{std::vector<Displacement>(100)};
  const double d = max_abs_diff(synthesize_blur(sharp, zero, 0.0, {0.0, 3}).blurred, sharp);
  return {d < 1e-6, "max |blurred - sharp| = " + fmt("%.3g", d) + " (< 1e-6)"};
}

// 3 ----------------------------------------------------------------------
Outcome flow_bound() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MotionConfig m;
    m.seed = seed;
    m.max_shift = 30.0;
    for (const auto& s : generate_trajectory(m).samples)
      worst = std::max(worst, trajectory_to_flow(s, 0.0, 4, 4).max_extent());
  }
  return {worst <= 30.0, "max flow " + fmt("%.4f", worst) + " px over 100 trajectories (<= 30)"};
}

// 4 ----------------------------------------------------------------------
Outcome saturation_guarantee() {
  const fs::path in = work_dir / "c4_in";
  fs::create_directories(in);
  for (int i = 0; i < 4; ++i)
    io::write_png(in / ("s" + std::to_string(i) + ".png"), test::natural_like(3, 96, 90, 40 + i));
  pipeline::DatasetPolicy p;
  p.input_dir = in;
  p.out_dir = work_dir / "c4_out";
  p.seed = 4;
  p.crops_per_image = 5;
  p.crop_size = 64;
  p.oe_fraction = 1.0;
  const auto s = pipeline::generate_dataset(p);
  std::size_t good = 0;
  for (const auto& r : s.records) good += r.ok && r.sharp_preclip_max > 1.0 && r.streak_region_clipped;
  return {s.failed == 0 && good == s.records.size() && good == 20,
          std::to_string(good) + "/" + std::to_string(s.records.size()) +
              " pairs log pre-clip > 1 and clipped 1.0 in the streak region"};
}

// 5 ----------------------------------------------------------------------
Outcome residual_identity() {
  const GraphConfig cfg;
  const Image img = test::natural_like(3, 64, 48, 5);
  const auto pass = easrn_forward(img, GraphWeights::zeros(cfg), cfg);
  bool ok = pass.scales() == 3;
  for (std::size_t i = 0; ok && i < 3; ++i) ok = pass.y(i) == pass.b(i);
  return {ok, "zero weights: y_i == b_i bit-exact at " + std::to_string(pass.scales()) + " scales"};
}

// 6 ----------------------------------------------------------------------
Tensor away_from_zero(Tensor t, double gap = 1e-2) {
  for (auto& v : t.values())
    if (std::abs(v) < gap) v = v < 0 ? -gap - std::abs(v) : gap + v;
  return t;
}

Outcome gradient_checks() {
  using test::check_gradient;
  using test::dot;
  using test::random_tensor;
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, double>> errs;
  auto record = [&](const std::string& name, const test::GradCheck& g) {
    errs.emplace_back(name, g.max_rel_error);
  };

  const Tensor x = away_from_zero(random_tensor({3, 8, 7}, 1));
  const Tensor w = random_tensor({3, 3, 3, 4}, 2), b = random_tensor({4}, 3);
  const Tensor rc = random_tensor({4, 8, 7}, 4);
  record("conv", check_gradient([&](const Tensor& t) { return dot(rc, conv2d(t, w, b)); }, x,
                                conv2d_backward(x, w, rc).input, 50, 11));

  const Tensor rd = random_tensor({4, 16, 14}, 5);
  record("deconv", check_gradient([&](const Tensor& t) { return dot(rd, deconv2x(t, w, b)); }, x,
                                  deconv2x_backward(x, w, rd).input, 50, 12));

  const auto pooled = maxpool2x(x);
  const Tensor rp = random_tensor(pooled.output.shape(), 6);
  record("pool", check_gradient([&](const Tensor& t) { return dot(rp, maxpool2x(t).output); }, x,
                                maxpool2x_backward(rp, pooled.argmax, x.shape()), 50, 13));

  const Tensor rl = random_tensor(x.shape(), 7);
  record("lrelu", check_gradient([&](const Tensor& t) { return dot(rl, lrelu(t, 0.2)); }, x,
                                 lrelu_backward(x, rl, 0.2), 50, 14));

  GraphConfig cfg;
  cfg.base_channels = 1;
  const auto weights = GraphWeights::he_normal(cfg, 8);
  auto block_grad = [&](const std::string& what, const Tensor& input, auto apply) {
    const Tensor r = random_tensor(input.shape(), 9);
    GraphBuilder g(weights, cfg, false);
    const Var in = g.tape().leaf(input);
    const Var out = apply(g, in);
    const std::pair<Var, Tensor> seed{out, r};
    g.tape().backward(std::span(&seed, 1));
    auto f = [&](const Tensor& t) {
      GraphBuilder h(weights, cfg, false);
      return dot(r, h.tape().value(apply(h, h.tape().constant(t))));
    };
    record(what, check_gradient(f, input, g.tape().grad(in), 50, 15));
  };
  block_grad("res-in-res", random_tensor({1, 8, 8}, 16), [](GraphBuilder& g, Var v) {
    return g.res_in_res("deblur.enc0.rir", v);
  });
  block_grad("inception", random_tensor({8, 6, 6}, 17), [](GraphBuilder& g, Var v) {
    return g.inception("deblur.inception", v);
  });

  const Pyramid y = decompose(test::random_image(3, 24, 20, 18), 3);
  const Pyramid gt = decompose(test::random_image(3, 24, 20, 19), 3);
  const ReferenceEdgeDetector det;
  const ReferenceFeatureExtractor fx(3);
  auto with_finest = [&](const Tensor& t) {
    Pyramid p = y;
    p.levels.back() = t;
    return p;
  };
  record("fidelity loss", check_gradient([&](const Tensor& t) { return fidelity_loss(with_finest(t), gt).value; },
                                         y.finest(), fidelity_loss(y, gt).grad.back(), 50, 20));
  record("SED loss", check_gradient([&](const Tensor& t) { return sed_loss(t, gt.finest(), det, 2.4).value; },
                                    y.finest(), sed_loss(y.finest(), gt.finest(), det, 2.4).grad[0], 50, 21));
  record("perceptual+TV loss",
         check_gradient([&](const Tensor& t) {
           return perceptual_tv_loss(with_finest(t), gt, fx, 0.05, 0.8).value;
         }, y.finest(), perceptual_tv_loss(y, gt, fx, 0.05, 0.8).grad.back(), 50, 22));

  const double dt = seconds_since(t0);
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& [name, e] : errs) {
    worst = std::max(worst, e);
    os << name << " " << fmt("%.1e", e) << ", ";
  }
  return {worst < 1e-3 && dt < 60.0 && errs.size() == 9,
          os.str() + "max " + fmt("%.1e", worst) + " (< 1e-3), " + fmt("%.2f", dt) + " s (< 60)"};
}

// 7 ----------------------------------------------------------------------
Outcome loss_algebra() {
  std::vector<std::string> failed;
  const Pyramid y = decompose(test::random_image(3, 32, 32, 30), 3);
  const Pyramid g = decompose(test::random_image(3, 32, 32, 31), 3);
  const auto b = evaluate_losses(y, g, ReferenceEdgeDetector{}, ReferenceFeatureExtractor(3), LossWeights{});
  if (!(b.total == b.fidelity + b.sed + b.detail && total_loss(b.fidelity, b.sed, b.detail) == b.total))
    failed.push_back("additivity");

  Pyramid q = y;
  for (auto& level : q.levels)
    for (auto& v : level.values()) v = std::round(v * 256) / 256;
  Pyramid shifted = q;
  for (auto& level : shifted.levels)
    for (auto& v : level.values()) v += 0.125;
  if (fidelity_loss(shifted, q).value != 0.125) failed.push_back("constant offset");

  if (total_variation(Image::image(3, 17, 9, 0.6)) != 0.0) failed.push_back("TV of constant");

  struct Thresholder final : EdgeDetector {
    Image detect(const Image& img) const override {
      Image e = Image::image(1, img.height(), img.width());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = img.plane(0)[i] > 0.5 ? 1.0 : 0.0;
      return e;
    }
    Image backward(const Image& img, const Image&) const override {
      return Image::image(img.channels(), img.height(), img.width());
    }
  };
  if (sed_loss(y.finest(), y.finest(), ReferenceEdgeDetector{}, 2.4).value != 0.0 ||
      sed_loss(y.finest(), y.finest(), Thresholder{}, 2.4).value != 0.0)
    failed.push_back("SED identity");

  const LossWeights d;
  const LossWeights back = LossWeights::from_json(d.to_json());
  if (!(d.sed == 2.4 && d.perceptual == 3e-6 && d.tv == 0.8 && back == d))
    failed.push_back("default weights");
  return {failed.empty(), failed.empty()
                              ? "additivity exact; offset 0.125 exact; TV(const)=0; SED(a,a)=0 for 2 "
                                "detectors; w_s=2.4 w_p=3e-6 w_t=0.8 round-trip"
                              : "failed: " + failed.front()};
}

// 8 ----------------------------------------------------------------------
Outcome metrics() {
  const Image a = Image::image(3, 32, 32, 0.2), b = Image::image(3, 32, 32, 0.3);
  const double p = psnr(a, b);
  bool ok = std::abs(p - 20.0) <= 0.01;
  const Image n = test::natural_like(3, 40, 40, 9);
  ok = ok && ssim(n, n) == 1.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Image u = test::random_image(3, 24, 24, 100 + s), v = test::random_image(3, 24, 24, 200 + s);
    ok = ok && psnr(u, v) == psnr(v, u) && ssim(u, v) == ssim(v, u);
  }
  return {ok, "psnr(offset 0.1) = " + fmt("%.6f", p) + " dB; ssim(a,a) = " + fmt("%.17g", ssim(n, n)) +
                  "; symmetric on 20 pairs"};
}

// 9 ----------------------------------------------------------------------
std::map<std::string, std::vector<std::uint8_t>> snapshot(const fs::path& dir) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = io::read_bytes(e.path());
  return files;
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome determinism() {
  const fs::path in = work_dir / "c9_in", out = work_dir / "c9_out";
  fs::create_directories(in);
  for (int i = 0; i < 3; ++i)
    io::write_png(in / ("img" + std::to_string(i) + ".png"), test::natural_like(3, 80, 72, 90 + i));
  std::map<std::string, std::vector<std::uint8_t>> first, second;
  std::string via;
  if (!cli_path.empty()) {
    via = "via CLI";
    const std::string gen = cli_path + " gen --input-dir " + in.string() + " --out-dir " + out.string() +
                            " --seed 9 --count 3 --crop 64 --oe-fraction 0.5 --max-shift 12";
    if (run(gen) != 0) return {false, "first gen run failed"};
    first = snapshot(out);
    fs::remove_all(out);
    if (run(gen) != 0) return {false, "second gen run failed"};
    second = snapshot(out);
    if (run(cli_path + " replay --manifest " + (out / "manifest.jsonl").string()) != 0)
      return {false, "replay reported mismatches"};
  } else {
    via = "in-process";
    pipeline::DatasetPolicy p;
    p.input_dir = in;
    p.out_dir = out;
    p.seed = 9;
    p.crops_per_image = 3;
    p.crop_size = 64;
    p.oe_fraction = 0.5;
    p.motion.max_shift = 12;
    pipeline::generate_dataset(p);
    first = snapshot(out);
    fs::remove_all(out);
    pipeline::generate_dataset(p);
    second = snapshot(out);
  }
  const auto r = pipeline::replay_manifest(out / "manifest.jsonl");
  const bool same = first == second && first.size() == 19;
  return {same && r.matched == 9 && r.mismatched == 0,
          std::string(same ? "byte-identical" : "DIFFERENT") + " datasets+manifests (" +
              std::to_string(first.size()) + " files, " + via + "); replay matched " +
              std::to_string(r.matched) + "/9"};
}

// 10 ---------------------------------------------------------------------
Outcome shape_closure() {
  const GraphConfig cfg;
  const auto w = GraphWeights::he_normal(cfg, 10);
  const std::size_t sizes[] = {16, 100, 255, 512};
  std::size_t ok = 0, total = 0;
  std::string bad;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t h : {sizes[i], sizes[(i + 1) % 4]}) {
      const std::size_t wd = sizes[i];
      ++total;
      try {
        const auto pass = easrn_forward(test::random_image(3, h, wd, h * 7 + wd), w, cfg);
        const Pyramid p = decompose(Image::image(3, h, wd), 3);
        bool fine = pass.y(2).height() == h && pass.y(2).width() == wd && pass.y(2).all_finite();
        for (std::size_t s = 0; s < 3; ++s) fine = fine && pass.y(s).shape() == p.levels[s].shape();
        if (fine) ++ok;
        else bad += " " + std::to_string(h) + "x" + std::to_string(wd);
      } catch (const std::exception& e) {
        bad += " " + std::to_string(h) + "x" + std::to_string(wd) + "(" + e.what() + ")";
      }
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " sizes from {16,100,255,512} (square and non-square) keep dims" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli_path = argv[i + 1];
    else if (flag == "--work") work_dir = argv[i + 1];
  }
  if (work_dir.empty()) work_dir = fs::temp_directory_path() / "easrn_acceptance";
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"blur vs kernel-convolution oracle", convolution_oracle},
      {"zero-motion identity", zero_motion_identity},
      {"flow bound", flow_bound},
      {"saturation guarantee", saturation_guarantee},
      {"residual identity", residual_identity},
      {"gradient checks", gradient_checks},
      {"loss algebra", loss_algebra},
      {"metrics", metrics},
      {"determinism", determinism},
      {"shape closure", shape_closure},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
