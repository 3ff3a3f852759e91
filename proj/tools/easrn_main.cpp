// easrn: dataset synthesis, scale-recurrent deblurring and pair evaluation.
//
// Exit codes: 0 success, 1 some items failed, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "easrn/errors.hpp"
#include "easrn/graph/weights.hpp"
#include "easrn/pipeline/dataset.hpp"
#include "easrn/pipeline/deblur.hpp"
#include "easrn/pipeline/evaluate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfig = 2;

namespace pl = easrn::pipeline;

int cmd_gen(pl::DatasetPolicy& policy, bool resume) {
  const auto summary = pl::generate_dataset(policy, resume);
  for (const auto& r : summary.records) {
    if (!r.ok) std::cerr << "item " << r.plan.index << " (" << r.plan.source << "): " << r.error << "\n";
  }
  std::cout << "generated " << summary.ok << " pairs";
  if (summary.reused) std::cout << " (" << summary.reused << " reused)";
  if (summary.failed) std::cout << ", " << summary.failed << " failed";
  std::cout << " -> " << (policy.out_dir / "manifest.jsonl").string() << "\n";
  return summary.failed ? kPartial : kOk;
}

int cmd_replay(const std::string& manifest, const std::string& input_dir,
               const std::string& out_dir) {
  const auto s = pl::replay_manifest(
      manifest, input_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(input_dir),
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir));
  for (const auto& p : s.problems) std::cerr << p << "\n";
  std::cout << "replayed " << s.matched << " matching, " << s.mismatched << " mismatched, "
            << s.skipped << " skipped\n";
  return s.mismatched ? kPartial : kOk;
}

int cmd_deblur(const pl::DeblurOptions& options) {
  const auto r = pl::run_deblur(options);
  for (const auto& f : r.failures) std::cerr << f << "\n";
  std::cout << "restored " << r.written.size() << " image(s)\n";
  return r.failures.empty() ? kOk : kPartial;
}

int cmd_eval(const std::string& pred, const std::string& gt, const std::string& report_path) {
  const auto report = pl::evaluate_pairs(pred, gt);
  const std::string text = report.to_json();
  if (report_path.empty() || report_path == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream f(report_path);
    if (!f) throw easrn::IoError("cannot write " + report_path);
    f << text << "\n";
    std::cout << "evaluated " << report.evaluated << " pairs: mean PSNR " << report.mean_psnr
              << " dB, mean SSIM " << report.mean_ssim << "\n";
  }
  for (const auto& p : report.pairs) {
    if (!p.ok) std::cerr << p.name << ": " << p.error << "\n";
  }
  return report.failed ? kPartial : kOk;
}

int cmd_init_weights(const std::string& out, std::size_t base, std::size_t channels,
                     std::uint64_t seed, bool zero) {
  easrn::graph::GraphConfig config;
  config.base_channels = base;
  config.image_channels = channels;
  const auto w = zero ? easrn::graph::GraphWeights::zeros(config)
                      : easrn::graph::GraphWeights::he_normal(config, seed);
  easrn::graph::write_weights(out, w);
  std::cout << "wrote " << w.size() << " tensors (" << easrn::graph::parameter_count(config)
            << " parameters) to " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EASRN toolkit: blur-pair synthesis, multiscale deblurring, evaluation"};
  app.require_subcommand(1);

  pl::DatasetPolicy policy;
  bool resume = false;
  std::string input_dir, out_dir;
  auto* gen = app.add_subcommand("gen", "Synthesize blurred/sharp pairs with light-source outliers");
  gen->add_option("--input-dir", input_dir, "Directory of sharp source PNGs")->required();
  gen->add_option("--out-dir", out_dir, "Output directory")->required();
  gen->add_option("--seed", policy.seed, "Master seed");
  gen->add_option("--count", policy.crops_per_image, "Crops per source image");
  gen->add_option("--oe-fraction", policy.oe_fraction, "Fraction of pairs with printed light sources");
  gen->add_option("--max-shift", policy.motion.max_shift, "Maximum per-axis shift in pixels");
  gen->add_option("--sigma-max", policy.sigma_max, "Upper bound of the noise standard deviation");
  gen->add_option("--crop", policy.crop_size, "Square crop size in pixels");
  gen->add_option("--scales", policy.scales, "Pyramid depth the crops must support");
  gen->add_option("--samples", policy.motion.num_samples, "Trajectory samples per exposure");
  gen->add_option("--max-roll", policy.max_rotation_per_sample,
                  "Bound on in-plane rotation per trajectory sample, degrees");
  gen->add_option("--bit-depth", policy.bit_depth, "PNG bit depth (8 or 16)");
  gen->add_option("--jobs", policy.jobs, "Worker threads (0 = all cores)");
  gen->add_flag("!--no-flip", policy.flips, "Disable random horizontal flips");
  gen->add_flag("!--no-gamma", policy.gamma, "Disable random gamma");
  gen->add_flag("--resume", resume, "Keep intact items from an interrupted run");

  std::string manifest, replay_input, replay_out;
  auto* replay = app.add_subcommand("replay", "Re-render a manifest and verify its checksums");
  replay->add_option("--manifest", manifest, "manifest.jsonl to replay")->required();
  replay->add_option("--input-dir", replay_input, "Override the recorded source directory");
  replay->add_option("--out-dir", replay_out, "Also write the replayed pairs here");

  pl::DeblurOptions deblur_opts;
  std::string weights_path, input, output, dump;
  auto* deblur = app.add_subcommand("deblur", "Restore images with a weight file");
  deblur->add_option("--weights", weights_path, "EASRNW1 weight file")->required();
  deblur->add_option("--input", input, "Blurred PNG or directory")->required();
  deblur->add_option("--output", output, "Output PNG or directory")->required();
  deblur->add_option("--dump-intermediates", dump, "Directory for per-scale b_i, x_i, y_i");
  deblur->add_option("--scales", deblur_opts.scales, "Number of pyramid scales");
  deblur->add_option("--bit-depth", deblur_opts.bit_depth, "PNG bit depth (8 or 16)");

  std::string pred_dir, gt_dir, report;
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM of restored images against ground truth");
  eval->add_option("--pred-dir", pred_dir, "Restored images")->required();
  eval->add_option("--gt-dir", gt_dir, "Ground-truth images (same filenames)")->required();
  eval->add_option("--report", report, "JSON report path ('-' for stdout)");

  std::string init_out;
  std::size_t init_base = 4, init_channels = 3;
  std::uint64_t init_seed = 0;
  bool init_zero = false;
  auto* init = app.add_subcommand("init-weights", "Write a weight file for the graph");
  init->add_option("--output", init_out, "Destination file")->required();
  init->add_option("--base-channels", init_base, "Stem width (32 = published plan)");
  init->add_option("--image-channels", init_channels, "Image channels");
  init->add_option("--seed", init_seed, "Initialisation seed");
  init->add_flag("--zero", init_zero, "All-zero weights (identity network)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) {
      policy.input_dir = input_dir;
      policy.out_dir = out_dir;
      return cmd_gen(policy, resume);
    }
    if (*replay) return cmd_replay(manifest, replay_input, replay_out);
    if (*deblur) {
      deblur_opts.weights = weights_path;
      deblur_opts.input = input;
      deblur_opts.output = output;
      if (!dump.empty()) deblur_opts.dump_dir = dump;
      return cmd_deblur(deblur_opts);
    }
    if (*eval) return cmd_eval(pred_dir, gt_dir, report);
    if (*init) return cmd_init_weights(init_out, init_base, init_channels, init_seed, init_zero);
  } catch (const easrn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const easrn::ContractError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
