#include "easrn/pipeline/deblur.hpp"

#include "easrn/errors.hpp"
#include "easrn/graph/network.hpp"
#include "easrn/pipeline/image_io.hpp"

namespace easrn::pipeline {

namespace fs = std::filesystem;

Image deblur_image(const Image& blurred, const graph::GraphWeights& weights,
                   const graph::GraphConfig& config) {
  if (blurred.channels() != config.image_channels) {
    throw ConfigError("image has " + std::to_string(blurred.channels()) +
                      " channels but the weights expect " +
                      std::to_string(config.image_channels));
  }
  auto pass = graph::easrn_forward(blurred, weights, config);
  return pass.y(pass.scales() - 1);
}

DeblurResult run_deblur(const DeblurOptions& options) {
  const graph::GraphWeights weights = graph::read_weights(options.weights);
  graph::GraphConfig defaults;
  defaults.n_scales = options.scales;
  defaults.lrelu_slope = options.lrelu_slope;
  const graph::GraphConfig config = graph::infer_config(weights, defaults);
  weights.validate(config);

  std::vector<std::pair<fs::path, fs::path>> jobs;
  if (fs::is_directory(options.input)) {
    fs::create_directories(options.output);
    for (const auto& p : io::list_pngs(options.input)) jobs.emplace_back(p, options.output / p.filename());
    if (jobs.empty()) throw ConfigError("no PNG images in " + options.input.string());
  } else {
    if (options.output.has_parent_path()) fs::create_directories(options.output.parent_path());
    jobs.emplace_back(options.input, options.output);
  }
  if (options.dump_dir) fs::create_directories(*options.dump_dir);

  DeblurResult result;
  for (const auto& [in, out] : jobs) {
    try {
      const Image blurred = io::read_png(in);
      if (blurred.channels() != config.image_channels) {
        throw ConfigError("image has " + std::to_string(blurred.channels()) +
                          " channels but the weights expect " +
                          std::to_string(config.image_channels));
      }
      auto pass = graph::easrn_forward(blurred, weights, config);
      io::write_png(out, pass.y(pass.scales() - 1), options.bit_depth);
      result.written.push_back(out);
      if (options.dump_dir) {
        const std::string stem = in.stem().string();
        for (std::size_t i = 0; i < pass.scales(); ++i) {
          const std::string s = std::to_string(i + 1);
          io::write_png(*options.dump_dir / (stem + "_b" + s + ".png"), pass.b(i), options.bit_depth);
          io::write_png(*options.dump_dir / (stem + "_x" + s + ".png"), pass.x(i), options.bit_depth);
          io::write_png(*options.dump_dir / (stem + "_y" + s + ".png"), pass.y(i), options.bit_depth);
        }
      }
    } catch (const std::exception& e) {
      result.failures.push_back(in.string() + ": " + e.what());
    }
  }
  return result;
}

}  // namespace easrn::pipeline
