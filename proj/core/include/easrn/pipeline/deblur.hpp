#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "easrn/graph/weights.hpp"
#include "easrn/tensor.hpp"

namespace easrn::pipeline {

struct DeblurOptions {
  std::filesystem::path weights;
  std::filesystem::path input;   // PNG file or directory of PNGs
  std::filesystem::path output;  // file (single input) or directory
  std::optional<std::filesystem::path> dump_dir;  // b_i, x_i, y_i per scale
  int scales = 3;
  double lrelu_slope = 0.2;
  int bit_depth = 8;
};

struct DeblurResult {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> failures;  // "<input>: <reason>"
};

/// Loads and validates the weight file (ContractError names the first bad
/// entry), then restores every input. Per-image failures are collected.
DeblurResult run_deblur(const DeblurOptions& options);

/// In-memory variant returning y_N.
Image deblur_image(const Image& blurred, const graph::GraphWeights& weights,
                   const graph::GraphConfig& config);

}  // namespace easrn::pipeline
