#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace easrn::pipeline {

struct PairScore {
  std::string name;
  bool ok = false;
  double psnr = 0.0;
  double ssim = 0.0;
  std::string error;
};

struct EvaluationReport {
  std::vector<PairScore> pairs;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;

  /// Machine-readable form; infinite PSNR is written as the string "inf".
  std::string to_json() const;
};

/// Pairs every PNG in pred_dir with the same filename in gt_dir. Throws
/// ConfigError when pred_dir holds no PNGs.
EvaluationReport evaluate_pairs(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& gt_dir);

}  // namespace easrn::pipeline
