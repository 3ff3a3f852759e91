#include "easrn/pipeline/evaluate.hpp"

#include <cmath>

#include "easrn/errors.hpp"
#include "easrn/metrics.hpp"
#include "easrn/pipeline/image_io.hpp"
#include "json.hpp"

namespace easrn::pipeline {

namespace {

nlohmann::json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string EvaluationReport::to_json() const {
  nlohmann::json pairs_json = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json j{{"name", p.name}, {"ok", p.ok}};
    if (p.ok) {
      j["psnr"] = number(p.psnr);
      j["ssim"] = p.ssim;
    } else {
      j["error"] = p.error;
    }
    pairs_json.push_back(std::move(j));
  }
  nlohmann::json j{{"evaluated", evaluated},
                   {"failed", failed},
                   {"mean_psnr", number(mean_psnr)},
                   {"mean_ssim", mean_ssim},
                   {"pairs", pairs_json}};
  return j.dump(2);
}

EvaluationReport evaluate_pairs(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& gt_dir) {
  const auto preds = io::list_pngs(pred_dir);
  if (preds.empty()) throw ConfigError("no image pairs: " + pred_dir.string() + " holds no PNGs");
  EvaluationReport report;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (const auto& pred : preds) {
    PairScore s;
    s.name = pred.filename().string();
    try {
      const Image a = io::read_png(pred);
      const Image b = io::read_png(gt_dir / pred.filename());
      s.psnr = psnr(a, b);
      s.ssim = ssim(a, b);
      s.ok = true;
      psnr_sum += s.psnr;
      ssim_sum += s.ssim;
      ++report.evaluated;
    } catch (const std::exception& e) {
      s.error = e.what();
      ++report.failed;
    }
    report.pairs.push_back(std::move(s));
  }
  if (report.evaluated > 0) {
    report.mean_psnr = psnr_sum / static_cast<double>(report.evaluated);
    report.mean_ssim = ssim_sum / static_cast<double>(report.evaluated);
  }
  return report;
}

}  // namespace easrn::pipeline
