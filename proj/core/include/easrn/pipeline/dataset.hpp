#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "easrn/streaks.hpp"
#include "easrn/tensor.hpp"
#include "easrn/trajectory.hpp"

namespace easrn::pipeline {

/// Everything that determines a generated dataset.
struct DatasetPolicy {
  std::filesystem::path input_dir;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int crops_per_image = 1;
  std::size_t crop_size = 512;
  bool flips = true;
  bool gamma = true;
  double gamma_min = 0.8;
  double gamma_max = 1.25;
  double oe_fraction = 1.0 / 3.0;
  StreakConfig streaks;  // seed is drawn per item
  MotionConfig motion;   // seed is drawn per item
  double max_rotation_per_sample = 0.0;  // degrees; 0 = translation only
  double sigma_max = 0.02;
  int scales = 3;
  int bit_depth = 8;
  int jobs = 0;  // 0 = hardware concurrency; does not affect the output

  void validate() const;
};

struct SourceRecord {
  long x = 0;
  long y = 0;
  std::uint64_t shape_seed = 0;
  std::vector<double> intensities;
};

/// All random decisions for one output pair.
struct ItemPlan {
  std::size_t index = 0;
  std::string source;  // filename inside input_dir
  std::uint64_t seed = 0;
  std::size_t crop_x = 0;
  std::size_t crop_y = 0;
  bool flip = false;
  double gamma = 1.0;
  bool light_sources = false;
  std::vector<SourceRecord> sources;
  Trajectory trajectory;
  double rotation_per_sample = 0.0;
  double sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

struct ItemRecord {
  ItemPlan plan;
  bool ok = false;
  std::string error;
  std::string blurred_path;  // relative to out_dir
  std::string sharp_path;
  std::string blurred_sha256;
  std::string sharp_sha256;
  double sharp_preclip_max = 0.0;
  double blurred_preclip_max = 0.0;
  std::size_t saturated_pixels = 0;  // sharp pixels above 1 before clipping
  bool streak_region_clipped = false;  // ground truth reaches 1.0 inside a source box
};

struct RenderedPair {
  Image blurred;
  Image sharp;
  double sharp_preclip_max = 0.0;
  double blurred_preclip_max = 0.0;
  std::size_t saturated_pixels = 0;
  bool streak_region_clipped = false;
};

/// splitmix64 finaliser; used to derive independent per-item seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t item_seed(std::uint64_t master, std::size_t index);

/// Draws the plan for item `index` cut from a source of the given size.
ItemPlan plan_item(const DatasetPolicy& policy, std::size_t index, const std::string& source,
                   std::size_t source_height, std::size_t source_width,
                   std::size_t source_channels = 3);

/// Deterministic rendering of a plan: crop, flip, gamma, light sources, blur,
/// noise, clip, register.
RenderedPair render_item(const Image& source, const ItemPlan& plan, const DatasetPolicy& policy);

struct GenerationSummary {
  std::vector<ItemRecord> records;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t reused = 0;  // items kept from a previous partial run
};

/// Writes blurred/NNNNNN.png, sharp/NNNNNN.png and manifest.jsonl under
/// policy.out_dir. Per-item failures are recorded and the run continues.
/// With `resume`, intact items from an interrupted run are kept.
GenerationSummary generate_dataset(const DatasetPolicy& policy, bool resume = false);

struct ReplaySummary {
  std::size_t matched = 0;
  std::size_t mismatched = 0;
  std::size_t skipped = 0;  // failed items in the manifest
  std::vector<std::string> problems;
};

/// Re-renders each recorded plan and compares checksums with the manifest.
/// When `out_dir` is set the replayed files are also written there.
ReplaySummary replay_manifest(const std::filesystem::path& manifest,
                              std::optional<std::filesystem::path> input_dir = std::nullopt,
                              std::optional<std::filesystem::path> out_dir = std::nullopt);

}  // namespace easrn::pipeline
