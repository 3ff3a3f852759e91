#include "easrn/pipeline/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "easrn/blur_synth.hpp"
#include "easrn/errors.hpp"
#include "easrn/pipeline/image_io.hpp"
#include "easrn/pipeline/manifest.hpp"

namespace easrn::pipeline {

namespace fs = std::filesystem;

void DatasetPolicy::validate() const {
  if (crops_per_image < 1) throw ConfigError("--count must be >= 1");
  if (scales < 1) throw ConfigError("--scales must be >= 1");
  if (crop_size < (std::size_t{1} << (scales - 1))) {
    throw ConfigError("--crop must be at least 2^(scales-1) = " +
                      std::to_string(std::size_t{1} << (scales - 1)));
  }
  if (!(oe_fraction >= 0.0 && oe_fraction <= 1.0)) {
    throw ConfigError("--oe-fraction must lie in [0, 1]");
  }
  if (!(sigma_max >= 0.0)) throw ConfigError("--sigma-max must be >= 0");
  if (!(gamma_min > 0.0 && gamma_max >= gamma_min)) throw ConfigError("bad gamma range");
  if (!(max_rotation_per_sample >= 0.0)) throw ConfigError("rotation bound must be >= 0");
  if (bit_depth != 8 && bit_depth != 16) throw ConfigError("--bit-depth must be 8 or 16");
  motion.validate();
  streaks.validate();
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t item_seed(std::uint64_t master, std::size_t index) {
  return mix_seed(master ^ mix_seed(static_cast<std::uint64_t>(index)));
}

namespace {

Image crop_flip_gamma(const Image& source, const ItemPlan& plan, const DatasetPolicy& policy) {
  const std::size_t n = policy.crop_size;
  if (source.height() < plan.crop_y + n || source.width() < plan.crop_x + n) {
    throw IoError("source " + std::to_string(source.width()) + "x" +
                  std::to_string(source.height()) + " is smaller than the " + std::to_string(n) +
                  "px crop");
  }
  Image out = Image::image(source.channels(), n, n);
  for (std::size_t c = 0; c < source.channels(); ++c) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t sx = plan.flip ? plan.crop_x + n - 1 - x : plan.crop_x + x;
        double v = source.at(c, plan.crop_y + y, sx);
        if (plan.gamma != 1.0) v = std::pow(v, plan.gamma);
        out.at(c, y, x) = v;
      }
    }
  }
  return out;
}

std::vector<LightSource> materialise(const ItemPlan& plan, const DatasetPolicy& policy) {
  std::vector<LightSource> out;
  for (const auto& r : plan.sources) {
    LightSource s;
    s.x = r.x;
    s.y = r.y;
    s.shape_seed = r.shape_seed;
    s.intensities = r.intensities;
    s.patch = make_source_shape(r.shape_seed, policy.streaks.shape_size,
                                policy.streaks.shape_samples);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ItemPlan plan_item(const DatasetPolicy& policy, std::size_t index, const std::string& source,
                   std::size_t source_height, std::size_t source_width,
                   std::size_t source_channels) {
  ItemPlan p;
  p.index = index;
  p.source = source;
  p.seed = item_seed(policy.seed, index);
  std::mt19937_64 rng(p.seed);
  const std::size_t n = policy.crop_size;
  if (source_height < n || source_width < n) {
    throw IoError("source " + std::to_string(source_width) + "x" + std::to_string(source_height) +
                  " is smaller than the " + std::to_string(n) + "px crop");
  }
  // Fixed draw order; every draw happens regardless of the toggles.
  p.crop_x = std::uniform_int_distribution<std::size_t>(0, source_width - n)(rng);
  p.crop_y = std::uniform_int_distribution<std::size_t>(0, source_height - n)(rng);
  const bool flip = std::bernoulli_distribution(0.5)(rng);
  const double gamma =
      std::uniform_real_distribution<double>(policy.gamma_min, policy.gamma_max)(rng);
  const bool light = std::bernoulli_distribution(policy.oe_fraction)(rng);
  const std::uint64_t streak_seed = rng();
  const std::uint64_t motion_seed = rng();
  const double rotation = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  const double sigma = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  p.noise_seed = rng();

  p.flip = policy.flips && flip;
  p.gamma = policy.gamma ? gamma : 1.0;
  p.light_sources = light;
  p.rotation_per_sample = rotation * policy.max_rotation_per_sample;
  p.sigma = sigma * policy.sigma_max;

  MotionConfig motion = policy.motion;
  motion.seed = motion_seed;
  p.trajectory = generate_trajectory(motion);

  if (light) {
    // Sources go where they stay inside both the sharp frame and the
    // registered ground-truth frame.
    const RegistrationShift shift = registration_shift(p.trajectory);
    const long h = static_cast<long>(n) - std::abs(shift.dy);
    const long w = static_cast<long>(n) - std::abs(shift.dx);
    StreakConfig cfg = policy.streaks;
    cfg.seed = streak_seed;
    const auto planned = plan_light_sources(source_channels, static_cast<std::size_t>(std::max(h, 1L)),
                                            static_cast<std::size_t>(std::max(w, 1L)), cfg);
    for (const auto& s : planned) {
      p.sources.push_back({s.x + std::max(0L, shift.dx), s.y + std::max(0L, shift.dy),
                           s.shape_seed, s.intensities});
    }
  }
  return p;
}

RenderedPair render_item(const Image& source, const ItemPlan& plan, const DatasetPolicy& policy) {
  RenderedPair out;
  Image sharp = crop_flip_gamma(source, plan, policy);
  const auto sources = materialise(plan, policy);
  if (!sources.empty()) sharp = composite_light_sources(sharp, sources);
  out.sharp_preclip_max = *std::max_element(sharp.values().begin(), sharp.values().end());
  out.saturated_pixels = static_cast<std::size_t>(
      std::count_if(sharp.values().begin(), sharp.values().end(), [](double v) { return v > 1.0; }));

  BlurPair pair = synthesize_blur(sharp, plan.trajectory, plan.rotation_per_sample,
                                  NoiseConfig{plan.sigma, plan.noise_seed});
  out.blurred_preclip_max = pair.blurred_preclip_max;
  out.blurred = std::move(pair.blurred);
  out.sharp = std::move(pair.registered_sharp);

  // Ground truth pixel p shows sharp pixel p + shift.
  const RegistrationShift shift = registration_shift(plan.trajectory);
  const long n = static_cast<long>(out.sharp.height());
  for (const auto& s : sources) {
    const long size = static_cast<long>(s.patch.height());
    for (long y = std::max(0L, s.y - shift.dy); y < std::min(n, s.y - shift.dy + size); ++y) {
      for (long x = std::max(0L, s.x - shift.dx); x < std::min(n, s.x - shift.dx + size); ++x) {
        for (std::size_t c = 0; c < out.sharp.channels(); ++c) {
          if (out.sharp.at(c, y, x) == 1.0) out.streak_region_clipped = true;
        }
      }
    }
  }
  return out;
}

namespace {

std::string item_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", index);
  return buf;
}

struct Job {
  std::size_t index;
  fs::path source;
};

ItemRecord run_item(const DatasetPolicy& policy, const Job& job) {
  ItemRecord r;
  r.plan.index = job.index;
  r.plan.source = job.source.filename().string();
  r.plan.seed = item_seed(policy.seed, job.index);
  try {
    const Image source = io::read_png(job.source);
    r.plan = plan_item(policy, job.index, r.plan.source, source.height(), source.width(),
                       source.channels());
    const RenderedPair pair = render_item(source, r.plan, policy);
    const auto blurred = io::encode_png(pair.blurred, policy.bit_depth);
    const auto sharp = io::encode_png(pair.sharp, policy.bit_depth);
    r.blurred_path = "blurred/" + item_name(job.index);
    r.sharp_path = "sharp/" + item_name(job.index);
    io::write_bytes(policy.out_dir / r.blurred_path, blurred);
    io::write_bytes(policy.out_dir / r.sharp_path, sharp);
    r.blurred_sha256 = io::sha256_hex(blurred);
    r.sharp_sha256 = io::sha256_hex(sharp);
    r.sharp_preclip_max = pair.sharp_preclip_max;
    r.blurred_preclip_max = pair.blurred_preclip_max;
    r.saturated_pixels = pair.saturated_pixels;
    r.streak_region_clipped = pair.streak_region_clipped;
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

bool intact(const DatasetPolicy& policy, const ItemRecord& r) {
  if (!r.ok) return false;
  try {
    return io::sha256_hex(io::read_bytes(policy.out_dir / r.blurred_path)) == r.blurred_sha256 &&
           io::sha256_hex(io::read_bytes(policy.out_dir / r.sharp_path)) == r.sharp_sha256;
  } catch (const IoError&) {
    return false;
  }
}

// Serialises manifest appends from the worker threads.
class Appender {
 public:
  Appender(const fs::path& path, bool append) {
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw IoError("cannot open " + path.string());
  }
  void line(const std::string& s) {
    std::lock_guard lock(mu_);
    out_ << s << '\n';
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace

GenerationSummary generate_dataset(const DatasetPolicy& policy, bool resume) {
  policy.validate();
  const auto sources = io::list_pngs(policy.input_dir);
  if (sources.empty()) {
    throw ConfigError("no PNG images found in " + policy.input_dir.string());
  }
  fs::create_directories(policy.out_dir / "blurred");
  fs::create_directories(policy.out_dir / "sharp");

  const fs::path partial = policy.out_dir / kPartialManifestName;
  const fs::path final_manifest = policy.out_dir / kManifestName;

  std::map<std::size_t, ItemRecord> done;
  bool append = false;
  if (resume) {
    for (const fs::path& p : {final_manifest, partial}) {
      if (!fs::exists(p)) continue;
      Manifest m = read_manifest(p);
      if (policy_fingerprint(m.policy) != policy_fingerprint(policy)) {
        throw ConfigError("cannot resume: " + p.string() + " was written with a different policy");
      }
      for (auto& r : m.records) {
        if (intact(policy, r)) done[r.plan.index] = std::move(r);
      }
      append = append || p == partial;
    }
  }

  Appender appender(partial, append);
  if (!append) appender.line(header_line(policy));

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (int c = 0; c < policy.crops_per_image; ++c) {
      const std::size_t index = s * static_cast<std::size_t>(policy.crops_per_image) +
                                static_cast<std::size_t>(c);
      if (!done.contains(index)) jobs.push_back({index, sources[s]});
    }
  }

  GenerationSummary summary;
  summary.reused = done.size();
  std::vector<ItemRecord> fresh(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      fresh[j] = run_item(policy, jobs[j]);
      appender.line(record_line(fresh[j]));
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(jobs.size(), policy.jobs > 0 ? static_cast<std::size_t>(policy.jobs) : hw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
  }

  for (auto& r : fresh) done[r.plan.index] = std::move(r);
  std::string text = header_line(policy) + '\n';
  for (auto& [index, r] : done) {
    text += record_line(r) + '\n';
    (r.ok ? summary.ok : summary.failed)++;
    summary.records.push_back(std::move(r));
  }
  io::write_bytes(final_manifest, std::vector<std::uint8_t>(text.begin(), text.end()));
  fs::remove(partial);
  return summary;
}

ReplaySummary replay_manifest(const fs::path& manifest, std::optional<fs::path> input_dir,
                              std::optional<fs::path> out_dir) {
  Manifest m = read_manifest(manifest);
  DatasetPolicy policy = m.policy;
  if (input_dir) policy.input_dir = *input_dir;
  if (out_dir) {
    fs::create_directories(*out_dir / "blurred");
    fs::create_directories(*out_dir / "sharp");
  }
  ReplaySummary s;
  for (const auto& r : m.records) {
    if (!r.ok) {
      ++s.skipped;
      continue;
    }
    try {
      const Image source = io::read_png(policy.input_dir / r.plan.source);
      const RenderedPair pair = render_item(source, r.plan, policy);
      const auto blurred = io::encode_png(pair.blurred, policy.bit_depth);
      const auto sharp = io::encode_png(pair.sharp, policy.bit_depth);
      if (out_dir) {
        io::write_bytes(*out_dir / r.blurred_path, blurred);
        io::write_bytes(*out_dir / r.sharp_path, sharp);
      }
      if (io::sha256_hex(blurred) == r.blurred_sha256 && io::sha256_hex(sharp) == r.sharp_sha256) {
        ++s.matched;
      } else {
        ++s.mismatched;
        s.problems.push_back("item " + std::to_string(r.plan.index) + ": checksum mismatch");
      }
    } catch (const std::exception& e) {
      ++s.mismatched;
      s.problems.push_back("item " + std::to_string(r.plan.index) + ": " + e.what());
    }
  }
  return s;
}

}  // namespace easrn::pipeline
