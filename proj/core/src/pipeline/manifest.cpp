#include "easrn/pipeline/manifest.hpp"

#include <fstream>

#include "easrn/errors.hpp"
#include "json.hpp"

namespace easrn::pipeline {

using nlohmann::json;

namespace {

json policy_json(const DatasetPolicy& p) {
  return json{
      {"input_dir", p.input_dir.generic_string()},
      {"seed", p.seed},
      {"crops_per_image", p.crops_per_image},
      {"crop_size", p.crop_size},
      {"flips", p.flips},
      {"gamma", p.gamma},
      {"gamma_range", {p.gamma_min, p.gamma_max}},
      {"oe_fraction", p.oe_fraction},
      {"streaks",
       {{"count_range", {p.streaks.count_min, p.streaks.count_max}},
        {"intensity_range", {p.streaks.intensity_min, p.streaks.intensity_max}},
        {"shape_size", p.streaks.shape_size},
        {"shape_samples", p.streaks.shape_samples}}},
      {"motion",
       {{"num_samples", p.motion.num_samples},
        {"max_shift", p.motion.max_shift},
        {"step_sigma", p.motion.step_sigma},
        {"centripetal_gain", p.motion.centripetal_gain},
        {"impulse_prob", p.motion.impulse_prob}}},
      {"max_rotation_per_sample", p.max_rotation_per_sample},
      {"sigma_max", p.sigma_max},
      {"scales", p.scales},
      {"bit_depth", p.bit_depth},
  };
}

DatasetPolicy policy_from_json(const json& j) {
  DatasetPolicy p;
  p.input_dir = j.at("input_dir").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.crops_per_image = j.at("crops_per_image").get<int>();
  p.crop_size = j.at("crop_size").get<std::size_t>();
  p.flips = j.at("flips").get<bool>();
  p.gamma = j.at("gamma").get<bool>();
  p.gamma_min = j.at("gamma_range").at(0).get<double>();
  p.gamma_max = j.at("gamma_range").at(1).get<double>();
  p.oe_fraction = j.at("oe_fraction").get<double>();
  const json& s = j.at("streaks");
  p.streaks.count_min = s.at("count_range").at(0).get<int>();
  p.streaks.count_max = s.at("count_range").at(1).get<int>();
  p.streaks.intensity_min = s.at("intensity_range").at(0).get<double>();
  p.streaks.intensity_max = s.at("intensity_range").at(1).get<double>();
  p.streaks.shape_size = s.at("shape_size").get<std::size_t>();
  p.streaks.shape_samples = s.at("shape_samples").get<int>();
  const json& m = j.at("motion");
  p.motion.num_samples = m.at("num_samples").get<int>();
  p.motion.max_shift = m.at("max_shift").get<double>();
  p.motion.step_sigma = m.at("step_sigma").get<double>();
  p.motion.centripetal_gain = m.at("centripetal_gain").get<double>();
  p.motion.impulse_prob = m.at("impulse_prob").get<double>();
  p.max_rotation_per_sample = j.at("max_rotation_per_sample").get<double>();
  p.sigma_max = j.at("sigma_max").get<double>();
  p.scales = j.at("scales").get<int>();
  p.bit_depth = j.at("bit_depth").get<int>();
  return p;
}

json record_json(const ItemRecord& r) {
  const ItemPlan& p = r.plan;
  json sources = json::array();
  for (const auto& s : p.sources) {
    sources.push_back(
        {{"x", s.x}, {"y", s.y}, {"shape_seed", s.shape_seed}, {"intensities", s.intensities}});
  }
  json j{
      {"type", "item"},
      {"index", p.index},
      {"source", p.source},
      {"seed", p.seed},
      {"crop", {p.crop_x, p.crop_y}},
      {"flip", p.flip},
      {"gamma", p.gamma},
      {"light_sources", p.light_sources},
      {"streaks", sources},
      {"trajectory", flatten(p.trajectory)},
      {"rotation_per_sample", p.rotation_per_sample},
      {"sigma", p.sigma},
      {"noise_seed", p.noise_seed},
      {"status", r.ok ? "ok" : "error"},
  };
  if (r.ok) {
    j["blurred"] = {{"path", r.blurred_path}, {"sha256", r.blurred_sha256}};
    j["sharp"] = {{"path", r.sharp_path}, {"sha256", r.sharp_sha256}};
    j["saturation"] = {{"sharp_preclip_max", r.sharp_preclip_max},
                       {"blurred_preclip_max", r.blurred_preclip_max},
                       {"saturated_pixels", r.saturated_pixels},
                       {"streak_region_clipped", r.streak_region_clipped}};
  } else {
    j["error"] = r.error;
  }
  return j;
}

ItemRecord record_from_json(const json& j) {
  ItemRecord r;
  ItemPlan& p = r.plan;
  p.index = j.at("index").get<std::size_t>();
  p.source = j.at("source").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.crop_x = j.at("crop").at(0).get<std::size_t>();
  p.crop_y = j.at("crop").at(1).get<std::size_t>();
  p.flip = j.at("flip").get<bool>();
  p.gamma = j.at("gamma").get<double>();
  p.light_sources = j.at("light_sources").get<bool>();
  for (const auto& s : j.at("streaks")) {
    p.sources.push_back({s.at("x").get<long>(), s.at("y").get<long>(),
                         s.at("shape_seed").get<std::uint64_t>(),
                         s.at("intensities").get<std::vector<double>>()});
  }
  p.trajectory = unflatten(j.at("trajectory").get<std::vector<double>>());
  p.rotation_per_sample = j.at("rotation_per_sample").get<double>();
  p.sigma = j.at("sigma").get<double>();
  p.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  r.ok = j.at("status").get<std::string>() == "ok";
  if (r.ok) {
    r.blurred_path = j.at("blurred").at("path").get<std::string>();
    r.blurred_sha256 = j.at("blurred").at("sha256").get<std::string>();
    r.sharp_path = j.at("sharp").at("path").get<std::string>();
    r.sharp_sha256 = j.at("sharp").at("sha256").get<std::string>();
    const json& s = j.at("saturation");
    r.sharp_preclip_max = s.at("sharp_preclip_max").get<double>();
    r.blurred_preclip_max = s.at("blurred_preclip_max").get<double>();
    r.saturated_pixels = s.at("saturated_pixels").get<std::size_t>();
    r.streak_region_clipped = s.at("streak_region_clipped").get<bool>();
  } else {
    r.error = j.value("error", std::string());
  }
  return r;
}

}  // namespace

std::string header_line(const DatasetPolicy& policy) {
  return json{{"type", "header"}, {"schema", kManifestSchema}, {"policy", policy_json(policy)}}
      .dump();
}

std::string record_line(const ItemRecord& record) { return record_json(record).dump(); }

std::string policy_fingerprint(const DatasetPolicy& policy) { return policy_json(policy).dump(); }

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest " + path.string());
  Manifest m;
  bool have_header = false;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (f.peek() == std::char_traits<char>::eof()) break;  // torn final line
      throw IoError(path.string() + ": malformed manifest line");
    }
    const std::string type = j.value("type", std::string());
    try {
      if (type == "header") {
        if (j.at("schema").get<int>() != kManifestSchema) {
          throw IoError(path.string() + ": unsupported manifest schema");
        }
        m.policy = policy_from_json(j.at("policy"));
        have_header = true;
      } else if (type == "item") {
        m.records.push_back(record_from_json(j));
      }
    } catch (const json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }
  if (!have_header) throw IoError(path.string() + ": manifest has no header");
  return m;
}

}  // namespace easrn::pipeline
