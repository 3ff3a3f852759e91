#include "easrn/graph/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "easrn/errors.hpp"

namespace easrn::graph {

static_assert(std::endian::native == std::endian::little,
              "weight file I/O assumes a little-endian host");

void GraphConfig::validate() const {
  if (base_channels < 1) throw ConfigError("graph: base_channels must be >= 1");
  if (n_scales < 1) throw ConfigError("graph: n_scales must be >= 1");
  if (image_channels < 1) throw ConfigError("graph: image_channels must be >= 1");
  if (inception_sizes.empty()) throw ConfigError("graph: inception needs at least one branch");
  for (std::size_t k : inception_sizes) {
    if (k % 2 == 0) throw ConfigError("graph: inception filter sizes must be odd");
  }
  if (bottleneck_channels() % inception_sizes.size() != 0) {
    throw ConfigError("graph: bottleneck channels not divisible by the inception branch count");
  }
}

std::vector<std::size_t> GraphConfig::stage_channels() const {
  return {base_channels, 2 * base_channels, 4 * base_channels, 8 * base_channels};
}

namespace {

void add_conv(std::vector<ParamSpec>& out, const std::string& name, std::size_t k,
              std::size_t cin, std::size_t cout) {
  out.push_back({name + ".w", {k, k, cin, cout}});
  out.push_back({name + ".b", {cout}});
}

void add_rir(std::vector<ParamSpec>& out, const std::string& prefix, std::size_t c) {
  for (int rb = 0; rb < 2; ++rb) {
    for (int cv = 0; cv < 2; ++cv) {
      add_conv(out, prefix + ".rb" + std::to_string(rb) + ".conv" + std::to_string(cv), 3, c, c);
    }
  }
}

}  // namespace

std::vector<ParamSpec> weight_layout(const GraphConfig& config) {
  config.validate();
  const auto ch = config.stage_channels();
  const std::size_t img = config.image_channels;
  std::vector<ParamSpec> out;

  add_conv(out, "deblur.stem", 3, img, ch[0]);
  add_rir(out, "deblur.enc0.rir", ch[0]);
  for (std::size_t s = 1; s < ch.size(); ++s) {
    const std::string stage = "deblur.enc" + std::to_string(s);
    add_conv(out, stage + ".down", 3, ch[s - 1], ch[s]);
    add_rir(out, stage + ".rir", ch[s]);
  }
  const std::size_t branch = config.bottleneck_channels() / config.inception_sizes.size();
  for (std::size_t k : config.inception_sizes) {
    add_conv(out, "deblur.inception.k" + std::to_string(k), k, config.bottleneck_channels(),
             branch);
  }
  for (std::size_t s = ch.size() - 1; s-- > 0;) {
    const std::string stage = "deblur.dec" + std::to_string(s);
    add_conv(out, stage + ".up", 3, ch[s + 1], ch[s]);
    add_rir(out, stage + ".rir", ch[s]);
  }
  add_conv(out, "deblur.out", 3, ch[0], img);

  const std::size_t u = config.upsample_channels();
  add_conv(out, "upsample.head", 3, 2 * img, u);
  for (int r = 0; r < 3; ++r) add_rir(out, "upsample.rir" + std::to_string(r), u);
  add_conv(out, "upsample.proj", 3, u, img);
  return out;
}

std::size_t parameter_count(const GraphConfig& config) {
  std::size_t n = 0;
  for (const auto& p : weight_layout(config)) {
    std::size_t e = 1;
    for (std::size_t d : p.shape) e *= d;
    n += e;
  }
  return n;
}

GraphWeights GraphWeights::zeros(const GraphConfig& config) {
  Map m;
  for (auto& p : weight_layout(config)) m.emplace(p.name, Tensor(p.shape));
  return GraphWeights(std::move(m));
}

GraphWeights GraphWeights::he_normal(const GraphConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Map m;
  for (auto& p : weight_layout(config)) {
    Tensor t(p.shape);
    if (p.shape.size() == 4) {
      const double fan_in = static_cast<double>(p.shape[0] * p.shape[1] * p.shape[2]);
      const double scale = std::sqrt(2.0 / fan_in);
      // Rounded to float so an in-memory set equals its weight-file image.
      for (double& v : t.values()) v = static_cast<float>(scale * normal(rng));
    }
    m.emplace(p.name, std::move(t));
  }
  return GraphWeights(std::move(m));
}

const Tensor& GraphWeights::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("missing weight entry '" + name + "'");
  return it->second;
}

Tensor& GraphWeights::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("missing weight entry '" + name + "'");
  return it->second;
}

void GraphWeights::validate(const GraphConfig& config) const {
  for (const auto& p : weight_layout(config)) {
    auto it = entries_.find(p.name);
    if (it == entries_.end()) throw ContractError("missing weight entry '" + p.name + "'");
    if (it->second.shape() != p.shape) {
      throw ContractError("weight entry '" + p.name + "' has shape " +
                          shape_string(it->second.shape()) + ", expected " +
                          shape_string(p.shape));
    }
    if (!it->second.all_finite()) {
      throw ContractError("weight entry '" + p.name + "' contains non-finite values");
    }
  }
}

GraphConfig infer_config(const GraphWeights& weights, GraphConfig defaults) {
  const Tensor& stem = weights.at("deblur.stem.w");
  if (stem.rank() != 4) throw ContractError("weight entry 'deblur.stem.w' must be rank 4");
  defaults.image_channels = stem.shape()[2];
  defaults.base_channels = stem.shape()[3];
  return defaults;
}

namespace {

constexpr char kMagic[8] = {'E', 'A', 'S', 'R', 'N', 'W', '1', '\0'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw IoError("weight file is truncated");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_weights(const GraphWeights& weights) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(weights.size()));
  for (const auto& [name, t] : weights.entries()) {
    if (name.size() > 0xFFFF) throw ContractError("weight name too long: " + name);
    if (t.rank() > 0xFF) throw ContractError("weight rank too large: " + name);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : t.values()) put<float>(out, static_cast<float>(v));
  }
  return out;
}

GraphWeights decode_weights(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw IoError("not an EASRNW1 weight file (bad magic)");
  }
  const auto count = r.get<std::uint32_t>();
  GraphWeights::Map m;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint16_t>();
    std::string name = r.string(len);
    const auto rank = r.get<std::uint8_t>();
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = r.get<std::uint32_t>();
      n *= d;
    }
    std::vector<double> data(n);
    for (double& v : data) v = r.get<float>();
    if (!m.emplace(name, Tensor(std::move(shape), std::move(data))).second) {
      throw IoError("duplicate weight entry '" + name + "'");
    }
  }
  if (!r.done()) throw IoError("trailing bytes after the last weight entry");
  return GraphWeights(std::move(m));
}

void write_weights(const std::filesystem::path& path, const GraphWeights& weights) {
  const auto bytes = encode_weights(weights);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

GraphWeights read_weights(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open weight file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_weights(bytes);
}

}  // namespace easrn::graph
