#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "easrn/tensor.hpp"

namespace easrn::graph {

struct GraphConfig {
  std::size_t base_channels = 4;  // 32 reproduces the published channel plan
  int n_scales = 3;
  double lrelu_slope = 0.2;
  std::vector<std::size_t> inception_sizes = {1, 3, 5, 7};
  std::size_t image_channels = 3;

  void validate() const;
  /// Encoder/decoder widths per stage: C, 2C, 4C, 8C.
  std::vector<std::size_t> stage_channels() const;
  std::size_t bottleneck_channels() const { return stage_channels().back(); }
  /// Width of the upsampling subnet's Res-in-Res blocks.
  std::size_t upsample_channels() const { return base_channels; }
};

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> shape;
};

/// Every parameter the graph reads, in a fixed order.
std::vector<ParamSpec> weight_layout(const GraphConfig& config);
std::size_t parameter_count(const GraphConfig& config);

/// Named parameter store.
class GraphWeights {
 public:
  using Map = std::map<std::string, Tensor>;

  GraphWeights() = default;
  explicit GraphWeights(Map entries) : entries_(std::move(entries)) {}

  static GraphWeights zeros(const GraphConfig& config);
  /// He-scaled normal filters, zero biases.
  static GraphWeights he_normal(const GraphConfig& config, std::uint64_t seed);

  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  bool contains(const std::string& name) const { return entries_.contains(name); }
  void set(const std::string& name, Tensor value) { entries_[name] = std::move(value); }
  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Throws ContractError naming the first missing or mis-shaped entry, or
  /// the first non-finite one.
  void validate(const GraphConfig& config) const;

 private:
  Map entries_;
};

/// Recovers base_channels / image_channels from the stem filter; other fields
/// are taken from `defaults`.
GraphConfig infer_config(const GraphWeights& weights, GraphConfig defaults = {});

// Weight file: little-endian, magic "EASRNW1\0", u32 entry count, then per
// entry u16 name length, UTF-8 name, u8 rank, u32 dims[rank], float32 data.
void write_weights(const std::filesystem::path& path, const GraphWeights& weights);
GraphWeights read_weights(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_weights(const GraphWeights& weights);
GraphWeights decode_weights(const std::vector<std::uint8_t>& bytes);

}  // namespace easrn::graph
