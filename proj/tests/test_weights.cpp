#include <gtest/gtest.h>

#include <cstring>

#include "easrn/errors.hpp"
#include "easrn/graph/weights.hpp"
#include "support.hpp"

using namespace easrn;
using namespace easrn::graph;

TEST(WeightFile, HeaderLayout) {
  GraphWeights w;
  w.set("ab", Tensor({2}, std::vector<double>{1.5, -2.0}));
  const auto bytes = encode_weights(w);
  // magic(8) + count(4) + len(2) + "ab"(2) + rank(1) + dim(4) + 2 floats(8)
  ASSERT_EQ(bytes.size(), 29u);
  EXPECT_EQ(std::memcmp(bytes.data(), "EASRNW1\0", 8), 0);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9] | bytes[10] | bytes[11], 0);
  EXPECT_EQ(bytes[12], 2);
  EXPECT_EQ(bytes[14], 'a');
  EXPECT_EQ(bytes[16], 1);
  EXPECT_EQ(bytes[17], 2);
  float f;
  std::memcpy(&f, bytes.data() + 21, 4);
  EXPECT_EQ(f, 1.5f);
  // little-endian 1.5f = 0x3FC00000
  EXPECT_EQ(bytes[24], 0x3F);
  EXPECT_EQ(bytes[23], 0xC0);
}

TEST(WeightFile, BitExactRoundTrip) {
  GraphConfig cfg;
  cfg.base_channels = 3;
  const auto w = GraphWeights::he_normal(cfg, 77);
  const auto bytes = encode_weights(w);
  const auto back = decode_weights(bytes);
  ASSERT_EQ(back.size(), w.size());
  for (const auto& [name, t] : w.entries()) EXPECT_EQ(back.at(name), t) << name;
  EXPECT_EQ(encode_weights(back), bytes);

  const auto path = test::scratch_dir("weights") / "w.bin";
  write_weights(path, w);
  EXPECT_EQ(encode_weights(read_weights(path)), bytes);
}

TEST(WeightFile, RejectsCorruptInput) {
  const auto bytes = encode_weights(GraphWeights::zeros(GraphConfig{}));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_weights(bad), IoError);
  EXPECT_THROW(decode_weights({bytes.begin(), bytes.end() - 3}), IoError);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(decode_weights(extra), IoError);
}

TEST(Weights, ValidateChecksShapesAndFiniteness) {
  GraphConfig cfg;
  auto w = GraphWeights::zeros(cfg);
  EXPECT_NO_THROW(w.validate(cfg));
  w.set("upsample.proj.b", Tensor({4}));
  EXPECT_THROW(w.validate(cfg), ContractError);
  w = GraphWeights::zeros(cfg);
  Tensor bad = w.at("deblur.out.b");
  bad[1] = std::nan("");
  w.set("deblur.out.b", bad);
  EXPECT_THROW(w.validate(cfg), ContractError);
}

TEST(Weights, InferConfigFromStem) {
  GraphConfig cfg;
  cfg.base_channels = 5;
  cfg.image_channels = 1;
  const auto inferred = infer_config(GraphWeights::zeros(cfg));
  EXPECT_EQ(inferred.base_channels, 5u);
  EXPECT_EQ(inferred.image_channels, 1u);
}

TEST(Weights, HeNormalIsSeededAndZeroBiased) {
  GraphConfig cfg;
  const auto a = GraphWeights::he_normal(cfg, 1), b = GraphWeights::he_normal(cfg, 1);
  EXPECT_EQ(encode_weights(a), encode_weights(b));
  EXPECT_NE(encode_weights(a), encode_weights(GraphWeights::he_normal(cfg, 2)));
  for (const auto& [name, t] : a.entries())
    if (name.ends_with(".b")) EXPECT_EQ(t.max_abs(), 0.0) << name;
}

TEST(GraphConfig, Validation) {
  GraphConfig cfg;
  EXPECT_EQ(cfg.base_channels, 4u);
  EXPECT_EQ(cfg.n_scales, 3);
  EXPECT_EQ(cfg.lrelu_slope, 0.2);
  EXPECT_EQ(cfg.inception_sizes, (std::vector<std::size_t>{1, 3, 5, 7}));
  cfg.inception_sizes = {1, 4};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = GraphConfig{};
  cfg.base_channels = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
