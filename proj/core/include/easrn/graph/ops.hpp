#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "easrn/tensor.hpp"

// Feature-map primitives and their reverse-mode adjoints.
//
// Feature maps are (C, H, W). Filters are (k, k, c_in, c_out), biases (c_out).
// Convolutions use zero "same" padding centred on the kernel.
namespace easrn::graph {

struct ConvGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

/// Output is (c_out, ceil(H/stride), ceil(W/stride)).
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, int stride = 1);
ConvGrads conv2d_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                          int stride = 1, bool need_input = true, bool need_params = true);

/// Transposed convolution with stride 2: input pixel i feeds outputs
/// 2i + k - k/2 for each tap k. Output is (c_out, 2H, 2W).
Tensor deconv2x(const Tensor& x, const Tensor& weight, const Tensor& bias);
ConvGrads deconv2x_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                            bool need_input = true, bool need_params = true);

struct PoolResult {
  Tensor output;
  std::vector<std::size_t> argmax;  // flat input index per output element
};

/// 2x2 max pooling, stride 2, ceil mode.
PoolResult maxpool2x(const Tensor& x);
Tensor maxpool2x_backward(const Tensor& grad_out, std::span<const std::size_t> argmax,
                          const std::vector<std::size_t>& input_shape);

Tensor lrelu(const Tensor& x, double slope);
Tensor lrelu_backward(const Tensor& x, const Tensor& grad_out, double slope);

Tensor concat_channels(std::span<const Tensor* const> parts);

/// Extends to (height, width) by reflecting past the bottom and right edges.
Tensor pad_reflect(const Tensor& x, std::size_t height, std::size_t width);
Tensor pad_reflect_adjoint(const Tensor& grad, std::size_t height, std::size_t width);

/// Keeps the top-left (height, width) window.
Tensor crop(const Tensor& x, std::size_t height, std::size_t width);
Tensor crop_adjoint(const Tensor& grad, std::size_t height, std::size_t width);

}  // namespace easrn::graph
