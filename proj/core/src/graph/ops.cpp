#include "easrn/graph/ops.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "easrn/errors.hpp"
#include "easrn/pyramid.hpp"

namespace easrn::graph {

namespace {

struct ConvShape {
  std::size_t k, cin, cout;
};

ConvShape check_filter(const Tensor& x, const Tensor& weight, const char* op) {
  require_rank(x, 3, op);
  require_rank(weight, 4, op);
  const auto& s = weight.shape();
  if (s[0] != s[1] || s[0] % 2 == 0) {
    throw ContractError(std::string(op) + ": filter must be square with odd size, got " +
                        shape_string(s));
  }
  if (s[2] != x.channels()) {
    throw ContractError(std::string(op) + ": filter expects " + std::to_string(s[2]) +
                        " input channels, feature map has " + std::to_string(x.channels()));
  }
  return {s[0], s[2], s[3]};
}

void check_bias(const Tensor& bias, std::size_t cout, const char* op) {
  if (bias.rank() != 1 || bias.size() != cout) {
    throw ContractError(std::string(op) + ": bias shape " + shape_string(bias.shape()) +
                        " does not match " + std::to_string(cout) + " output channels");
  }
}

inline double filter_at(const Tensor& w, std::size_t ky, std::size_t kx, std::size_t ci,
                        std::size_t co) {
  const auto& s = w.shape();
  return w[((ky * s[1] + kx) * s[2] + ci) * s[3] + co];
}

inline std::size_t filter_index(const Tensor& w, std::size_t ky, std::size_t kx, std::size_t ci,
                                std::size_t co) {
  const auto& s = w.shape();
  return ((ky * s[1] + kx) * s[2] + ci) * s[3] + co;
}

// Range of output coordinates o with 0 <= o*stride + off < n.
std::pair<long, long> valid_range(long off, long stride, long n, long out_n) {
  long lo = 0;
  while (lo < out_n && lo * stride + off < 0) ++lo;
  long hi = out_n;
  while (hi > lo && (hi - 1) * stride + off >= n) --hi;
  return {lo, hi};
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, int stride) {
  const ConvShape cs = check_filter(x, weight, "conv2d");
  check_bias(bias, cs.cout, "conv2d");
  if (stride < 1) throw ContractError("conv2d: stride must be >= 1");
  const long s = stride;
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  const long oh = (h + s - 1) / s, ow = (w + s - 1) / s;
  const long pad = static_cast<long>(cs.k / 2);
  Tensor out = Tensor::image(cs.cout, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow));
  for (std::size_t co = 0; co < cs.cout; ++co) {
    auto dst = out.plane(co);
    std::fill(dst.begin(), dst.end(), bias[co]);
    for (std::size_t ci = 0; ci < cs.cin; ++ci) {
      const auto src = x.plane(ci);
      for (std::size_t ky = 0; ky < cs.k; ++ky) {
        const long dy = static_cast<long>(ky) - pad;
        const auto [y0, y1] = valid_range(dy, s, h, oh);
        for (std::size_t kx = 0; kx < cs.k; ++kx) {
          const double wv = filter_at(weight, ky, kx, ci, co);
          if (wv == 0.0) continue;
          const long dx = static_cast<long>(kx) - pad;
          const auto [x0, x1] = valid_range(dx, s, w, ow);
          for (long oy = y0; oy < y1; ++oy) {
            const double* row = src.data() + (oy * s + dy) * w + dx;
            double* orow = dst.data() + oy * ow;
            for (long ox = x0; ox < x1; ++ox) orow[ox] += wv * row[ox * s];
          }
        }
      }
    }
  }
  return out;
}

ConvGrads conv2d_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                          int stride, bool need_input, bool need_params) {
  const ConvShape cs = check_filter(x, weight, "conv2d_backward");
  const long s = stride;
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  const long oh = (h + s - 1) / s, ow = (w + s - 1) / s;
  if (grad_out.shape() != std::vector<std::size_t>{cs.cout, static_cast<std::size_t>(oh),
                                                    static_cast<std::size_t>(ow)}) {
    throw ContractError("conv2d_backward: gradient shape " + shape_string(grad_out.shape()) +
                        " does not match the forward output");
  }
  const long pad = static_cast<long>(cs.k / 2);
  ConvGrads g;
  if (need_input) g.input = Tensor(x.shape());
  if (need_params) {
    g.weight = Tensor(weight.shape());
    g.bias = Tensor({cs.cout});
  }
  for (std::size_t co = 0; co < cs.cout; ++co) {
    const auto go = grad_out.plane(co);
    if (need_params) g.bias[co] = std::accumulate(go.begin(), go.end(), 0.0);
    for (std::size_t ci = 0; ci < cs.cin; ++ci) {
      const auto src = x.plane(ci);
      double* gin = need_input ? g.input.plane(ci).data() : nullptr;
      for (std::size_t ky = 0; ky < cs.k; ++ky) {
        const long dy = static_cast<long>(ky) - pad;
        const auto [y0, y1] = valid_range(dy, s, h, oh);
        for (std::size_t kx = 0; kx < cs.k; ++kx) {
          const long dx = static_cast<long>(kx) - pad;
          const auto [x0, x1] = valid_range(dx, s, w, ow);
          const double wv = filter_at(weight, ky, kx, ci, co);
          double acc = 0.0;
          for (long oy = y0; oy < y1; ++oy) {
            const long base = (oy * s + dy) * w + dx;
            const double* grow = go.data() + oy * ow;
            for (long ox = x0; ox < x1; ++ox) {
              acc += src[base + ox * s] * grow[ox];
              if (gin) gin[base + ox * s] += wv * grow[ox];
            }
          }
          if (need_params) g.weight[filter_index(weight, ky, kx, ci, co)] = acc;
        }
      }
    }
  }
  return g;
}

Tensor deconv2x(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  const ConvShape cs = check_filter(x, weight, "deconv2x");
  check_bias(bias, cs.cout, "deconv2x");
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  const long oh = 2 * h, ow = 2 * w;
  const long pad = static_cast<long>(cs.k / 2);
  Tensor out = Tensor::image(cs.cout, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow));
  for (std::size_t co = 0; co < cs.cout; ++co) {
    auto dst = out.plane(co);
    std::fill(dst.begin(), dst.end(), bias[co]);
    for (std::size_t ci = 0; ci < cs.cin; ++ci) {
      const auto src = x.plane(ci);
      for (std::size_t ky = 0; ky < cs.k; ++ky) {
        const long dy = static_cast<long>(ky) - pad;
        for (std::size_t kx = 0; kx < cs.k; ++kx) {
          const double wv = filter_at(weight, ky, kx, ci, co);
          if (wv == 0.0) continue;
          const long dx = static_cast<long>(kx) - pad;
          for (long iy = 0; iy < h; ++iy) {
            const long oy = 2 * iy + dy;
            if (oy < 0 || oy >= oh) continue;
            for (long ix = 0; ix < w; ++ix) {
              const long ox = 2 * ix + dx;
              if (ox < 0 || ox >= ow) continue;
              dst[oy * ow + ox] += wv * src[iy * w + ix];
            }
          }
        }
      }
    }
  }
  return out;
}

ConvGrads deconv2x_backward(const Tensor& x, const Tensor& weight, const Tensor& grad_out,
                            bool need_input, bool need_params) {
  const ConvShape cs = check_filter(x, weight, "deconv2x_backward");
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  const long oh = 2 * h, ow = 2 * w;
  if (grad_out.shape() != std::vector<std::size_t>{cs.cout, static_cast<std::size_t>(oh),
                                                    static_cast<std::size_t>(ow)}) {
    throw ContractError("deconv2x_backward: gradient shape " + shape_string(grad_out.shape()) +
                        " does not match the forward output");
  }
  const long pad = static_cast<long>(cs.k / 2);
  ConvGrads g;
  if (need_input) g.input = Tensor(x.shape());
  if (need_params) {
    g.weight = Tensor(weight.shape());
    g.bias = Tensor({cs.cout});
  }
  for (std::size_t co = 0; co < cs.cout; ++co) {
    const auto go = grad_out.plane(co);
    if (need_params) g.bias[co] = std::accumulate(go.begin(), go.end(), 0.0);
    for (std::size_t ci = 0; ci < cs.cin; ++ci) {
      const auto src = x.plane(ci);
      double* gin = need_input ? g.input.plane(ci).data() : nullptr;
      for (std::size_t ky = 0; ky < cs.k; ++ky) {
        const long dy = static_cast<long>(ky) - pad;
        for (std::size_t kx = 0; kx < cs.k; ++kx) {
          const long dx = static_cast<long>(kx) - pad;
          const double wv = filter_at(weight, ky, kx, ci, co);
          double acc = 0.0;
          for (long iy = 0; iy < h; ++iy) {
            const long oy = 2 * iy + dy;
            if (oy < 0 || oy >= oh) continue;
            for (long ix = 0; ix < w; ++ix) {
              const long ox = 2 * ix + dx;
              if (ox < 0 || ox >= ow) continue;
              const double gv = go[oy * ow + ox];
              acc += src[iy * w + ix] * gv;
              if (gin) gin[iy * w + ix] += wv * gv;
            }
          }
          if (need_params) g.weight[filter_index(weight, ky, kx, ci, co)] = acc;
        }
      }
    }
  }
  return g;
}

PoolResult maxpool2x(const Tensor& x) {
  require_rank(x, 3, "maxpool2x");
  const std::size_t h = x.height(), w = x.width();
  const std::size_t oh = (h + 1) / 2, ow = (w + 1) / 2;
  PoolResult r{Tensor::image(x.channels(), oh, ow), {}};
  r.argmax.resize(r.output.size());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = (c * h + 2 * oy) * w + 2 * ox;
        for (std::size_t y = 2 * oy; y < std::min(2 * oy + 2, h); ++y) {
          for (std::size_t xx = 2 * ox; xx < std::min(2 * ox + 2, w); ++xx) {
            const std::size_t i = (c * h + y) * w + xx;
            if (x[i] > x[best]) best = i;
          }
        }
        const std::size_t o = (c * oh + oy) * ow + ox;
        r.output[o] = x[best];
        r.argmax[o] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2x_backward(const Tensor& grad_out, std::span<const std::size_t> argmax,
                          const std::vector<std::size_t>& input_shape) {
  if (argmax.size() != grad_out.size()) {
    throw ContractError("maxpool2x_backward: argmax size does not match the gradient");
  }
  Tensor g(input_shape);
  for (std::size_t o = 0; o < grad_out.size(); ++o) g[argmax[o]] += grad_out[o];
  return g;
}

Tensor lrelu(const Tensor& x, double slope) {
  Tensor out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : slope * v;
  return out;
}

Tensor lrelu_backward(const Tensor& x, const Tensor& grad_out, double slope) {
  require_same_shape(x, grad_out, "lrelu_backward");
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(x[i] > 0.0)) g[i] *= slope;
  }
  return g;
}

Tensor concat_channels(std::span<const Tensor* const> parts) {
  if (parts.empty()) throw ContractError("concat_channels: nothing to concatenate");
  const std::size_t h = parts.front()->height(), w = parts.front()->width();
  std::size_t channels = 0;
  for (const Tensor* p : parts) {
    require_rank(*p, 3, "concat_channels");
    if (p->height() != h || p->width() != w) {
      throw ContractError("concat_channels: spatial size mismatch " + shape_string(p->shape()));
    }
    channels += p->channels();
  }
  Tensor out = Tensor::image(channels, h, w);
  std::size_t offset = 0;
  for (const Tensor* p : parts) {
    std::copy(p->values().begin(), p->values().end(), out.data() + offset);
    offset += p->size();
  }
  return out;
}

Tensor pad_reflect(const Tensor& x, std::size_t height, std::size_t width) {
  require_rank(x, 3, "pad_reflect");
  if (height < x.height() || width < x.width()) {
    throw ContractError("pad_reflect: target is smaller than the input");
  }
  const long h = static_cast<long>(x.height()), w = static_cast<long>(x.width());
  Tensor out = Tensor::image(x.channels(), height, width);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      const long sy = reflect101(static_cast<long>(y), h);
      for (std::size_t xx = 0; xx < width; ++xx) {
        out.at(c, y, xx) = x.at(c, sy, reflect101(static_cast<long>(xx), w));
      }
    }
  }
  return out;
}

Tensor pad_reflect_adjoint(const Tensor& grad, std::size_t height, std::size_t width) {
  require_rank(grad, 3, "pad_reflect_adjoint");
  const long h = static_cast<long>(height), w = static_cast<long>(width);
  Tensor out = Tensor::image(grad.channels(), height, width);
  for (std::size_t c = 0; c < grad.channels(); ++c) {
    for (std::size_t y = 0; y < grad.height(); ++y) {
      const long sy = reflect101(static_cast<long>(y), h);
      for (std::size_t xx = 0; xx < grad.width(); ++xx) {
        out.at(c, sy, reflect101(static_cast<long>(xx), w)) += grad.at(c, y, xx);
      }
    }
  }
  return out;
}

Tensor crop(const Tensor& x, std::size_t height, std::size_t width) {
  require_rank(x, 3, "crop");
  if (height > x.height() || width > x.width()) {
    throw ContractError("crop: window larger than the input");
  }
  Tensor out = Tensor::image(x.channels(), height, width);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t xx = 0; xx < width; ++xx) out.at(c, y, xx) = x.at(c, y, xx);
    }
  }
  return out;
}

Tensor crop_adjoint(const Tensor& grad, std::size_t height, std::size_t width) {
  require_rank(grad, 3, "crop_adjoint");
  Tensor out = Tensor::image(grad.channels(), height, width);
  for (std::size_t c = 0; c < grad.channels(); ++c) {
    for (std::size_t y = 0; y < grad.height(); ++y) {
      for (std::size_t xx = 0; xx < grad.width(); ++xx) out.at(c, y, xx) = grad.at(c, y, xx);
    }
  }
  return out;
}

}  // namespace easrn::graph
