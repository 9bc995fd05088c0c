#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "airscript/nn/loss.hpp"
#include "airscript/ranked.hpp"
#include "airscript/tensor.hpp"

namespace airscript::nn {

// Compact from-scratch convnet: two same-padded 3x3 conv layers with relu
// and 2x2 max pooling, then a dense softmax layer. Defaults match the
// production classifier (64x64 in, 8 then 16 filters); the gradient-check
// suite instantiates a scaled-down 16x16 variant.
struct CnnConfig {
  std::size_t input_size = 64;
  std::size_t conv1_filters = 8;
  std::size_t conv2_filters = 16;

  std::size_t half() const { return input_size / 2; }
  std::size_t quarter() const { return input_size / 4; }
  std::size_t flat() const { return quarter() * quarter() * conv2_filters; }

  void validate() const {
    if (input_size < 8 || input_size % 4 != 0)
      throw std::invalid_argument("CnnConfig: input_size must be >= 8 and divisible by 4");
    if (conv1_filters == 0 || conv2_filters == 0)
      throw std::invalid_argument("CnnConfig: filter counts must be positive");
  }
};

struct CnnParams {
  CnnConfig cfg;
  Tensor k1;       // (c1, 9)        3x3 kernels over 1 input channel
  Tensor b1;       // (c1)
  Tensor k2;       // (c2, c1 * 9)
  Tensor b2;       // (c2)
  Tensor w_dense;  // (10, flat)
  Tensor b_dense;  // (10)

  CnnParams() : CnnParams(CnnConfig{}) {}
  explicit CnnParams(const CnnConfig& config)
      : cfg(config),
        k1({config.conv1_filters, 9}),
        b1({config.conv1_filters}),
        k2({config.conv2_filters, config.conv1_filters * 9}),
        b2({config.conv2_filters}),
        w_dense({kNumClasses, config.flat()}),
        b_dense({kNumClasses}) {
    config.validate();
  }
};

namespace detail {

// channels x (side x side) -> channels x (side+2 x side+2), zero border
inline void zero_pad(const double* __restrict src, std::size_t channels, std::size_t side,
                     double* __restrict dst) {
  const std::size_t padded = side + 2;
  std::fill(dst, dst + channels * padded * padded, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < side; ++y) {
      const double* s = src + (c * side + y) * side;
      double* d = dst + c * padded * padded + (y + 1) * padded + 1;
      for (std::size_t x = 0; x < side; ++x) d[x] = s[x];
    }
  }
}

// Single-channel input: the 9 taps unroll into one pass per output row.
inline void conv3x3_same_c1(const double* __restrict padded, std::size_t side,
                            const double* __restrict kernels, const double* __restrict bias,
                            std::size_t out_channels, double* __restrict out) {
  const std::size_t ps = side + 2;
  for (std::size_t f = 0; f < out_channels; ++f) {
    const double* k9 = kernels + f * 9;
    double* plane = out + f * side * side;
    const double b = bias[f];
    for (std::size_t y = 0; y < side; ++y) {
      const double* __restrict r0 = padded + y * ps;
      const double* __restrict r1 = r0 + ps;
      const double* __restrict r2 = r1 + ps;
      double* __restrict out_row = plane + y * side;
      for (std::size_t x = 0; x < side; ++x) {
        double acc = b;
        acc += k9[0] * r0[x] + k9[1] * r0[x + 1] + k9[2] * r0[x + 2];
        acc += k9[3] * r1[x] + k9[4] * r1[x + 1] + k9[5] * r1[x + 2];
        acc += k9[6] * r2[x] + k9[7] * r2[x + 1] + k9[8] * r2[x + 2];
        out_row[x] = acc;
      }
    }
  }
}

// Multi-channel input: per-tap channel block, IC fused multiply-adds per
// element per tap. Full tap unrolling spills registers beyond a couple of
// channels.
template <std::size_t IC>
void conv3x3_same_fixed(const double* __restrict padded, std::size_t side,
                        const double* __restrict kernels, const double* __restrict bias,
                        std::size_t out_channels, double* __restrict out) {
  const std::size_t ps = side + 2;
  for (std::size_t f = 0; f < out_channels; ++f) {
    double* plane = out + f * side * side;
    std::fill(plane, plane + side * side, bias[f]);
    const double* kf = kernels + f * IC * 9;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        double kv[IC];
        for (std::size_t c = 0; c < IC; ++c) kv[c] = kf[c * 9 + ky * 3 + kx];
        for (std::size_t y = 0; y < side; ++y) {
          const double* rows[IC];
          for (std::size_t c = 0; c < IC; ++c) rows[c] = padded + c * ps * ps + (y + ky) * ps + kx;
          double* __restrict out_row = plane + y * side;
          for (std::size_t x = 0; x < side; ++x) {
            double acc = 0.0;
            for (std::size_t c = 0; c < IC; ++c) acc += kv[c] * rows[c][x];
            out_row[x] += acc;
          }
        }
      }
    }
  }
}

// out(f, side, side) = bias[f] + sum_c kernel[f](c) * padded_in(c), 3x3 taps
inline void conv3x3_same(const double* __restrict padded, std::size_t in_channels,
                         std::size_t side, const double* __restrict kernels,
                         const double* __restrict bias, std::size_t out_channels,
                         double* __restrict out) {
  switch (in_channels) {
    case 1: return conv3x3_same_c1(padded, side, kernels, bias, out_channels, out);
    case 8: return conv3x3_same_fixed<8>(padded, side, kernels, bias, out_channels, out);
    case 16: return conv3x3_same_fixed<16>(padded, side, kernels, bias, out_channels, out);
    default: break;
  }
  const std::size_t padded_side = side + 2;
  for (std::size_t f = 0; f < out_channels; ++f) {
    double* plane = out + f * side * side;
    std::fill(plane, plane + side * side, bias[f]);
    const double* kf = kernels + f * in_channels * 9;
    for (std::size_t c = 0; c < in_channels; ++c) {
      const double* in_plane = padded + c * padded_side * padded_side;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const double wk = kf[c * 9 + ky * 3 + kx];
          for (std::size_t y = 0; y < side; ++y) {
            const double* in_row = in_plane + (y + ky) * padded_side + kx;
            double* out_row = plane + y * side;
            for (std::size_t x = 0; x < side; ++x) out_row[x] += wk * in_row[x];
          }
        }
      }
    }
  }
}

inline void relu_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

// 2x2 max pool, stride 2; argmax in {0,1,2,3} recorded for the backward pass.
inline void maxpool2(const double* in, std::size_t channels, std::size_t side, double* out,
                     std::uint8_t* argmax) {
  const std::size_t half = side / 2;
  for (std::size_t c = 0; c < channels; ++c) {
    const double* plane = in + c * side * side;
    for (std::size_t y = 0; y < half; ++y) {
      for (std::size_t x = 0; x < half; ++x) {
        const std::size_t base = (2 * y) * side + 2 * x;
        double best = plane[base];
        std::uint8_t best_i = 0;
        const std::array<std::size_t, 3> offsets{1, side, side + 1};
        for (std::uint8_t i = 0; i < 3; ++i) {
          const double v = plane[base + offsets[i]];
          if (v > best) {
            best = v;
            best_i = static_cast<std::uint8_t>(i + 1);
          }
        }
        out[(c * half + y) * half + x] = best;
        argmax[(c * half + y) * half + x] = best_i;
      }
    }
  }
}

inline void unpool2(const double* dout, std::size_t channels, std::size_t side,
                    const std::uint8_t* argmax, double* din) {
  const std::size_t half = side / 2;
  std::fill(din, din + channels * side * side, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    double* plane = din + c * side * side;
    for (std::size_t y = 0; y < half; ++y) {
      for (std::size_t x = 0; x < half; ++x) {
        const std::size_t i = (c * half + y) * half + x;
        const std::size_t base = (2 * y) * side + 2 * x;
        const std::array<std::size_t, 4> offsets{0, 1, side, side + 1};
        plane[base + offsets[argmax[i]]] += dout[i];
      }
    }
  }
}

}  // namespace detail

// Intermediates for one image, reused across samples.
struct CnnWork {
  std::vector<double> pad0;     // padded input
  std::vector<double> a1;       // conv1 post-relu, (c1, S, S)
  std::vector<double> p1;       // pool1, (c1, S/2, S/2)
  std::vector<std::uint8_t> am1;
  std::vector<double> pad1;     // padded p1
  std::vector<double> a2;       // conv2 post-relu
  std::vector<double> p2;       // pool2 = flattened feature
  std::vector<std::uint8_t> am2;
  // backward scratch
  std::vector<double> d_p2, d_a2, d_p1, d_pad1, d_a1;
};

inline std::array<double, kNumClasses> cnn_probs(const CnnParams& model, const double* image,
                                                 CnnWork& work) {
  const auto& cfg = model.cfg;
  const std::size_t s = cfg.input_size, s2 = cfg.half();
  work.pad0.resize((s + 2) * (s + 2));
  work.a1.resize(cfg.conv1_filters * s * s);
  work.p1.resize(cfg.conv1_filters * s2 * s2);
  work.am1.resize(cfg.conv1_filters * s2 * s2);
  work.pad1.resize(cfg.conv1_filters * (s2 + 2) * (s2 + 2));
  work.a2.resize(cfg.conv2_filters * s2 * s2);
  work.p2.resize(cfg.flat());
  work.am2.resize(cfg.flat());

  detail::zero_pad(image, 1, s, work.pad0.data());
  detail::conv3x3_same(work.pad0.data(), 1, s, model.k1.data(), model.b1.data(),
                       cfg.conv1_filters, work.a1.data());
  detail::relu_inplace(work.a1.data(), work.a1.size());
  detail::maxpool2(work.a1.data(), cfg.conv1_filters, s, work.p1.data(), work.am1.data());

  detail::zero_pad(work.p1.data(), cfg.conv1_filters, s2, work.pad1.data());
  detail::conv3x3_same(work.pad1.data(), cfg.conv1_filters, s2, model.k2.data(),
                       model.b2.data(), cfg.conv2_filters, work.a2.data());
  detail::relu_inplace(work.a2.data(), work.a2.size());
  detail::maxpool2(work.a2.data(), cfg.conv2_filters, s2, work.p2.data(), work.am2.data());

  std::array<double, kNumClasses> logits{};
  for (std::size_t c = 0; c < kNumClasses; ++c) logits[c] = model.b_dense[c];
  matvec_accum(model.w_dense.data(), work.p2.data(), logits.data(), kNumClasses, cfg.flat());
  return softmax(logits.data());
}

// image: row-major grayscale in [0, 1], input_size x input_size.
inline RankedPrediction cnn_forward(const CnnParams& model, const std::vector<double>& image) {
  if (image.size() != model.cfg.input_size * model.cfg.input_size)
    throw std::invalid_argument("cnn_forward: image size mismatch");
  CnnWork work;
  return make_ranked(cnn_probs(model, image.data(), work));
}

struct CnnGrads {
  Tensor k1, b1, k2, b2, w_dense, b_dense;

  explicit CnnGrads(const CnnParams& m)
      : k1(m.k1.shape()),
        b1(m.b1.shape()),
        k2(m.k2.shape()),
        b2(m.b2.shape()),
        w_dense(m.w_dense.shape()),
        b_dense(m.b_dense.shape()) {}

  void zero() {
    k1.fill(0.0);
    b1.fill(0.0);
    k2.fill(0.0);
    b2.fill(0.0);
    w_dense.fill(0.0);
    b_dense.fill(0.0);
  }
};

namespace detail {

// Input-gradient half of the convolution backward pass, out_channels
// unrolled at compile time where the architecture uses them.
template <std::size_t OC>
void conv3x3_dpad_fixed(const double* __restrict kernels, std::size_t in_channels,
                        std::size_t side, const double* __restrict dout,
                        double* __restrict dpadded) {
  const std::size_t ps = side + 2;
  for (std::size_t c = 0; c < in_channels; ++c) {
    double* dpad_plane = dpadded + c * ps * ps;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        double kv[OC];
        for (std::size_t f = 0; f < OC; ++f) kv[f] = kernels[(f * in_channels + c) * 9 + ky * 3 + kx];
        for (std::size_t y = 0; y < side; ++y) {
          const double* drows[OC];
          for (std::size_t f = 0; f < OC; ++f) drows[f] = dout + f * side * side + y * side;
          double* __restrict dpad_row = dpad_plane + (y + ky) * ps + kx;
          for (std::size_t x = 0; x < side; ++x) {
            double acc = 0.0;
            for (std::size_t f = 0; f < OC; ++f) acc += kv[f] * drows[f][x];
            dpad_row[x] += acc;
          }
        }
      }
    }
  }
}

inline void conv3x3_dpad(const double* __restrict kernels, std::size_t in_channels,
                         std::size_t side, std::size_t out_channels,
                         const double* __restrict dout, double* __restrict dpadded) {
  switch (out_channels) {
    case 8: return conv3x3_dpad_fixed<8>(kernels, in_channels, side, dout, dpadded);
    case 16: return conv3x3_dpad_fixed<16>(kernels, in_channels, side, dout, dpadded);
    default: break;
  }
  const std::size_t ps = side + 2;
  for (std::size_t f = 0; f < out_channels; ++f) {
    const double* dplane = dout + f * side * side;
    const double* kf = kernels + f * in_channels * 9;
    for (std::size_t c = 0; c < in_channels; ++c) {
      double* dpad_plane = dpadded + c * ps * ps;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const double wk = kf[c * 9 + ky * 3 + kx];
          for (std::size_t y = 0; y < side; ++y) {
            const double* __restrict drow = dplane + y * side;
            double* __restrict dpad_row = dpad_plane + (y + ky) * ps + kx;
            for (std::size_t x = 0; x < side; ++x) dpad_row[x] += wk * drow[x];
          }
        }
      }
    }
  }
}

// Gradients of a same-padded 3x3 convolution: accumulates kernel/bias grads
// and, when dpadded is non-null, the gradient w.r.t. the padded input.
// Kernel-gradient reductions and input-gradient stores run as separate loop
// nests; a fused loop defeats the vectorizer on both.
inline void conv3x3_backward(const double* __restrict padded, std::size_t in_channels,
                             std::size_t side, const double* __restrict kernels,
                             std::size_t out_channels, const double* __restrict dout,
                             double* __restrict dkernels, double* __restrict dbias,
                             double* __restrict dpadded) {
  const std::size_t padded_side = side + 2;
  for (std::size_t f = 0; f < out_channels; ++f) {
    const double* dplane = dout + f * side * side;
    double acc_bias = 0.0;
    for (std::size_t i = 0; i < side * side; ++i) acc_bias += dplane[i];
    dbias[f] += acc_bias;
    double* dkf = dkernels + f * in_channels * 9;
    for (std::size_t c = 0; c < in_channels; ++c) {
      const double* in_plane = padded + c * padded_side * padded_side;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        for (std::size_t kx = 0; kx < 3; ++kx) {
          // one lane accumulator across the whole plane, reduced once
          double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
          const std::size_t limit = side - side % 8;
          double tail = 0.0;
          for (std::size_t y = 0; y < side; ++y) {
            const double* __restrict drow = dplane + y * side;
            const double* __restrict in_row = in_plane + (y + ky) * padded_side + kx;
            for (std::size_t x = 0; x < limit; x += 8) {
              for (std::size_t l = 0; l < 8; ++l) lane[l] += drow[x + l] * in_row[x + l];
            }
            for (std::size_t x = limit; x < side; ++x) tail += drow[x] * in_row[x];
          }
          dkf[c * 9 + ky * 3 + kx] += (((lane[0] + lane[1]) + (lane[2] + lane[3])) +
                                       ((lane[4] + lane[5]) + (lane[6] + lane[7]))) +
                                      tail;
        }
      }
    }
  }
  if (!dpadded) return;
  conv3x3_dpad(kernels, in_channels, side, out_channels, dout, dpadded);
}

inline void crop_pad(const double* dpadded, std::size_t channels, std::size_t side, double* out) {
  const std::size_t padded = side + 2;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < side; ++y) {
      const double* s = dpadded + c * padded * padded + (y + 1) * padded + 1;
      double* d = out + (c * side + y) * side;
      for (std::size_t x = 0; x < side; ++x) d[x] = s[x];
    }
  }
}

}  // namespace detail

inline double cnn_sample_grad(const CnnParams& model, const double* image, int label,
                              CnnGrads& grads, CnnWork& work) {
  const auto& cfg = model.cfg;
  const std::size_t s = cfg.input_size, s2 = cfg.half();
  const auto probs = cnn_probs(model, image, work);
  const double loss = cross_entropy(probs, label);

  std::array<double, kNumClasses> dlogits = probs;
  dlogits[static_cast<std::size_t>(label)] -= 1.0;
  outer_accum(grads.w_dense.data(), dlogits.data(), work.p2.data(), kNumClasses, cfg.flat());
  for (std::size_t c = 0; c < kNumClasses; ++c) grads.b_dense[c] += dlogits[c];

  work.d_p2.assign(cfg.flat(), 0.0);
  matvec_t_accum(model.w_dense.data(), dlogits.data(), work.d_p2.data(), kNumClasses, cfg.flat());

  work.d_a2.resize(cfg.conv2_filters * s2 * s2);
  detail::unpool2(work.d_p2.data(), cfg.conv2_filters, s2, work.am2.data(), work.d_a2.data());
  for (std::size_t i = 0; i < work.d_a2.size(); ++i) {
    work.d_a2[i] = work.a2[i] > 0.0 ? work.d_a2[i] : 0.0;
  }

  work.d_pad1.assign(cfg.conv1_filters * (s2 + 2) * (s2 + 2), 0.0);
  detail::conv3x3_backward(work.pad1.data(), cfg.conv1_filters, s2, model.k2.data(),
                           cfg.conv2_filters, work.d_a2.data(), grads.k2.data(), grads.b2.data(),
                           work.d_pad1.data());
  work.d_p1.resize(cfg.conv1_filters * s2 * s2);
  detail::crop_pad(work.d_pad1.data(), cfg.conv1_filters, s2, work.d_p1.data());

  work.d_a1.resize(cfg.conv1_filters * s * s);
  detail::unpool2(work.d_p1.data(), cfg.conv1_filters, s, work.am1.data(), work.d_a1.data());
  for (std::size_t i = 0; i < work.d_a1.size(); ++i) {
    work.d_a1[i] = work.a1[i] > 0.0 ? work.d_a1[i] : 0.0;
  }
  detail::conv3x3_backward(work.pad0.data(), 1, s, model.k1.data(), cfg.conv1_filters,
                           work.d_a1.data(), grads.k1.data(), grads.b1.data(), nullptr);
  return loss;
}

}  // namespace airscript::nn
