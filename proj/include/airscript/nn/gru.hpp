#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "airscript/fastmath.hpp"
#include "airscript/nn/loss.hpp"
#include "airscript/ranked.hpp"
#include "airscript/tensor.hpp"

namespace airscript::nn {

// Gated recurrent unit parameters. The three gates are packed row-wise into
// one matrix per side, block order [update z | reset r | candidate], so each
// gate block stays a contiguous view and the input projection for a whole
// sequence is a single matrix product.
struct GruLayerParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor w;  // (3h, input)   input-to-hidden
  Tensor u;  // (3h, hidden)  hidden-to-hidden
  Tensor b;  // (3h)          gate biases (the classic gate equations omit these)

  GruLayerParams() = default;
  GruLayerParams(std::size_t input, std::size_t hidden)
      : input_size(input),
        hidden_size(hidden),
        w({3 * hidden, input}),
        u({3 * hidden, hidden}),
        b({3 * hidden}) {}

  double* w_update() { return w.data(); }
  double* w_reset() { return w.data() + hidden_size * input_size; }
  double* w_candidate() { return w.data() + 2 * hidden_size * input_size; }
  double* u_update() { return u.data(); }
  double* u_reset() { return u.data() + hidden_size * hidden_size; }
  double* u_candidate() { return u.data() + 2 * hidden_size * hidden_size; }
  double* b_update() { return b.data(); }
  double* b_reset() { return b.data() + hidden_size; }
  double* b_candidate() { return b.data() + 2 * hidden_size; }
};

// One step of the gate equations:
//   z = sigma(W_z x + U_z h_prev + b_z)
//   r = sigma(W_r x + U_r h_prev + b_r)
//   hc = tanh(W x + r .* (U h_prev) + b)
//   h  = (1 - z) .* h_prev + z .* hc
inline std::vector<double> gru_cell_step(const GruLayerParams& params,
                                         const std::vector<double>& x,
                                         const std::vector<double>& h_prev) {
  const std::size_t h = params.hidden_size;
  if (x.size() != params.input_size || h_prev.size() != h)
    throw std::invalid_argument("gru_cell_step: shape mismatch");
  std::vector<double> act(3 * h);
  for (std::size_t i = 0; i < 3 * h; ++i) act[i] = params.b[i];
  matvec_accum(params.w.data(), x.data(), act.data(), 3 * h, params.input_size);
  matvec_accum(params.u.data(), h_prev.data(), act.data(), 2 * h, h);
  std::vector<double> uc(h, 0.0);
  matvec_accum(params.u.data() + 2 * h * h, h_prev.data(), uc.data(), h, h);
  std::vector<double> out(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double z = sigmoid_fast(act[j]);
    const double r = sigmoid_fast(act[h + j]);
    const double hc = tanh_fast(act[2 * h + j] + r * uc[j]);
    out[j] = (1.0 - z) * h_prev[j] + z * hc;
  }
  return out;
}

// Forward intermediates for one direction of one sequence, in processing
// order. Reused across samples to keep allocations off the training loop.
struct GruTrace {
  std::size_t len = 0;
  std::vector<double> xp;  // (T, 3h) input projection + bias
  std::vector<double> z;   // (T, h)
  std::vector<double> r;   // (T, h)
  std::vector<double> hc;  // (T, h)
  std::vector<double> uc;  // (T, h) candidate-block recurrent product
  std::vector<double> h;   // (T, h) hidden states; step t-1 state is h[t-1], zeros at t=0
  std::vector<double> w_t; // (n, 3h) transposed input weights, refreshed per forward
  std::vector<double> u_t; // (h, 3h) transposed recurrent weights, refreshed per forward

  // every buffer is fully overwritten by the forward pass, so plain resize
  void resize(std::size_t t, std::size_t hidden, std::size_t input) {
    len = t;
    xp.resize(t * 3 * hidden);
    z.resize(t * hidden);
    r.resize(t * hidden);
    hc.resize(t * hidden);
    uc.resize(t * hidden);
    h.resize(t * hidden);
    w_t.resize(input * 3 * hidden);
    u_t.resize(hidden * 3 * hidden);
  }
};

// xs is (T, input) row-major; reverse=true processes the rows back to front.
inline void gru_forward(const GruLayerParams& params, const double* xs, std::size_t len,
                        bool reverse, GruTrace& trace) {
  const std::size_t h = params.hidden_size;
  const std::size_t n = params.input_size;
  trace.resize(len, h, n);

  // input projection in axpy form over a transposed weight copy: the input
  // width is tiny, so row-reduction matvecs would be all loop overhead
  double* __restrict w_t = trace.w_t.data();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < 3 * h; ++i) w_t[k * 3 * h + i] = params.w[i * n + k];
  const double* __restrict bias = params.b.data();
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t src = reverse ? len - 1 - t : t;
    double* __restrict row = trace.xp.data() + t * 3 * h;
    for (std::size_t i = 0; i < 3 * h; ++i) row[i] = bias[i];
    for (std::size_t k = 0; k < n; ++k) {
      const double xv = xs[src * n + k];
      const double* __restrict col = w_t + k * 3 * h;
      for (std::size_t i = 0; i < 3 * h; ++i) row[i] += xv * col[i];
    }
  }

  // recurrent weights transposed as well: the per-step product then runs in
  // axpy form (one streaming fma per column) with no horizontal reductions
  double* __restrict u_t = trace.u_t.data();
  for (std::size_t k = 0; k < h; ++k)
    for (std::size_t i = 0; i < 3 * h; ++i) u_t[k * 3 * h + i] = params.u[i * h + k];

  std::vector<double> zeros(h, 0.0);
  const double* h_prev = zeros.data();
  std::vector<double> act(3 * h);
  for (std::size_t t = 0; t < len; ++t) {
    const double* __restrict xp = trace.xp.data() + t * 3 * h;
    double* __restrict zt = trace.z.data() + t * h;
    double* __restrict rt = trace.r.data() + t * h;
    double* __restrict hct = trace.hc.data() + t * h;
    double* __restrict uct = trace.uc.data() + t * h;
    double* __restrict ht = trace.h.data() + t * h;
    double* __restrict gates = act.data();
    for (std::size_t i = 0; i < 3 * h; ++i) gates[i] = xp[i];
    for (std::size_t k = 0; k < h; ++k) {
      const double hv = h_prev[k];
      const double* __restrict col = u_t + k * 3 * h;
      for (std::size_t i = 0; i < 3 * h; ++i) gates[i] += hv * col[i];
    }
    // separate elementwise passes so each one stays vectorizable
    for (std::size_t i = 0; i < 2 * h; ++i) gates[i] = sigmoid_fast(gates[i]);
    for (std::size_t j = 0; j < h; ++j) {
      uct[j] = gates[2 * h + j] - xp[2 * h + j];  // recover U_c h_prev for the backward pass
      hct[j] = xp[2 * h + j] + gates[h + j] * uct[j];
    }
    for (std::size_t j = 0; j < h; ++j) hct[j] = tanh_fast(hct[j]);
    for (std::size_t j = 0; j < h; ++j) {
      zt[j] = gates[j];
      rt[j] = gates[h + j];
      ht[j] = (1.0 - zt[j]) * h_prev[j] + zt[j] * hct[j];
    }
    h_prev = ht;
  }
}

struct GruGrads {
  Tensor w, u, b;

  explicit GruGrads(const GruLayerParams& p)
      : w(p.w.shape()), u(p.u.shape()), b(p.b.shape()) {}

  void zero() {
    w.fill(0.0);
    u.fill(0.0);
    b.fill(0.0);
  }
};

// Backpropagation through time for one direction. dh_final is the gradient
// on the last processed hidden state; parameter gradients are accumulated
// (not overwritten) into `grads`.
inline void gru_backward(const GruLayerParams& params, const double* xs, std::size_t len,
                         bool reverse, const GruTrace& trace, const double* dh_final,
                         GruGrads& grads) {
  const std::size_t h = params.hidden_size;
  const std::size_t n = params.input_size;
  std::vector<double> dh(dh_final, dh_final + h);
  std::vector<double> da_buf(3 * h);   // [daz | dar | dac] for the current step
  std::vector<double> duc_buf(h);      // gradient on U_c h_prev
  std::vector<double> dh_prev_buf(h);
  std::vector<double> zeros(h, 0.0);
  // input-weight grads accumulate transposed (n, 3h): the natural (3h, n)
  // outer product has a tiny inner loop that defeats vectorization
  std::vector<double> dwt_buf(n * 3 * h, 0.0);
  double* __restrict da = da_buf.data();
  double* __restrict duc = duc_buf.data();
  double* __restrict dwt = dwt_buf.data();
  for (std::size_t t = len; t-- > 0;) {
    const double* __restrict zt = trace.z.data() + t * h;
    const double* __restrict rt = trace.r.data() + t * h;
    const double* __restrict hct = trace.hc.data() + t * h;
    const double* __restrict uct = trace.uc.data() + t * h;
    const double* __restrict h_prev = t > 0 ? trace.h.data() + (t - 1) * h : zeros.data();
    double* __restrict dh_prev = dh_prev_buf.data();
    for (std::size_t j = 0; j < h; ++j) {
      const double dz = dh[j] * (hct[j] - h_prev[j]);
      const double dhc = dh[j] * zt[j];
      const double dac = dhc * (1.0 - hct[j] * hct[j]);
      const double dr = dac * uct[j];
      da[j] = dz * zt[j] * (1.0 - zt[j]);
      da[h + j] = dr * rt[j] * (1.0 - rt[j]);
      da[2 * h + j] = dac;
      duc[j] = dac * rt[j];
      dh_prev[j] = dh[j] * (1.0 - zt[j]);
    }
    matvec_t_accum(params.u.data(), da, dh_prev, 2 * h, h);
    matvec_t_accum(params.u.data() + 2 * h * h, duc, dh_prev, h, h);

    const std::size_t src = reverse ? len - 1 - t : t;
    for (std::size_t k = 0; k < n; ++k) {
      const double xv = xs[src * n + k];
      double* __restrict row = dwt + k * 3 * h;
      for (std::size_t i = 0; i < 3 * h; ++i) row[i] += xv * da[i];
    }
    outer_accum(grads.u.data(), da, h_prev, 2 * h, h);
    outer_accum(grads.u.data() + 2 * h * h, duc, h_prev, h, h);
    for (std::size_t i = 0; i < 3 * h; ++i) grads.b[i] += da[i];

    dh.swap(dh_prev_buf);
  }
  for (std::size_t i = 0; i < 3 * h; ++i)
    for (std::size_t k = 0; k < n; ++k) grads.w[i * n + k] += dwt[k * 3 * h + i];
}

// Bidirectional GRU classifier: one pass per direction, final hidden states
// concatenated, then a dense softmax layer over the digit classes.
struct BgruClassifier {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  GruLayerParams fwd;
  GruLayerParams bwd;
  Tensor w_out;  // (10, 2h)
  Tensor b_out;  // (10)

  BgruClassifier() = default;
  BgruClassifier(std::size_t input, std::size_t hidden)
      : input_size(input),
        hidden_size(hidden),
        fwd(input, hidden),
        bwd(input, hidden),
        w_out({kNumClasses, 2 * hidden}),
        b_out({kNumClasses}) {}
};

struct BgruWork {
  GruTrace fwd;
  GruTrace bwd;
  std::vector<double> feature;  // (2h)
};

inline std::array<double, kNumClasses> bgru_probs(const BgruClassifier& model, const double* xs,
                                                  std::size_t len, BgruWork& work) {
  if (len == 0) throw std::domain_error("bgru_forward: empty sequence");
  const std::size_t h = model.hidden_size;
  gru_forward(model.fwd, xs, len, false, work.fwd);
  gru_forward(model.bwd, xs, len, true, work.bwd);
  work.feature.assign(2 * h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    work.feature[j] = work.fwd.h[(len - 1) * h + j];
    work.feature[h + j] = work.bwd.h[(len - 1) * h + j];
  }
  std::array<double, kNumClasses> logits{};
  for (std::size_t c = 0; c < kNumClasses; ++c) logits[c] = model.b_out[c];
  matvec_accum(model.w_out.data(), work.feature.data(), logits.data(), kNumClasses, 2 * h);
  return softmax(logits.data());
}

inline RankedPrediction bgru_forward(const BgruClassifier& model, const double* xs,
                                     std::size_t len) {
  BgruWork work;
  return make_ranked(bgru_probs(model, xs, len, work));
}

struct BgruGrads {
  GruGrads fwd, bwd;
  Tensor w_out, b_out;

  explicit BgruGrads(const BgruClassifier& m)
      : fwd(m.fwd), bwd(m.bwd), w_out(m.w_out.shape()), b_out(m.b_out.shape()) {}

  void zero() {
    fwd.zero();
    bwd.zero();
    w_out.fill(0.0);
    b_out.fill(0.0);
  }
};

// Forward + backward for one labeled sequence; returns the sample's loss and
// accumulates unscaled gradients into `grads`.
inline double bgru_sample_grad(const BgruClassifier& model, const double* xs, std::size_t len,
                               int label, BgruGrads& grads, BgruWork& work) {
  const std::size_t h = model.hidden_size;
  const auto probs = bgru_probs(model, xs, len, work);
  const double loss = cross_entropy(probs, label);

  std::array<double, kNumClasses> dlogits = probs;
  dlogits[static_cast<std::size_t>(label)] -= 1.0;
  outer_accum(grads.w_out.data(), dlogits.data(), work.feature.data(), kNumClasses, 2 * h);
  for (std::size_t c = 0; c < kNumClasses; ++c) grads.b_out[c] += dlogits[c];

  std::vector<double> dfeature(2 * h, 0.0);
  matvec_t_accum(model.w_out.data(), dlogits.data(), dfeature.data(), kNumClasses, 2 * h);
  gru_backward(model.fwd, xs, len, false, work.fwd, dfeature.data(), grads.fwd);
  gru_backward(model.bwd, xs, len, true, work.bwd, dfeature.data() + h, grads.bwd);
  return loss;
}

}  // namespace airscript::nn
