#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "airscript/datastore.hpp"
#include "airscript/difviz.hpp"
#include "airscript/nn/adam.hpp"
#include "airscript/nn/checkpoint.hpp"
#include "airscript/nn/cnn.hpp"
#include "airscript/nn/gru.hpp"
#include "airscript/pipeline.hpp"
#include "airscript/render.hpp"
#include "airscript/rng.hpp"

namespace airscript::nn {

struct TrainOptions {
  AdamConfig adam;                  // learning_rate is per-kind defaulted if unset by caller
  DifVizConfig difviz;
  std::size_t hidden_size = 32;
  std::size_t raster_size = 64;
  std::uint64_t seed = 0;
};

inline double default_learning_rate(ModelKind kind) {
  return kind == ModelKind::Cnn ? 0.0001 : 0.001;
}

namespace detail {

// One cached training example: a flat feature buffer plus its label.
struct Example {
  std::vector<double> x;
  std::size_t len = 0;  // time steps (sequences) or rows (images)
  int label = 0;
};

inline std::vector<double> flatten_sequence(const ProcessedSequence& seq) {
  std::vector<double> flat;
  flat.reserve(seq.values.size() * 2);
  for (const auto& p : seq.values) {
    flat.push_back(p.x);
    flat.push_back(p.y);
  }
  return flat;
}

inline std::vector<double> flatten_imu(const StandardizedImu& imu) {
  std::vector<double> flat;
  flat.reserve(imu.rows.size() * kImuChannels);
  for (const auto& row : imu.rows) flat.insert(flat.end(), row.begin(), row.end());
  return flat;
}

inline std::vector<double> flatten_image(const GrayImage& img) { return img.pix; }

// Extracts the per-kind feature; returns nothing when the recording is
// unusable for that kind (e.g. the trajectory collapses under redundancy
// removal).
inline std::optional<std::vector<double>> extract_feature(ModelKind kind, const Recording& rec,
                                                          const DifVizConfig& difviz,
                                                          const ScalerStats& scaler,
                                                          std::size_t raster_size) {
  try {
    switch (kind) {
      case ModelKind::Gru1:
        return flatten_sequence(preprocess_difviz(trajectory(rec, difviz)));
      case ModelKind::Gru2:
        return flatten_imu(preprocess_imu(rec, scaler));
      case ModelKind::Cnn:
        return flatten_image(render_raster(trajectory(rec, difviz),
                                           static_cast<int>(raster_size)));
    }
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

inline void init_tensor(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
}

inline void init_bgru(BgruClassifier& model, Rng& rng) {
  init_tensor(model.fwd.w, model.input_size, rng);
  init_tensor(model.fwd.u, model.hidden_size, rng);
  init_tensor(model.bwd.w, model.input_size, rng);
  init_tensor(model.bwd.u, model.hidden_size, rng);
  init_tensor(model.w_out, 2 * model.hidden_size, rng);
}

inline void init_cnn(CnnParams& model, Rng& rng) {
  init_tensor(model.k1, 9, rng);
  init_tensor(model.k2, model.cfg.conv1_filters * 9, rng);
  init_tensor(model.w_dense, model.cfg.flat(), rng);
}

inline std::vector<std::pair<std::string, Tensor*>> named_params(BgruClassifier& m) {
  return {{"fwd.w", &m.fwd.w}, {"fwd.u", &m.fwd.u}, {"fwd.b", &m.fwd.b},
          {"bwd.w", &m.bwd.w}, {"bwd.u", &m.bwd.u}, {"bwd.b", &m.bwd.b},
          {"out.w", &m.w_out}, {"out.b", &m.b_out}};
}

inline std::vector<std::pair<std::string, Tensor*>> named_params(CnnParams& m) {
  return {{"conv1.k", &m.k1},      {"conv1.b", &m.b1},      {"conv2.k", &m.k2},
          {"conv2.b", &m.b2},      {"dense.w", &m.w_dense}, {"dense.b", &m.b_dense}};
}

// Shared mini-batch Adam loop. `sample_grad(example)` must run
// forward+backward for one example, accumulating unscaled gradients into the
// buffers aliased by `grad_tensors` (same order as `param_tensors`), and
// return the sample loss. Gradients are averaged once per batch.
template <typename SampleGradFn, typename ZeroGradFn>
std::vector<double> run_adam_loop(const std::vector<Example>& examples,
                                  const std::vector<Tensor*>& param_tensors,
                                  const std::vector<Tensor*>& grad_tensors,
                                  ZeroGradFn&& zero_grads, SampleGradFn&& sample_grad,
                                  const AdamConfig& adam, std::uint64_t seed) {
  adam.validate();
  AdamState state = AdamState::for_params(param_tensors);
  std::vector<const Tensor*> grad_view(grad_tensors.begin(), grad_tensors.end());
  Rng shuffle_rng(derive_seed(seed, "shuffle"));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> loss_history;
  loss_history.reserve(adam.epochs);
  for (std::size_t epoch = 0; epoch < adam.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += adam.batch_size) {
      const std::size_t count = std::min(adam.batch_size, order.size() - start);
      zero_grads();
      for (std::size_t k = 0; k < count; ++k) {
        epoch_loss += sample_grad(examples[order[start + k]]);
      }
      const double scale = 1.0 / static_cast<double>(count);
      for (Tensor* g : grad_tensors) {
        double* d = g->data();
        for (std::size_t i = 0; i < g->size(); ++i) d[i] *= scale;
      }
      adam_step(param_tensors, grad_view, state, adam);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("training diverged: non-finite loss at epoch " +
                               std::to_string(epoch + 1));
    }
    loss_history.push_back(epoch_loss);
  }
  return loss_history;
}

}  // namespace detail

// Trains one classifier on the indexed subset of `ds` and returns a
// self-contained checkpoint. Deterministic in (data, options.seed).
inline Checkpoint train_model(ModelKind kind, const Dataset& ds,
                              const std::vector<std::size_t>& train_idx,
                              const TrainOptions& options) {
  if (train_idx.empty()) throw std::domain_error("train_model: empty training set");
  options.difviz.validate();

  Checkpoint ckpt;
  ckpt.kind = to_string(kind);
  ckpt.seed = options.seed;
  ckpt.hyper = options.adam;
  ckpt.difviz = options.difviz;
  ckpt.raster_size = options.raster_size;
  ckpt.hidden_size = options.hidden_size;
  ckpt.train_fingerprint = dataset_fingerprint(ds, train_idx);

  ScalerStats scaler;
  if (kind == ModelKind::Gru2) scaler = fit_scaler(ds, train_idx);
  ckpt.scaler = scaler;

  std::vector<detail::Example> examples;
  std::size_t skipped = 0;
  for (std::size_t i : train_idx) {
    const Recording& rec = ds.recordings[i];
    auto feature = detail::extract_feature(kind, rec, options.difviz, scaler,
                                           options.raster_size);
    if (!feature) {
      ++skipped;
      continue;
    }
    detail::Example ex;
    ex.x = std::move(*feature);
    ex.label = rec.label;
    examples.push_back(std::move(ex));
  }
  if (examples.size() < 2) {
    throw std::runtime_error("train_model: fewer than 2 usable recordings (" +
                             std::to_string(skipped) + " skipped)");
  }

  Rng init_rng(derive_seed(options.seed, "init"));

  if (kind == ModelKind::Cnn) {
    CnnConfig cfg;
    cfg.input_size = options.raster_size;
    CnnParams model(cfg);
    ckpt.conv1_filters = cfg.conv1_filters;
    ckpt.conv2_filters = cfg.conv2_filters;
    detail::init_cnn(model, init_rng);
    CnnGrads grads(model);
    CnnWork work;
    auto named = detail::named_params(model);
    std::vector<Tensor*> params;
    for (auto& [name, t] : named) params.push_back(t);
    std::vector<Tensor*> grad_ptrs{&grads.k1, &grads.b1, &grads.k2,
                                   &grads.b2, &grads.w_dense, &grads.b_dense};
    std::vector<double> history = detail::run_adam_loop(
        examples, params, grad_ptrs, [&grads] { grads.zero(); },
        [&](const detail::Example& ex) {
          return cnn_sample_grad(model, ex.x.data(), ex.label, grads, work);
        },
        options.adam, options.seed);
    ckpt.loss_history = std::move(history);
    for (auto& [name, t] : named) ckpt.tensors.emplace_back(name, *t);
    return ckpt;
  }

  const std::size_t dim = kind == ModelKind::Gru1 ? 2 : kImuChannels;
  ckpt.input_dim = dim;
  BgruClassifier model(dim, options.hidden_size);
  detail::init_bgru(model, init_rng);
  BgruGrads grads(model);
  BgruWork work;
  auto named = detail::named_params(model);
  std::vector<Tensor*> params;
  for (auto& [name, t] : named) params.push_back(t);
  std::vector<Tensor*> grad_ptrs{&grads.fwd.w, &grads.fwd.u, &grads.fwd.b,
                                 &grads.bwd.w, &grads.bwd.u, &grads.bwd.b,
                                 &grads.w_out, &grads.b_out};
  for (auto& ex : examples) ex.len = ex.x.size() / dim;
  std::vector<double> history = detail::run_adam_loop(
      examples, params, grad_ptrs, [&grads] { grads.zero(); },
      [&](const detail::Example& ex) {
        return bgru_sample_grad(model, ex.x.data(), ex.len, ex.label, grads, work);
      },
      options.adam, options.seed);
  ckpt.loss_history = std::move(history);
  for (auto& [name, t] : named) ckpt.tensors.emplace_back(name, *t);
  return ckpt;
}

// Rebuilds the in-memory model from a checkpoint once; predictions are then
// pure and reusable from any thread that owns its own Predictor.
class Predictor {
 public:
  explicit Predictor(Checkpoint ckpt) : ckpt_(std::move(ckpt)) {
    const ModelKind kind = model_kind_from_string(ckpt_.kind);
    if (kind == ModelKind::Cnn) {
      CnnConfig cfg;
      cfg.input_size = ckpt_.raster_size;
      cfg.conv1_filters = ckpt_.conv1_filters;
      cfg.conv2_filters = ckpt_.conv2_filters;
      cnn_.emplace(cfg);
      load_tensors(detail::named_params(*cnn_));
    } else {
      bgru_.emplace(ckpt_.input_dim, ckpt_.hidden_size);
      load_tensors(detail::named_params(*bgru_));
    }
  }

  const Checkpoint& checkpoint() const { return ckpt_; }
  ModelKind kind() const { return model_kind_from_string(ckpt_.kind); }

  // Applies the checkpoint's embedded preprocessing, then the forward pass.
  // Throws std::domain_error for recordings the preprocessing rejects.
  RankedPrediction predict(const Recording& rec) const {
    const ModelKind k = kind();
    auto feature = detail::extract_feature(k, rec, ckpt_.difviz, ckpt_.scaler,
                                           ckpt_.raster_size);
    if (!feature) throw std::domain_error("predict: recording unusable for this model");
    if (k == ModelKind::Cnn) {
      return cnn_forward(*cnn_, *feature);
    }
    const std::size_t dim = ckpt_.input_dim;
    return bgru_forward(*bgru_, feature->data(), feature->size() / dim);
  }

 private:
  void load_tensors(std::vector<std::pair<std::string, Tensor*>> named) {
    if (named.size() != ckpt_.tensors.size())
      throw std::runtime_error("Predictor: checkpoint tensor arity mismatch");
    for (std::size_t i = 0; i < named.size(); ++i) {
      if (named[i].first != ckpt_.tensors[i].first)
        throw std::runtime_error("Predictor: unexpected tensor '" + ckpt_.tensors[i].first + "'");
      if (!named[i].second->same_shape(ckpt_.tensors[i].second))
        throw std::runtime_error("Predictor: tensor shape mismatch for '" + named[i].first + "'");
      *named[i].second = ckpt_.tensors[i].second;
    }
  }

  Checkpoint ckpt_;
  std::optional<BgruClassifier> bgru_;
  std::optional<CnnParams> cnn_;
};

inline RankedPrediction predict_ranked(const Checkpoint& ckpt, const Recording& rec) {
  return Predictor(ckpt).predict(rec);
}

}  // namespace airscript::nn
