#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "airscript/datastore.hpp"
#include "airscript/fusion.hpp"
#include "airscript/nn/train.hpp"
#include "airscript/ranked.hpp"

namespace airscript {

struct ConfusionMatrix {
  std::array<std::array<long long, 10>, 10> counts{};  // rows = true, cols = predicted

  void add(int truth, int predicted) {
    if (truth < 0 || truth > 9 || predicted < 0 || predicted > 9)
      throw std::invalid_argument("ConfusionMatrix: label out of range");
    counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)] += 1;
  }

  long long total() const {
    long long n = 0;
    for (const auto& row : counts)
      for (long long v : row) n += v;
    return n;
  }

  long long trace() const {
    long long n = 0;
    for (std::size_t i = 0; i < 10; ++i) n += counts[i][i];
    return n;
  }

  double accuracy_percent() const {
    const long long n = total();
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(trace()) / static_cast<double>(n);
  }

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.counts == b.counts;
  }
};

inline ConfusionMatrix confusion(const std::vector<int>& predicted,
                                 const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
  return m;
}

using PredictFn = std::function<RankedPrediction(const Recording&)>;

struct TrainedPredictor {
  PredictFn predict;
  // Content hash of the split the model was fit on; the harness checks it
  // against the split it handed out, as a train/test leakage tripwire.
  std::optional<std::uint64_t> train_fingerprint;
};

using TrainerFn =
    std::function<TrainedPredictor(const Dataset&, const std::vector<std::size_t>&, std::uint64_t)>;
using TrainerMap = std::map<std::string, TrainerFn>;

inline const std::vector<std::string>& base_model_names() {
  static const std::vector<std::string> names{"gru1", "gru2", "cnn"};
  return names;
}

inline nn::AdamConfig eval_default_adam() {
  nn::AdamConfig adam;
  adam.epochs = 60;  // desk-scale default; full 150-epoch training stays a flag away
  return adam;
}

struct EvalOptions {
  std::vector<std::string> models{"gru1", "gru2", "cnn", "fusion"};
  nn::AdamConfig adam = eval_default_adam();
  std::optional<double> lr_override;  // unset -> per-kind default
  DifVizConfig difviz;
  std::size_t hidden_size = 32;
  std::size_t raster_size = 64;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ModelReport {
  std::string name;
  std::vector<double> per_round_accuracy;  // percent, one entry per round
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  long long rejected = 0;  // test recordings the preprocessing refused
  ConfusionMatrix conf;

  friend bool operator==(const ModelReport& a, const ModelReport& b) {
    return a.name == b.name && a.per_round_accuracy == b.per_round_accuracy &&
           a.mean_accuracy == b.mean_accuracy && a.std_accuracy == b.std_accuracy &&
           a.rejected == b.rejected && a.conf == b.conf;
  }
};

struct EvalReport {
  std::string mode;  // "dependent" | "independent"
  std::uint64_t seed = 0;
  std::size_t dataset_size = 0;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::vector<std::string> rounds;  // participant id per round
  std::vector<ModelReport> models;

  friend bool operator==(const EvalReport& a, const EvalReport& b) {
    return a.mode == b.mode && a.seed == b.seed && a.dataset_size == b.dataset_size &&
           a.epochs == b.epochs && a.batch_size == b.batch_size && a.rounds == b.rounds &&
           a.models == b.models;
  }
};

inline TrainerFn make_nn_trainer(nn::ModelKind kind, const EvalOptions& options) {
  const double lr = options.lr_override.value_or(nn::default_learning_rate(kind));
  return [kind, options, lr](const Dataset& ds, const std::vector<std::size_t>& train_idx,
                             std::uint64_t seed) -> TrainedPredictor {
    nn::TrainOptions topt;
    topt.adam = options.adam;
    topt.adam.learning_rate = lr;
    topt.difviz = options.difviz;
    topt.hidden_size = options.hidden_size;
    topt.raster_size = options.raster_size;
    topt.seed = seed;
    auto predictor = std::make_shared<nn::Predictor>(nn::train_model(kind, ds, train_idx, topt));
    TrainedPredictor out;
    out.train_fingerprint = predictor->checkpoint().train_fingerprint;
    out.predict = [predictor](const Recording& rec) { return predictor->predict(rec); };
    return out;
  };
}

inline TrainerMap make_nn_trainers(const EvalOptions& options) {
  return {{"gru1", make_nn_trainer(nn::ModelKind::Gru1, options)},
          {"gru2", make_nn_trainer(nn::ModelKind::Gru2, options)},
          {"cnn", make_nn_trainer(nn::ModelKind::Cnn, options)}};
}

namespace detail {

// Deterministic fallback when a model cannot score a test recording: a
// uniform ranking, counted as a (generally wrong) prediction of class 0.
inline RankedPrediction fallback_prediction() {
  std::array<double, 10> uniform{};
  uniform.fill(0.1);
  return make_ranked(uniform);
}

struct EvalUnit {
  const Dataset* data = nullptr;  // dataset the split indexes into
  Split split;
  std::size_t round = 0;    // aggregation bucket
  std::string seed_tag;     // stable id for seed derivation
};

struct UnitResult {
  std::vector<std::vector<RankedPrediction>> by_model;  // [model][test item]
  std::vector<long long> rejected_by_model;
};

inline EvalReport run_protocol(const std::string& mode, std::size_t dataset_size,
                               const std::vector<EvalUnit>& units,
                               const std::vector<std::string>& round_ids,
                               const TrainerMap& trainers, const EvalOptions& options) {
  std::set<std::string> requested(options.models.begin(), options.models.end());
  for (const auto& name : options.models) {
    if (name != "fusion" && !trainers.count(name))
      throw std::domain_error("eval: unknown model '" + name + "'");
  }
  const bool want_fusion = requested.count("fusion") > 0;
  std::vector<std::string> active;  // base models to actually train
  for (const auto& name : base_model_names()) {
    if (trainers.count(name) && (requested.count(name) || want_fusion)) active.push_back(name);
  }
  // dummy-injected protocols may use non-standard names
  for (const auto& [name, fn] : trainers) {
    if (requested.count(name) && std::find(active.begin(), active.end(), name) == active.end())
      active.push_back(name);
  }
  if (want_fusion) {
    for (const auto& name : base_model_names()) {
      if (!trainers.count(name))
        throw std::domain_error("eval: fusion requires trainers for gru1, gru2 and cnn");
    }
  }
  if (active.empty()) throw std::domain_error("eval: no models requested");

  std::vector<UnitResult> results(units.size());
  for (auto& r : results) {
    r.by_model.resize(active.size());
    r.rejected_by_model.assign(active.size(), 0);
  }

  struct Task {
    std::size_t unit;
    std::size_t model;
  };
  std::vector<Task> tasks;
  for (std::size_t u = 0; u < units.size(); ++u)
    for (std::size_t m = 0; m < active.size(); ++m) tasks.push_back({u, m});

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const Task task = tasks[i];
      const EvalUnit& unit = units[task.unit];
      const std::string& model_name = active[task.model];
      try {
        const std::uint64_t seed =
            derive_seed(options.seed, "train/" + unit.seed_tag + "/" + model_name);
        TrainedPredictor trained =
            trainers.at(model_name)(*unit.data, unit.split.train, seed);
        if (trained.train_fingerprint) {
          const std::uint64_t expected = dataset_fingerprint(*unit.data, unit.split.train);
          if (*trained.train_fingerprint != expected)
            throw std::logic_error("eval: checkpoint was not fit on the assigned train split");
        }
        auto& out = results[task.unit].by_model[task.model];
        out.reserve(unit.split.test.size());
        for (std::size_t idx : unit.split.test) {
          try {
            out.push_back(trained.predict(unit.data->recordings[idx]));
          } catch (const std::domain_error&) {
            results[task.unit].rejected_by_model[task.model] += 1;
            out.push_back(fallback_prediction());
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, options.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // reported rows: requested base models (in canonical order) then fusion
  std::vector<std::string> report_names;
  for (const auto& name : active) {
    if (requested.count(name)) report_names.push_back(name);
  }
  if (want_fusion) report_names.push_back("fusion");

  const std::size_t n_rounds = round_ids.size();
  EvalReport report;
  report.mode = mode;
  report.seed = options.seed;
  report.dataset_size = dataset_size;
  report.epochs = options.adam.epochs;
  report.batch_size = options.adam.batch_size;
  report.rounds = round_ids;

  for (const auto& name : report_names) {
    ModelReport mr;
    mr.name = name;
    const bool is_fusion = name == "fusion";
    std::size_t model_index = 0;
    std::vector<std::size_t> fusion_indices;
    if (is_fusion) {
      for (const auto& base : base_model_names()) {
        const auto it = std::find(active.begin(), active.end(), base);
        fusion_indices.push_back(static_cast<std::size_t>(it - active.begin()));
      }
    } else {
      model_index = static_cast<std::size_t>(
          std::find(active.begin(), active.end(), name) - active.begin());
    }

    std::vector<double> unit_acc(units.size(), 0.0);
    std::vector<std::size_t> units_per_round(n_rounds, 0);
    for (std::size_t u = 0; u < units.size(); ++u) {
      const EvalUnit& unit = units[u];
      long long correct = 0;
      for (std::size_t k = 0; k < unit.split.test.size(); ++k) {
        const int truth = unit.data->recordings[unit.split.test[k]].label;
        RankedPrediction pred;
        if (is_fusion) {
          std::vector<RankedPrediction> voters;
          for (std::size_t mi : fusion_indices) voters.push_back(results[u].by_model[mi][k]);
          pred = borda_fuse(voters);
        } else {
          pred = results[u].by_model[model_index][k];
        }
        mr.conf.add(truth, pred.top());
        if (pred.top() == truth) ++correct;
      }
      unit_acc[u] = unit.split.test.empty()
                        ? 0.0
                        : 100.0 * static_cast<double>(correct) /
                              static_cast<double>(unit.split.test.size());
      units_per_round[unit.round] += 1;
      if (!is_fusion) mr.rejected += results[u].rejected_by_model[model_index];
    }

    mr.per_round_accuracy.assign(n_rounds, 0.0);
    for (std::size_t u = 0; u < units.size(); ++u) {
      mr.per_round_accuracy[units[u].round] +=
          unit_acc[u] / static_cast<double>(units_per_round[units[u].round]);
    }
    double mean = 0.0;
    for (double a : mr.per_round_accuracy) mean += a;
    mean /= static_cast<double>(n_rounds);
    double var = 0.0;
    for (double a : mr.per_round_accuracy) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n_rounds);
    mr.mean_accuracy = mean;
    mr.std_accuracy = std::sqrt(var);
    report.models.push_back(std::move(mr));
  }
  return report;
}

inline std::vector<std::string> select_participants(const std::vector<std::string>& ids,
                                                    std::size_t want, std::uint64_t seed) {
  if (ids.size() <= want) return ids;
  std::vector<std::string> shuffled = ids;
  Rng rng(derive_seed(seed, "participant-selection"));
  rng.shuffle(shuffled);
  shuffled.resize(want);
  std::sort(shuffled.begin(), shuffled.end());
  return shuffled;
}

}  // namespace detail

// Person-dependent protocol: 5-fold stratified cross-validation inside each
// of (up to) 10 selected participants; the per-participant fold-accuracy
// means are then averaged across participants.
inline EvalReport person_dependent_eval_with(const Dataset& ds, const EvalOptions& options,
                                             const TrainerMap& trainers) {
  const auto ids = participants(ds);
  if (ids.size() < 10)
    throw std::domain_error("person_dependent_eval: need >= 10 participants");
  // 10 or 11 participants degrade gracefully to using all of them
  const auto selected = ids.size() <= 11
                            ? ids
                            : detail::select_participants(ids, 10, options.seed);

  std::deque<Dataset> sub_datasets;
  std::vector<detail::EvalUnit> units;
  for (std::size_t round = 0; round < selected.size(); ++round) {
    const std::string& pid = selected[round];
    Dataset sub;
    for (const auto& rec : ds.recordings) {
      if (rec.participant_id == pid) sub.recordings.push_back(rec);
    }
    std::array<std::size_t, 10> per_class{};
    for (const auto& rec : sub.recordings) per_class[static_cast<std::size_t>(rec.label)] += 1;
    for (std::size_t c = 0; c < 10; ++c) {
      if (per_class[c] < 5) {
        throw std::domain_error("person_dependent_eval: participant '" + pid + "' has fewer than 5 instances of class " +
                                std::to_string(c));
      }
    }
    sub_datasets.push_back(std::move(sub));
    const Dataset* data = &sub_datasets.back();
    const auto folds = stratified_kfold(*data, 5, derive_seed(options.seed, "folds/" + pid));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      detail::EvalUnit unit;
      unit.data = data;
      unit.split = folds[f];
      unit.round = round;
      unit.seed_tag = pid + "/fold" + std::to_string(f);
      units.push_back(std::move(unit));
    }
  }
  return detail::run_protocol("dependent", ds.size(), units, selected, trainers, options);
}

// Person-independent protocol: 10 leave-one-person-out rounds with distinct
// seeded-selected withheld participants.
inline EvalReport person_independent_eval_with(const Dataset& ds, const EvalOptions& options,
                                               const TrainerMap& trainers) {
  const auto ids = participants(ds);
  if (ids.size() < 11)
    throw std::domain_error("person_independent_eval: need >= 11 participants");
  const auto selected = detail::select_participants(ids, 10, options.seed);

  std::vector<detail::EvalUnit> units;
  for (std::size_t round = 0; round < selected.size(); ++round) {
    detail::EvalUnit unit;
    unit.data = &ds;
    unit.split = leave_one_person_out(ds, selected[round]);
    unit.round = round;
    unit.seed_tag = "lopo/" + selected[round];
    units.push_back(std::move(unit));
  }
  return detail::run_protocol("independent", ds.size(), units, selected, trainers, options);
}

inline EvalReport person_dependent_eval(const Dataset& ds, const EvalOptions& options) {
  return person_dependent_eval_with(ds, options, make_nn_trainers(options));
}

inline EvalReport person_independent_eval(const Dataset& ds, const EvalOptions& options) {
  return person_independent_eval_with(ds, options, make_nn_trainers(options));
}

constexpr const char* kReportFormat = "airscript-report/1";

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["format"] = kReportFormat;
  j["mode"] = report.mode;
  j["seed"] = report.seed;
  j["dataset_size"] = report.dataset_size;
  j["epochs"] = report.epochs;
  j["batch_size"] = report.batch_size;
  j["rounds"] = report.rounds;
  auto& models = j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : report.models) {
    nlohmann::ordered_json jm;
    jm["name"] = m.name;
    jm["per_round_accuracy"] = m.per_round_accuracy;
    jm["mean_accuracy"] = m.mean_accuracy;
    jm["std_accuracy"] = m.std_accuracy;
    jm["rejected"] = m.rejected;
    auto& conf = jm["confusion"] = nlohmann::ordered_json::array();
    for (const auto& row : m.conf.counts) conf.push_back(row);
    models.push_back(std::move(jm));
  }
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != kReportFormat)
    throw std::runtime_error("report_from_json: unknown format version");
  EvalReport report;
  report.mode = j.at("mode").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.dataset_size = j.at("dataset_size").get<std::size_t>();
  report.epochs = j.at("epochs").get<std::size_t>();
  report.batch_size = j.at("batch_size").get<std::size_t>();
  report.rounds = j.at("rounds").get<std::vector<std::string>>();
  for (const auto& jm : j.at("models")) {
    ModelReport m;
    m.name = jm.at("name").get<std::string>();
    m.per_round_accuracy = jm.at("per_round_accuracy").get<std::vector<double>>();
    m.mean_accuracy = jm.at("mean_accuracy").get<double>();
    m.std_accuracy = jm.at("std_accuracy").get<double>();
    m.rejected = jm.at("rejected").get<long long>();
    const auto& conf = jm.at("confusion");
    for (std::size_t r = 0; r < 10; ++r)
      for (std::size_t c = 0; c < 10; ++c) m.conf.counts[r][c] = conf.at(r).at(c).get<long long>();
    report.models.push_back(std::move(m));
  }
  return report;
}

// Text table in the style of the usual accuracy summaries, one decimal.
inline std::string summarize(const EvalReport& report) {
  std::ostringstream out;
  out << "person-" << report.mode << " evaluation | seed " << report.seed << " | "
      << report.rounds.size() << " rounds | " << report.epochs << " epochs\n";
  out << "classifier | mean accuracy (%) | std deviation\n";
  char buf[64];
  for (const auto& m : report.models) {
    std::snprintf(buf, sizeof(buf), "%.1f | %.1f", m.mean_accuracy, m.std_accuracy);
    out << m.name << " | " << buf << "\n";
  }
  return out.str();
}

}  // namespace airscript
