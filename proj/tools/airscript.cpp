// Command-line entry point wiring the airscript library into the user
// workflows: synthesize datasets, visualize recordings, train classifiers,
// run the evaluation protocols, and predict digits.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airscript/airscript.hpp"

namespace {

struct DifVizFlags {
  double sensitivity = 5.0;
  double pixel_density = 1.0;
  double frame_duration = 0.02;
  std::string rounding = "per-step";

  airscript::DifVizConfig config() const {
    airscript::DifVizConfig c;
    c.sensitivity = sensitivity;
    c.pixel_density = pixel_density;
    c.frame_duration = frame_duration;
    if (rounding == "per-step") {
      c.rounding = airscript::RoundingMode::PerStepRound;
    } else if (rounding == "carry") {
      c.rounding = airscript::RoundingMode::RemainderCarry;
    } else {
      throw CLI::ValidationError("--rounding must be 'per-step' or 'carry'");
    }
    return c;
  }
};

void add_difviz_flags(CLI::App* cmd, DifVizFlags& flags) {
  cmd->add_option("--sensitivity", flags.sensitivity, "2-DifViz sensitivity (pixels per degree)")
      ->capture_default_str();
  cmd->add_option("--pixel-density", flags.pixel_density, "2-DifViz pixel density multiplier")
      ->capture_default_str();
  cmd->add_option("--frame-duration", flags.frame_duration, "Frame duration F in seconds")
      ->capture_default_str();
  cmd->add_option("--rounding", flags.rounding,
                  "Integer conversion mode: per-step or carry")
      ->capture_default_str();
}

std::size_t threads_from_env() {
  if (const char* env = std::getenv("AIRSCRIPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

const airscript::Recording& recording_at(const airscript::Dataset& ds, long long index) {
  if (index < 0 || static_cast<std::size_t>(index) >= ds.size()) {
    throw std::domain_error("index " + std::to_string(index) + " out of range (dataset has " +
                            std::to_string(ds.size()) + " recordings)");
  }
  return ds.recordings[static_cast<std::size_t>(index)];
}

int run(int argc, char** argv) {
  CLI::App app{"airscript: air-written digit reconstruction and recognition"};
  app.require_subcommand(1);

  std::string template_dir = airscript::default_template_dir();
  app.add_option("--templates", template_dir, "Digit template directory")
      ->capture_default_str();

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic IMU dataset");
  std::size_t participants = 12, per_digit = 10;
  std::uint64_t synth_seed = 0;
  std::string synth_out, noise = "default";
  DifVizFlags synth_difviz;
  synth->add_option("--participants", participants, "Number of simulated participants")
      ->capture_default_str();
  synth->add_option("--per-digit", per_digit, "Recordings per digit per participant")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->required();
  synth->add_option("--out", synth_out, "Output JSONL path")->required();
  synth->add_option("--noise", noise, "Noise profile: default or off")->capture_default_str();
  add_difviz_flags(synth, synth_difviz);

  // ---- viz ----
  auto* viz = app.add_subcommand("viz", "Render one recording via 2-DifViz");
  std::string viz_in, viz_out;
  long long viz_index = 0;
  int viz_size = 256;
  DifVizFlags viz_difviz;
  viz->add_option("--in", viz_in, "Input JSONL dataset")->required();
  viz->add_option("--index", viz_index, "Recording index")->required();
  viz->add_option("--out", viz_out, "Output file (.svg or .png)")->required();
  viz->add_option("--size", viz_size, "Raster size in pixels (.png only)")->capture_default_str();
  add_difviz_flags(viz, viz_difviz);

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train one classifier");
  std::string train_model_name, train_data, train_out;
  std::uint64_t train_seed = 0;
  std::size_t train_epochs = 150, train_batch = 16, hidden = 32, raster = 64;
  std::optional<double> train_lr;
  DifVizFlags train_difviz;
  train->add_option("--model", train_model_name, "gru1 | gru2 | cnn")->required();
  train->add_option("--data", train_data, "Training JSONL dataset")->required();
  train->add_option("--seed", train_seed, "Training seed")->required();
  train->add_option("--out", train_out, "Checkpoint output path")->required();
  train->add_option("--epochs", train_epochs, "Training epochs")->capture_default_str();
  train->add_option("--lr", train_lr, "Learning rate (default 0.001 gru / 0.0001 cnn)");
  train->add_option("--batch", train_batch, "Mini-batch size")->capture_default_str();
  train->add_option("--hidden", hidden, "GRU hidden units per direction")->capture_default_str();
  train->add_option("--raster", raster, "CNN raster size")->capture_default_str();
  add_difviz_flags(train, train_difviz);

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Run an evaluation protocol");
  std::string eval_mode, eval_data, eval_report;
  std::uint64_t eval_seed = 0;
  std::vector<std::string> eval_models{"gru1", "gru2", "cnn", "fusion"};
  std::size_t eval_epochs = 60, eval_batch = 16, eval_threads = threads_from_env();
  std::optional<double> eval_lr;
  DifVizFlags eval_difviz;
  eval->add_option("--mode", eval_mode, "dependent | independent")->required();
  eval->add_option("--data", eval_data, "Input JSONL dataset")->required();
  eval->add_option("--seed", eval_seed, "Protocol seed")->required();
  eval->add_option("--report", eval_report, "Report JSON output path")->required();
  eval->add_option("--models", eval_models, "Models to report")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--epochs", eval_epochs, "Per-fold training epochs")->capture_default_str();
  eval->add_option("--batch", eval_batch, "Mini-batch size")->capture_default_str();
  eval->add_option("--lr", eval_lr, "Learning-rate override for every model");
  eval->add_option("--threads", eval_threads, "Worker threads (results are thread-count independent)")
      ->capture_default_str();
  add_difviz_flags(eval, eval_difviz);

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "Rank digits for one recording");
  std::vector<std::string> ckpt_paths;
  std::string predict_in;
  long long predict_index = 0;
  predict->add_option("--ckpt", ckpt_paths, "Checkpoint path (repeat to fuse)")->required();
  predict->add_option("--in", predict_in, "Input JSONL dataset")->required();
  predict->add_option("--index", predict_index, "Recording index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (synth->parsed()) {
    const auto templates = airscript::load_templates(template_dir);
    const auto profile = noise == "off" ? airscript::NoiseProfile::noise_free()
                                        : airscript::NoiseProfile::defaults();
    if (noise != "off" && noise != "default")
      throw std::invalid_argument("--noise must be 'default' or 'off'");
    const auto ds = airscript::generate_dataset(participants, per_digit, profile, synth_seed,
                                                templates, synth_difviz.config());
    airscript::save_jsonl(ds, synth_out);
    std::cout << "wrote " << ds.size() << " recordings (" << participants << " participants x "
              << per_digit << " per digit x 10 digits) to " << synth_out << "\n";
    return 0;
  }

  if (viz->parsed()) {
    const auto ds = airscript::load_jsonl(viz_in);
    const auto& rec = recording_at(ds, viz_index);
    const auto coords = airscript::trajectory(rec, viz_difviz.config());
    if (ends_with(viz_out, ".svg")) {
      const std::string svg = airscript::render_svg(coords);
      std::ofstream out(viz_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open '" + viz_out + "' for writing");
      out << svg;
      if (!out) throw std::runtime_error("write failed for '" + viz_out + "'");
    } else if (ends_with(viz_out, ".png")) {
      airscript::write_png_gray(viz_out, airscript::render_raster(coords, viz_size));
    } else {
      throw std::invalid_argument("unknown output extension (use .svg or .png): " + viz_out);
    }
    std::cout << "rendered recording " << viz_index << " (label " << rec.label << ") to "
              << viz_out << "\n";
    return 0;
  }

  if (train->parsed()) {
    const auto kind = airscript::nn::model_kind_from_string(train_model_name);
    const auto ds = airscript::load_jsonl(train_data);
    if (ds.empty()) throw std::domain_error("training dataset is empty");
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    airscript::nn::TrainOptions opt;
    opt.adam.learning_rate = train_lr.value_or(airscript::nn::default_learning_rate(kind));
    opt.adam.epochs = train_epochs;
    opt.adam.batch_size = train_batch;
    opt.difviz = train_difviz.config();
    opt.hidden_size = hidden;
    opt.raster_size = raster;
    opt.seed = train_seed;
    const auto ckpt = airscript::nn::train_model(kind, ds, all, opt);
    airscript::nn::save_checkpoint(ckpt, train_out);
    std::cout << "trained " << train_model_name << " on " << ds.size() << " recordings for "
              << train_epochs << " epochs";
    if (!ckpt.loss_history.empty()) {
      std::cout << " (first-epoch loss " << ckpt.loss_history.front() << ", final "
                << ckpt.loss_history.back() << ")";
    }
    std::cout << "; checkpoint: " << train_out << "\n";
    return 0;
  }

  if (eval->parsed()) {
    const auto ds = airscript::load_jsonl(eval_data);
    airscript::EvalOptions opt;
    opt.models = eval_models;
    opt.adam.epochs = eval_epochs;
    opt.adam.batch_size = eval_batch;
    opt.lr_override = eval_lr;
    opt.difviz = eval_difviz.config();
    opt.seed = eval_seed;
    opt.threads = eval_threads;
    airscript::EvalReport report;
    if (eval_mode == "dependent") {
      report = airscript::person_dependent_eval(ds, opt);
    } else if (eval_mode == "independent") {
      report = airscript::person_independent_eval(ds, opt);
    } else {
      throw std::invalid_argument("--mode must be 'dependent' or 'independent'");
    }
    std::ofstream out(eval_report, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + eval_report + "' for writing");
    out << airscript::report_to_json(report).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for '" + eval_report + "'");
    std::cout << airscript::summarize(report);
    std::cout << "report written to " << eval_report << "\n";
    return 0;
  }

  if (predict->parsed()) {
    const auto ds = airscript::load_jsonl(predict_in);
    const auto& rec = recording_at(ds, predict_index);
    std::vector<airscript::nn::Predictor> predictors;
    std::vector<std::string> kinds;
    for (const auto& path : ckpt_paths) {
      predictors.emplace_back(airscript::nn::load_checkpoint(path));
      const std::string kind = predictors.back().checkpoint().kind;
      if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end())
        throw std::invalid_argument("duplicate checkpoint kind '" + kind + "'");
      kinds.push_back(kind);
    }
    std::vector<airscript::RankedPrediction> votes;
    for (const auto& p : predictors) votes.push_back(p.predict(rec));
    const airscript::RankedPrediction result =
        votes.size() == 1 ? votes.front() : airscript::borda_fuse(votes);
    std::cout << "recording " << predict_index << " (true label " << rec.label << ")\n";
    for (std::size_t pos = 0; pos < result.labels.size(); ++pos) {
      const int label = result.labels[pos];
      std::printf("%2zu  label %d  score %.6f\n", pos + 1, label,
                  result.scores[static_cast<std::size_t>(label)]);
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::domain_error& e) {
    std::cerr << "airscript: error[domain]: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "airscript: error[usage]: " << e.what() << "\n";
  } catch (const std::logic_error& e) {
    std::cerr << "airscript: error[internal]: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "airscript: error[io]: " << e.what() << "\n";
  }
  return 1;
}
