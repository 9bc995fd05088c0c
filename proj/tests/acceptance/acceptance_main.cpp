// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exits nonzero if any criterion fails.
//
// The long-running synthetic benchmark (criterion 7) honors AIRSCRIPT_THREADS.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "airscript/airscript.hpp"
#include "../oracles.hpp"

namespace fs = std::filesystem;
using namespace airscript;

namespace {

std::string failure;  // set by check() on first failure inside a criterion

bool check(bool cond, const std::string& what) {
  if (!cond && failure.empty()) failure = what;
  return cond;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::size_t threads_from_env() {
  if (const char* env = std::getenv("AIRSCRIPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "airscript_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<unreadable>";
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------- 1
std::string quaternion_oracle() {
  Rng rng(9001);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Quaternion q = random_unit_quaternion(rng);
    const Vec3 v{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 a = rotate_vector(q, v);
    const Vec3 b = oracles::rotate_by_matrix(q, v);
    worst = std::max({worst, std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
  }
  check(worst < 1e-9, "rotation-matrix oracle max error " + fmt(worst, 12));

  const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  auto close = [](const Quaternion& a, const Quaternion& b) {
    return std::max({std::abs(a.w - b.w), std::abs(a.x - b.x), std::abs(a.y - b.y),
                     std::abs(a.z - b.z)}) <= 1e-12;
  };
  check(close(hamilton(i, j), k), "i*j != k");
  check(close(hamilton(j, k), i), "j*k != i");
  check(close(hamilton(k, i), j), "k*i != j");
  check(close(hamilton(i, i), Quaternion{-1, 0, 0, 0}), "i*i != -1");
  return failure.empty() ? "max rotation error " + fmt(worst, 12) : failure;
}

// ---------------------------------------------------------------- 2
std::string difviz_step_oracle() {
  Rng rng(9002);
  for (int n = 0; n < 100; ++n) {
    Recording rec;
    rec.participant_id = "a";
    const std::size_t len = 40 + rng.index(120);
    for (std::size_t t = 0; t < len; ++t) {
      ImuSample s;
      s.t = 0.02 * static_cast<double>(t);
      s.gyro = {rng.uniform(-250, 250), rng.uniform(-250, 250), rng.uniform(-250, 250)};
      s.quat = random_unit_quaternion(rng);
      rec.samples.push_back(s);
    }
    for (RoundingMode mode : {RoundingMode::PerStepRound, RoundingMode::RemainderCarry}) {
      DifVizConfig cfg;
      cfg.rounding = mode;
      const auto got = trajectory(rec, cfg);
      const auto expected = oracles::scalar_difviz(rec, cfg);
      if (!check(got.points.size() == expected.size(), "length mismatch")) return failure;
      for (std::size_t p = 0; p < expected.size(); ++p) {
        if (!check(got.points[p].x == expected[p].first &&
                       got.points[p].y == expected[p].second,
                   "integer mismatch at recording " + std::to_string(n) + " point " +
                       std::to_string(p)))
          return failure;
      }
    }
  }
  return "100 recordings, both rounding modes, exact";
}

// ---------------------------------------------------------------- 3
std::string round_trip_reconstruction() {
  const auto templates = load_templates(default_template_dir());
  DifVizConfig cfg;
  cfg.rounding = RoundingMode::RemainderCarry;
  Rng rng(9003);
  double worst = 0.0;
  for (int digit = 0; digit < 10; ++digit) {
    for (int trial = 0; trial < 20; ++trial) {
      ParticipantStyle style;
      style.scale = rng.uniform(150, 300);
      style.speed_factor = rng.uniform(0.85, 1.3);
      style.base_orientation = random_unit_quaternion(rng);
      const auto traced = generate_recording_traced(
          templates[static_cast<std::size_t>(digit)], style, cfg,
          derive_seed(9003, std::to_string(digit) + "/" + std::to_string(trial)), "p00");
      const auto coords = trajectory(traced.recording, cfg);
      std::vector<RealPoint> got;
      for (const auto& p : coords.points)
        got.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
      const double rmse = oracles::aligned_rmse_normalized(got, traced.target_path);
      worst = std::max(worst, rmse);
      if (!check(rmse < 0.05, "digit " + std::to_string(digit) + " trial " +
                                  std::to_string(trial) + " normalized RMSE " + fmt(rmse, 4)))
        return failure;
    }
  }
  return "10 digits x 20 orientations, worst normalized RMSE " + fmt(worst, 4);
}

// ---------------------------------------------------------------- 4
std::string preprocessing_invariants() {
  Rng rng(9004);
  for (int n = 0; n < 1000; ++n) {
    std::vector<RealPoint> pts;
    const std::size_t len = 2 + rng.index(150);
    double x = 0, y = 0;
    for (std::size_t i = 0; i < len; ++i) {
      x += rng.uniform(-8, 8);
      y += rng.uniform(-8, 8);
      pts.push_back({x, y});
    }

    try {
      const auto scaled = standard_scale(pts);
      double mean = 0;
      for (const auto& p : scaled) mean += p.x + p.y;
      mean /= 2.0 * static_cast<double>(scaled.size());
      double var = 0;
      for (const auto& p : scaled)
        var += (p.x - mean) * (p.x - mean) + (p.y - mean) * (p.y - mean);
      var /= 2.0 * static_cast<double>(scaled.size());
      if (!check(std::abs(mean) < 1e-9, "whitened mean " + fmt(mean, 12))) return failure;
      if (!check(std::abs(std::sqrt(var) - 1.0) < 1e-9, "whitened std " + fmt(std::sqrt(var), 12)))
        return failure;
    } catch (const std::domain_error&) {
      // degenerate random walk; legitimately rejected
    }

    if (!check(interpolate_to(pts, 100).size() == 100, "interpolated length != 100"))
      return failure;

    const auto thinned = remove_redundant(pts);
    for (std::size_t i = 1; i < thinned.size(); ++i) {
      const double dx = thinned[i].x - thinned[i - 1].x;
      const double dy = thinned[i].y - thinned[i - 1].y;
      if (!check(std::sqrt(dx * dx + dy * dy) > 5.0, "redundant gap <= 5 survived"))
        return failure;
    }
  }

  Rng rng2(9005);
  for (int n = 0; n < 200; ++n) {
    const std::size_t rows = 2 + rng2.index(120);
    const std::size_t t_max = 2 + rng2.index(200);
    std::array<double, kImuChannels> slope{}, intercept{};
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      slope[c] = rng2.uniform(-3, 3);
      intercept[c] = rng2.uniform(-5, 5);
    }
    std::vector<ImuRow> m(rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < kImuChannels; ++c)
        m[r][c] = intercept[c] + slope[c] * static_cast<double>(r);
    const auto out = resample(m, t_max);
    const double step = static_cast<double>(rows - 1) / static_cast<double>(t_max - 1);
    for (std::size_t r = 0; r < t_max; ++r) {
      const double t = static_cast<double>(r) * step;
      for (std::size_t c = 0; c < kImuChannels; ++c) {
        if (!check(std::abs(out.rows[r][c] - (intercept[c] + slope[c] * t)) < 1e-9,
                   "resample bent a linear channel"))
          return failure;
      }
    }
  }
  return "1000 sequences + 200 linear resamples";
}

// ---------------------------------------------------------------- 5
template <typename LossFn>
double fd_worst(Tensor& param, const Tensor& analytic, LossFn&& loss_fn) {
  double worst = 0.0;
  const double eps = 1e-5;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double saved = param[i];
    param[i] = saved + eps;
    const double up = loss_fn();
    param[i] = saved - eps;
    const double down = loss_fn();
    param[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

std::string gradient_checks() {
  using namespace airscript::nn;
  Rng rng(9006);
  double worst = 0.0;

  // GRU cell and BGRU classifier: hidden 4, sequence lengths 1 and 5
  for (const std::size_t seq_len : {std::size_t{1}, std::size_t{5}}) {
    BgruClassifier model(3, 4);
    nn::detail::init_bgru(model, rng);
    std::vector<std::vector<double>> xs;
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> x(seq_len * 3);
      for (auto& v : x) v = rng.uniform(-1, 1);
      xs.push_back(std::move(x));
      labels.push_back(static_cast<int>(rng.index(10)));
    }
    auto loss_of = [&] {
      BgruWork work;
      double loss = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        loss += cross_entropy(bgru_probs(model, xs[i].data(), seq_len, work), labels[i]);
      return loss / static_cast<double>(xs.size());
    };
    BgruGrads grads(model);
    grads.zero();
    BgruWork work;
    for (std::size_t i = 0; i < xs.size(); ++i)
      bgru_sample_grad(model, xs[i].data(), seq_len, labels[i], grads, work);
    for (Tensor* g : {&grads.fwd.w, &grads.fwd.u, &grads.fwd.b, &grads.bwd.w, &grads.bwd.u,
                          &grads.bwd.b, &grads.w_out, &grads.b_out}) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] /= 3.0;
    }
    const std::vector<std::pair<Tensor*, const Tensor*>> pairs{
        {&model.fwd.w, &grads.fwd.w}, {&model.fwd.u, &grads.fwd.u},
        {&model.fwd.b, &grads.fwd.b}, {&model.bwd.w, &grads.bwd.w},
        {&model.bwd.u, &grads.bwd.u}, {&model.bwd.b, &grads.bwd.b},
        {&model.w_out, &grads.w_out}, {&model.b_out, &grads.b_out}};
    for (const auto& [param, grad] : pairs) {
      const double err = fd_worst(*param, *grad, loss_of);
      worst = std::max(worst, err);
      if (!check(err < 1e-4, "BGRU (seq " + std::to_string(seq_len) +
                                 ") gradient relative error " + fmt(err, 8)))
        return failure;
    }
  }

  // CNN: 16x16 input with proportionally scaled layers (8->2, 16->4 filters)
  {
    CnnConfig cfg;
    cfg.input_size = 16;
    cfg.conv1_filters = 2;
    cfg.conv2_filters = 4;
    CnnParams model(cfg);
    nn::detail::init_cnn(model, rng);
    std::vector<std::vector<double>> imgs;
    std::vector<int> labels;
    for (int i = 0; i < 2; ++i) {
      std::vector<double> img(16 * 16);
      for (auto& v : img) v = rng.uniform(0, 1);
      imgs.push_back(std::move(img));
      labels.push_back(static_cast<int>(rng.index(10)));
    }
    auto loss_of = [&] {
      CnnWork work;
      double loss = 0.0;
      for (std::size_t i = 0; i < imgs.size(); ++i)
        loss += cross_entropy(cnn_probs(model, imgs[i].data(), work), labels[i]);
      return loss / static_cast<double>(imgs.size());
    };
    CnnGrads grads(model);
    grads.zero();
    CnnWork work;
    for (std::size_t i = 0; i < imgs.size(); ++i)
      cnn_sample_grad(model, imgs[i].data(), labels[i], grads, work);
    for (Tensor* g :
         {&grads.k1, &grads.b1, &grads.k2, &grads.b2, &grads.w_dense, &grads.b_dense}) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] /= 2.0;
    }
    const std::vector<std::pair<Tensor*, const Tensor*>> pairs{
        {&model.k1, &grads.k1},           {&model.b1, &grads.b1},
        {&model.k2, &grads.k2},           {&model.b2, &grads.b2},
        {&model.w_dense, &grads.w_dense}, {&model.b_dense, &grads.b_dense}};
    for (const auto& [param, grad] : pairs) {
      const double err = fd_worst(*param, *grad, loss_of);
      worst = std::max(worst, err);
      if (!check(err < 1e-4, "CNN gradient relative error " + fmt(err, 8))) return failure;
    }
  }
  return "worst relative error " + fmt(worst, 8);
}

// ---------------------------------------------------------------- 6
template <std::size_t M>
BasicRanked<M> ranked_from_order(const std::array<int, M>& order) {
  BasicRanked<M> p;
  p.labels = order;
  const double total = static_cast<double>(M * (M + 1) / 2);
  for (std::size_t pos = 0; pos < M; ++pos)
    p.scores[static_cast<std::size_t>(order[pos])] = static_cast<double>(M - pos) / total;
  return p;
}

std::string borda_exhaustive() {
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> base{0, 1, 2, 3};
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));

  std::size_t cases = 0;
  for (const auto& a : perms)
    for (const auto& b : perms)
      for (const auto& c : perms) {
        const std::vector<BasicRanked<4>> voters{ranked_from_order<4>(a), ranked_from_order<4>(b),
                                                 ranked_from_order<4>(c)};
        std::vector<std::array<int, 4>> rankings{a, b, c};
        std::vector<std::array<double, 4>> scores;
        for (const auto& v : voters) scores.push_back(v.scores);
        if (!check(borda_fuse(voters).labels == oracles::brute_force_borda<4>(rankings, scores),
                   "exhaustive case " + std::to_string(cases) + " disagrees with brute force"))
          return failure;
        ++cases;
      }
  if (!check(cases == 13824, "expected 13824 cases, ran " + std::to_string(cases)))
    return failure;

  Rng rng(9007);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<RankedPrediction> voters;
    const std::size_t n = 2 + rng.index(4);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
      rng.shuffle(pool);
      std::array<int, 10> order;
      std::copy(pool.begin(), pool.end(), order.begin());
      voters.push_back(ranked_from_order<10>(order));
    }
    const auto fused = borda_fuse(voters);
    std::vector<RankedPrediction> shuffled = voters;
    rng.shuffle(shuffled);
    if (!check(borda_fuse(shuffled).labels == fused.labels, "voter-order variance"))
      return failure;

    const std::size_t v = rng.index(voters.size());
    const std::size_t pos = 1 + rng.index(9);
    const int promoted = voters[v].labels[pos];
    const auto before = borda_tally(voters);
    std::swap(voters[v].labels[pos], voters[v].labels[pos - 1]);
    const auto after = borda_tally(voters);
    if (!check(after.points[static_cast<std::size_t>(promoted)] >=
                   before.points[static_cast<std::size_t>(promoted)],
               "promotion lowered a point total"))
      return failure;
  }
  return "13824 exhaustive + 10000 random cases";
}

// ---------------------------------------------------------------- 7
std::string benchmark_detail;

std::string synthetic_benchmark() {
  const auto templates = load_templates(default_template_dir());
  const Dataset ds = generate_dataset(12, 10, NoiseProfile::defaults(), 42, templates);
  if (!check(ds.size() == 1200, "benchmark dataset size != 1200")) return failure;

  EvalOptions opt;
  opt.seed = 42;
  opt.threads = threads_from_env();

  auto fusion_and_best = [](const EvalReport& report) {
    double fusion = -1.0, best_base = -1.0;
    for (const auto& m : report.models) {
      if (m.name == "fusion") {
        fusion = m.mean_accuracy;
      } else {
        best_base = std::max(best_base, m.mean_accuracy);
      }
    }
    return std::make_pair(fusion, best_base);
  };

  const EvalReport independent = person_independent_eval(ds, opt);
  const auto [pi_fusion, pi_best] = fusion_and_best(independent);
  const EvalReport dependent = person_dependent_eval(ds, opt);
  const auto [pd_fusion, pd_best] = fusion_and_best(dependent);

  std::ostringstream ss;
  ss << "PI fusion " << fmt(pi_fusion, 1) << "% (best single " << fmt(pi_best, 1)
     << "%), PD fusion " << fmt(pd_fusion, 1) << "% (best single " << fmt(pd_best, 1)
     << "%)";
  benchmark_detail = ss.str();

  check(pi_fusion >= 90.0, "person-independent fusion " + fmt(pi_fusion, 2) + "% < 90%");
  check(pd_fusion >= 95.0, "person-dependent fusion " + fmt(pd_fusion, 2) + "% < 95%");
  check(pi_fusion >= pi_best - 2.0,
        "PI fusion " + fmt(pi_fusion, 2) + "% more than 2 points below best single " +
            fmt(pi_best, 2) + "%");
  check(pd_fusion >= pd_best - 2.0,
        "PD fusion " + fmt(pd_fusion, 2) + "% more than 2 points below best single " +
            fmt(pd_best, 2) + "%");
  return failure.empty() ? benchmark_detail : failure + " [" + benchmark_detail + "]";
}

// ---------------------------------------------------------------- 8
std::string determinism() {
  const char* bin_env = std::getenv("AIRSCRIPT_BIN");
  if (!check(bin_env != nullptr, "AIRSCRIPT_BIN not set")) return failure;
  const std::string bin = bin_env;
  const fs::path dir = work_dir();

  auto run = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  const fs::path data = dir / "det_data.jsonl";
  if (!check(run("synth --participants 10 --per-digit 5 --seed 77 --out " + data.string()) == 0,
             "synth failed"))
    return failure;

  const fs::path ck1 = dir / "det1.ckpt", ck2 = dir / "det2.ckpt";
  const std::string train_args = "train --model gru1 --data " + data.string() +
                                 " --seed 5 --epochs 2 --out ";
  if (!check(run(train_args + ck1.string()) == 0, "train run 1 failed")) return failure;
  if (!check(run(train_args + ck2.string()) == 0, "train run 2 failed")) return failure;
  if (!check(slurp(ck1) == slurp(ck2), "cmd_train reruns differ")) return failure;

  const fs::path r1 = dir / "det_r1.json", r2 = dir / "det_r2.json", r4 = dir / "det_r4.json";
  const std::string eval_args = "eval --mode dependent --data " + data.string() +
                                " --seed 19 --models fusion --epochs 1 --report ";
  if (!check(run(eval_args + r1.string() + " --threads 1") == 0, "eval run 1 failed"))
    return failure;
  if (!check(run(eval_args + r2.string() + " --threads 1") == 0, "eval run 2 failed"))
    return failure;
  if (!check(run(eval_args + r4.string() + " --threads 4") == 0, "eval run (4 threads) failed"))
    return failure;
  if (!check(slurp(r1) == slurp(r2), "cmd_eval reruns differ")) return failure;
  if (!check(slurp(r1) == slurp(r4), "cmd_eval output depends on --threads")) return failure;
  return "train x2 and eval x3 (1/1/4 threads) byte-identical";
}

// ---------------------------------------------------------------- 9
std::string split_properties() {
  const auto templates = load_templates(default_template_dir());
  const Dataset ds = generate_dataset(12, 10, NoiseProfile::defaults(), 5150, templates);

  const auto folds = stratified_kfold(ds, 5, 99);
  std::vector<int> test_hits(ds.size(), 0);
  for (const auto& fold : folds) {
    std::array<int, 10> per_class{};
    for (std::size_t i : fold.test) {
      per_class[static_cast<std::size_t>(ds.recordings[i].label)] += 1;
      test_hits[i] += 1;
    }
    for (int c = 0; c < 10; ++c) {
      // 120 per class over 5 folds: exactly 24, and never further than 1 off
      if (!check(std::abs(per_class[static_cast<std::size_t>(c)] - 24) <= 1,
                 "stratification off by more than 1"))
        return failure;
    }
    std::vector<std::size_t> all = fold.train;
    all.insert(all.end(), fold.test.begin(), fold.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!check(all[i] == i, "fold does not partition the dataset")) return failure;
    }
  }
  for (int hits : test_hits) {
    if (!check(hits == 1, "a recording appears in multiple test folds")) return failure;
  }

  std::vector<int> lopo_hits(ds.size(), 0);
  for (const auto& pid : participants(ds)) {
    const Split split = leave_one_person_out(ds, pid);
    for (std::size_t i : split.test) {
      if (!check(ds.recordings[i].participant_id == pid, "test participant leaked")) return failure;
      lopo_hits[i] += 1;
    }
    for (std::size_t i : split.train) {
      if (!check(ds.recordings[i].participant_id != pid, "train participant leaked"))
        return failure;
    }
  }
  for (int hits : lopo_hits) {
    if (!check(hits == 1, "LOPO sweep does not cover each recording exactly once"))
      return failure;
  }
  return "5-fold stratification and 12-participant LOPO sweep";
}

// ---------------------------------------------------------------- 10
std::string format_round_trips() {
  const auto templates = load_templates(default_template_dir());
  const Dataset ds = generate_dataset(12, 10, NoiseProfile::defaults(), 42, templates);
  const fs::path dir = work_dir();
  const fs::path p1 = dir / "fmt1.jsonl", p2 = dir / "fmt2.jsonl";
  const auto t0 = std::chrono::steady_clock::now();
  save_jsonl(ds, p1.string());
  const Dataset loaded = load_jsonl(p1.string());
  save_jsonl(loaded, p2.string());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!check(slurp(p1) == slurp(p2), "JSONL save->load->save not byte-identical"))
    return failure;

  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < 40; ++i) subset.push_back(i);
  nn::TrainOptions topt;
  topt.adam.epochs = 1;
  topt.seed = 1;
  const auto ckpt = nn::train_model(nn::ModelKind::Gru2, ds, subset, topt);
  const fs::path c1 = dir / "fmt1.ckpt", c2 = dir / "fmt2.ckpt";
  nn::save_checkpoint(ckpt, c1.string());
  nn::save_checkpoint(nn::load_checkpoint(c1.string()), c2.string());
  if (!check(slurp(c1) == slurp(c2), "checkpoint save->load->save not byte-identical"))
    return failure;
  return "1200-recording JSONL (" + fmt(secs, 2) + " s) and gru2 checkpoint";
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "quaternion oracle", quaternion_oracle},
      {2, "2-DifViz step oracle", difviz_step_oracle},
      {3, "round-trip reconstruction", round_trip_reconstruction},
      {4, "preprocessing invariants", preprocessing_invariants},
      {5, "gradient checks", gradient_checks},
      {6, "Borda exhaustive oracle", borda_exhaustive},
      {7, "synthetic benchmark", synthetic_benchmark},
      {8, "determinism", determinism},
      {9, "split-protocol properties", split_properties},
      {10, "format round-trips", format_round_trips},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end())
      continue;
    failure.clear();
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = criterion.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
      detail = failure;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool passed = failure.empty();
    failures += passed ? 0 : 1;
    std::printf("%s  criterion %2d  %-28s %8.1fs  %s\n", passed ? "PASS" : "FAIL",
                criterion.id, criterion.name, secs, detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
