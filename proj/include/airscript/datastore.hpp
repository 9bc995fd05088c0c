#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "airscript/quat.hpp"
#include "airscript/rng.hpp"

namespace airscript {

// One IMU reading: the 10-channel vector (accel 3, gyro 3, quaternion 4).
struct ImuSample {
  double t = 0.0;       // seconds since recording start
  Vec3 accel;           // g-units
  Vec3 gyro;            // degrees/second; x = pitch, y = yaw, z = roll
  Quaternion quat;      // unit orientation, scalar-first
};

// One pre-segmented air-written digit.
struct Recording {
  std::string participant_id;
  int label = 0;  // 0..9
  double sample_rate_hz = 50.0;
  std::vector<ImuSample> samples;
  // Recorded but never consumed by any model; kept so the schema can carry
  // the full sensor tuple without a format break.
  std::vector<std::array<int, 8>> emg;
};

struct Dataset {
  std::vector<Recording> recordings;

  std::size_t size() const { return recordings.size(); }
  bool empty() const { return recordings.empty(); }
};

inline std::vector<std::string> participants(const Dataset& ds) {
  std::set<std::string> ids;
  for (const auto& r : ds.recordings) ids.insert(r.participant_id);
  return {ids.begin(), ids.end()};
}

namespace detail {

constexpr const char* kRecordingFormat = "airscript-rec/1";

inline nlohmann::ordered_json recording_to_json(const Recording& rec) {
  nlohmann::ordered_json j;
  j["format"] = kRecordingFormat;
  j["participant"] = rec.participant_id;
  j["label"] = rec.label;
  j["rate_hz"] = rec.sample_rate_hz;
  auto& samples = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : rec.samples) {
    nlohmann::ordered_json js;
    js["t"] = s.t;
    js["a"] = {s.accel.x, s.accel.y, s.accel.z};
    js["g"] = {s.gyro.x, s.gyro.y, s.gyro.z};
    js["q"] = {s.quat.w, s.quat.x, s.quat.y, s.quat.z};
    samples.push_back(std::move(js));
  }
  if (!rec.emg.empty()) {
    auto& emg = j["emg"] = nlohmann::ordered_json::array();
    for (const auto& pods : rec.emg) emg.push_back(pods);
  }
  return j;
}

inline Recording recording_from_json(const nlohmann::json& j) {
  if (!j.contains("format") || !j["format"].is_string())
    throw std::runtime_error("missing format field");
  if (j["format"].get<std::string>() != kRecordingFormat)
    throw std::runtime_error("unknown format version '" + j["format"].get<std::string>() + "'");
  Recording rec;
  rec.participant_id = j.at("participant").get<std::string>();
  rec.label = j.at("label").get<int>();
  if (rec.label < 0 || rec.label > 9) throw std::runtime_error("label out of range 0..9");
  rec.sample_rate_hz = j.at("rate_hz").get<double>();
  const auto& samples = j.at("samples");
  if (!samples.is_array() || samples.size() < 2)
    throw std::runtime_error("recording needs at least 2 samples");
  double prev_t = -std::numeric_limits<double>::infinity();
  rec.samples.reserve(samples.size());
  for (const auto& js : samples) {
    ImuSample s;
    s.t = js.at("t").get<double>();
    if (s.t < prev_t) throw std::runtime_error("timestamps must be non-decreasing");
    prev_t = s.t;
    const auto& a = js.at("a");
    const auto& g = js.at("g");
    const auto& q = js.at("q");
    if (a.size() != 3 || g.size() != 3 || q.size() != 4)
      throw std::runtime_error("sample channel arity mismatch");
    s.accel = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    s.gyro = {g[0].get<double>(), g[1].get<double>(), g[2].get<double>()};
    s.quat = {q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()};
    const double drift = std::abs(norm(s.quat) - 1.0);
    if (drift > 1e-3) throw std::runtime_error("orientation quaternion drifted beyond 1e-3");
    // Renormalize real drift but leave already-unit values bit-identical so
    // save -> load -> save round-trips byte-for-byte.
    if (drift > 1e-9) s.quat = normalize(s.quat);
    rec.samples.push_back(s);
  }
  if (j.contains("emg")) {
    for (const auto& pods : j["emg"]) {
      if (pods.size() != 8) throw std::runtime_error("emg arity mismatch");
      std::array<int, 8> row{};
      for (std::size_t i = 0; i < 8; ++i) row[i] = pods[i].get<int>();
      rec.emg.push_back(row);
    }
  }
  return rec;
}

}  // namespace detail

// One JSON object per line per recording, schema "airscript-rec/1".
inline void save_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_jsonl: cannot open '" + path + "' for writing");
  for (const auto& rec : ds.recordings) {
    out << detail::recording_to_json(rec).dump() << '\n';
  }
  if (!out) throw std::runtime_error("save_jsonl: write failed for '" + path + "'");
}

inline Dataset load_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_jsonl: cannot open '" + path + "'");
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      ds.recordings.push_back(detail::recording_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "load_jsonl: " << path << " line " << line_no << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  if (ds.empty()) {
    std::cerr << "warning: " << path << " contains no recordings\n";
  }
  return ds;
}

// Index-based train/test split of one dataset.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded stratified k-fold partition: per-class shuffle, then deal round
// robin, so per-class test counts across folds differ by at most one.
inline std::vector<Split> stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::domain_error("stratified_kfold: k must be >= 2");
  if (ds.empty()) throw std::domain_error("stratified_kfold: empty dataset");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.recordings[i].label].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw std::domain_error("stratified_kfold: class " + std::to_string(label) +
                              " has fewer than k instances");
    }
  }
  Rng rng(derive_seed(seed, "stratified_kfold"));
  std::vector<std::vector<std::size_t>> fold_members(k);
  for (auto& [label, members] : by_class) {
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold_members[i % k].push_back(members[i]);
    }
  }
  std::vector<Split> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g = 0; g < k; ++g) {
      auto& dst = (g == f) ? folds[f].test : folds[f].train;
      dst.insert(dst.end(), fold_members[g].begin(), fold_members[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
    std::sort(folds[f].test.begin(), folds[f].test.end());
  }
  return folds;
}

inline Split leave_one_person_out(const Dataset& ds, const std::string& participant_id) {
  const auto ids = participants(ds);
  if (ids.size() < 2) throw std::domain_error("leave_one_person_out: need >= 2 participants");
  if (std::find(ids.begin(), ids.end(), participant_id) == ids.end())
    throw std::domain_error("leave_one_person_out: unknown participant '" + participant_id + "'");
  Split split;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.recordings[i].participant_id == participant_id ? split.test : split.train).push_back(i);
  }
  return split;
}

// Content hash of a train split; embedded in checkpoints so evaluation can
// assert a model was fit on exactly the split it is paired with.
inline std::uint64_t dataset_fingerprint(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_double = [&](double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  };
  for (std::size_t i : idx) {
    const Recording& r = ds.recordings[i];
    h ^= fnv1a64(r.participant_id);
    mix(static_cast<std::uint64_t>(r.label));
    mix(r.samples.size());
    for (const auto& s : r.samples) {
      mix_double(s.t);
      mix_double(s.gyro.x);
      mix_double(s.gyro.y);
      mix_double(s.gyro.z);
      mix_double(s.quat.w);
      mix_double(s.accel.x);
    }
  }
  return h;
}

}  // namespace airscript
