#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "airscript/datastore.hpp"
#include "airscript/difviz.hpp"

namespace airscript {

// Real-valued trajectory point; same axis semantics as PixelPoint.
struct RealPoint {
  double x = 0.0;
  double y = 0.0;
};

// 5-point centered moving average with replicate padding at the ends.
// Length-preserving.
inline std::vector<RealPoint> smooth(const CoordinateSequence& coords) {
  const auto& pts = coords.points;
  if (pts.empty()) throw std::domain_error("smooth: empty sequence");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
  std::vector<RealPoint> out(pts.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sx = 0.0, sy = 0.0;
    for (std::ptrdiff_t k = i - 2; k <= i + 2; ++k) {
      const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(k, 0, n - 1);
      sx += pts[static_cast<std::size_t>(j)].x;
      sy += pts[static_cast<std::size_t>(j)].y;
    }
    out[static_cast<std::size_t>(i)] = {sx / 5.0, sy / 5.0};
  }
  return out;
}

// Drops points closer than `threshold` (Euclidean) to the last kept point,
// so every surviving consecutive pair is strictly farther apart than the
// threshold. The first point is always kept.
inline std::vector<RealPoint> remove_redundant(const std::vector<RealPoint>& pts,
                                               double threshold = 5.0) {
  if (pts.empty()) throw std::domain_error("remove_redundant: empty sequence");
  std::vector<RealPoint> out;
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].x - out.back().x;
    const double dy = pts[i].y - out.back().y;
    if (std::sqrt(dx * dx + dy * dy) > threshold) out.push_back(pts[i]);
  }
  return out;
}

// Whitens the sequence with one mean and one standard deviation computed
// jointly over both coordinates (population formula).
inline std::vector<RealPoint> standard_scale(const std::vector<RealPoint>& pts) {
  if (pts.size() < 2) throw std::domain_error("standard_scale: need at least 2 points");
  double mean = 0.0;
  for (const auto& p : pts) mean += p.x + p.y;
  const double count = 2.0 * static_cast<double>(pts.size());
  mean /= count;
  double var = 0.0;
  for (const auto& p : pts) {
    var += (p.x - mean) * (p.x - mean) + (p.y - mean) * (p.y - mean);
  }
  var /= count;
  if (var == 0.0) throw std::domain_error("standard_scale: degenerate all-equal sequence");
  const double sigma = std::sqrt(var);
  std::vector<RealPoint> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = {(pts[i].x - mean) / sigma, (pts[i].y - mean) / sigma};
  }
  return out;
}

// Piecewise-linear resampling at `target_len` uniformly spaced index
// parameters. Endpoints are preserved exactly.
inline std::vector<RealPoint> interpolate_to(const std::vector<RealPoint>& pts,
                                             std::size_t target_len = 100) {
  if (pts.size() < 2) throw std::domain_error("interpolate_to: need at least 2 points");
  if (target_len < 2) throw std::domain_error("interpolate_to: target length must be >= 2");
  std::vector<RealPoint> out(target_len);
  out.front() = pts.front();
  out.back() = pts.back();
  const double step = static_cast<double>(pts.size() - 1) / static_cast<double>(target_len - 1);
  for (std::size_t j = 1; j + 1 < target_len; ++j) {
    const double t = static_cast<double>(j) * step;
    std::size_t idx = static_cast<std::size_t>(t);
    if (idx >= pts.size() - 1) idx = pts.size() - 2;
    const double frac = t - static_cast<double>(idx);
    out[j] = {pts[idx].x + frac * (pts[idx + 1].x - pts[idx].x),
              pts[idx].y + frac * (pts[idx + 1].y - pts[idx].y)};
  }
  return out;
}

// Fixed-length, whitened 2-DifViz feature sequence.
struct ProcessedSequence {
  std::vector<RealPoint> values;  // length exactly 100
};

constexpr std::size_t kProcessedLength = 100;

// Full chain: smooth -> redundancy removal -> whitening ->
// interpolation. Throws if redundancy removal leaves fewer than 2 points or
// if the trajectory degenerates to a single spot.
inline ProcessedSequence preprocess_difviz(const CoordinateSequence& coords) {
  auto pts = remove_redundant(smooth(coords));
  if (pts.size() < 2) {
    throw std::domain_error("preprocess_difviz: unusable recording (trajectory collapsed)");
  }
  return {interpolate_to(standard_scale(pts), kProcessedLength)};
}

// --- raw-IMU chain ---

constexpr std::size_t kImuChannels = 10;

// Channel order [a g q] = accel xyz, gyro xyz, quat wxyz.
using ImuRow = std::array<double, kImuChannels>;

inline ImuRow imu_row(const ImuSample& s) {
  return {s.accel.x, s.accel.y, s.accel.z, s.gyro.x,   s.gyro.y,
          s.gyro.z,  s.quat.w,  s.quat.x,  s.quat.y,   s.quat.z};
}

inline std::vector<ImuRow> to_matrix(const Recording& rec) {
  std::vector<ImuRow> m;
  m.reserve(rec.samples.size());
  for (const auto& s : rec.samples) m.push_back(imu_row(s));
  return m;
}

// Fitted on the training split only.
struct ScalerStats {
  std::array<double, kImuChannels> max_abs{};
  std::size_t t_max = 0;

  friend bool operator==(const ScalerStats& a, const ScalerStats& b) {
    return a.max_abs == b.max_abs && a.t_max == b.t_max;
  }
};

inline ScalerStats fit_scaler(const Dataset& ds, const std::vector<std::size_t>& train_idx) {
  if (train_idx.empty()) throw std::domain_error("fit_scaler: empty training set");
  ScalerStats stats;
  for (std::size_t i : train_idx) {
    const Recording& rec = ds.recordings[i];
    stats.t_max = std::max(stats.t_max, rec.samples.size());
    for (const auto& s : rec.samples) {
      const ImuRow row = imu_row(s);
      for (std::size_t c = 0; c < kImuChannels; ++c) {
        stats.max_abs[c] = std::max(stats.max_abs[c], std::abs(row[c]));
      }
    }
  }
  return stats;
}

struct StandardizedImu {
  std::vector<ImuRow> rows;  // t_max rows
};

// Divides each channel by its training max-abs; training data lands in
// [-1, 1], unseen test extremes are clamped to [-1.5, 1.5]. A channel that
// was identically zero in training scales by 1 (stays zero for train data).
inline std::vector<ImuRow> max_abs_scale(const Recording& rec, const ScalerStats& stats) {
  std::vector<ImuRow> out;
  out.reserve(rec.samples.size());
  for (const auto& s : rec.samples) {
    ImuRow row = imu_row(s);
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      const double div = stats.max_abs[c] > 0.0 ? stats.max_abs[c] : 1.0;
      row[c] = std::clamp(row[c] / div, -1.5, 1.5);
    }
    out.push_back(row);
  }
  return out;
}

// Per-channel linear resampling to t_max rows, endpoints preserved.
inline StandardizedImu resample(const std::vector<ImuRow>& rows, std::size_t t_max) {
  if (rows.size() < 2) throw std::domain_error("resample: need at least 2 rows");
  if (t_max < 2) throw std::domain_error("resample: t_max must be >= 2");
  StandardizedImu out;
  out.rows.resize(t_max);
  out.rows.front() = rows.front();
  out.rows.back() = rows.back();
  const double step = static_cast<double>(rows.size() - 1) / static_cast<double>(t_max - 1);
  for (std::size_t j = 1; j + 1 < t_max; ++j) {
    const double t = static_cast<double>(j) * step;
    std::size_t idx = static_cast<std::size_t>(t);
    if (idx >= rows.size() - 1) idx = rows.size() - 2;
    const double frac = t - static_cast<double>(idx);
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      out.rows[j][c] = rows[idx][c] + frac * (rows[idx + 1][c] - rows[idx][c]);
    }
  }
  return out;
}

inline StandardizedImu preprocess_imu(const Recording& rec, const ScalerStats& stats) {
  return resample(max_abs_scale(rec, stats), stats.t_max);
}

}  // namespace airscript
