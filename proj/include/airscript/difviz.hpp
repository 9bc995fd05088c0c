#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "airscript/datastore.hpp"
#include "airscript/quat.hpp"

namespace airscript {

enum class RoundingMode {
  // Round each scaled differential half-away-from-zero, independently.
  PerStepRound,
  // Carry the fractional residue forward so the integer path never drifts
  // from the real-valued one by more than half a pixel per axis.
  RemainderCarry,
};

struct DifVizConfig {
  double sensitivity = 5.0;     // pixels per degree
  double pixel_density = 1.0;   // scale multiplier
  double frame_duration = 0.02; // seconds per sample at 50 Hz
  RoundingMode rounding = RoundingMode::PerStepRound;

  void validate() const {
    if (!(sensitivity > 0.0)) throw std::domain_error("DifVizConfig: sensitivity must be > 0");
    if (!(pixel_density > 0.0)) throw std::domain_error("DifVizConfig: pixel_density must be > 0");
    if (!(frame_duration > 0.0)) throw std::domain_error("DifVizConfig: frame_duration must be > 0");
  }
};

// Per-step pixel move. dx follows pitch (drawn vertically, up-positive),
// dy follows yaw (drawn horizontally, right-positive); the flip onto screen
// coordinates happens at render time only.
struct PixelDiff {
  int dx = 0;
  int dy = 0;
};

struct PixelPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPoint& a, const PixelPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
};

// Integer canvas trajectory; always starts at (0, 0) and has one more point
// than the recording has samples.
struct CoordinateSequence {
  std::vector<PixelPoint> points;
};

// Step 1: bring a device-frame gyro reading to the world frame.
inline Vec3 rotate_to_world(const Vec3& gyro, const Quaternion& orientation) {
  return rotate_vector(orientation, gyro);
}

// Step 2: keep pitch and yaw, drop roll.
inline std::pair<double, double> extract_pitch_yaw(const Vec3& world_gyro) {
  return {world_gyro.x, world_gyro.y};
}

// Step 3: gain mapping degrees of arm rotation to canvas pixels. The
// mouse-style "acceleration" hyperparameter is deliberately not part of the
// gain; it would make the mapping nonlinear and the inverse ill-defined.
inline double compute_gain(const DifVizConfig& config) {
  config.validate();
  return config.sensitivity * config.pixel_density;
}

inline int round_half_away(double v) { return static_cast<int>(std::llround(v)); }

// Steps 1-4: one integer (dx, dy) per sample.
inline std::vector<PixelDiff> differentials(const Recording& rec, const DifVizConfig& config) {
  config.validate();
  if (rec.samples.empty()) throw std::domain_error("differentials: empty recording");
  const double scale = compute_gain(config) * config.frame_duration;
  std::vector<PixelDiff> diffs;
  diffs.reserve(rec.samples.size());
  double cum_x = 0.0, cum_y = 0.0;  // real-valued path, RemainderCarry only
  int emitted_x = 0, emitted_y = 0;
  for (const auto& sample : rec.samples) {
    const Vec3 world = rotate_to_world(sample.gyro, sample.quat);
    const auto [pitch, yaw] = extract_pitch_yaw(world);
    const double gx = pitch * scale;
    const double gy = yaw * scale;
    PixelDiff d;
    if (config.rounding == RoundingMode::PerStepRound) {
      d.dx = round_half_away(gx);
      d.dy = round_half_away(gy);
    } else {
      cum_x += gx;
      cum_y += gy;
      d.dx = round_half_away(cum_x) - emitted_x;
      d.dy = round_half_away(cum_y) - emitted_y;
      emitted_x += d.dx;
      emitted_y += d.dy;
    }
    diffs.push_back(d);
  }
  return diffs;
}

// Step 5: cumulative sum from the origin.
inline CoordinateSequence accumulate(const std::vector<PixelDiff>& diffs) {
  CoordinateSequence seq;
  seq.points.reserve(diffs.size() + 1);
  PixelPoint cur{0, 0};
  seq.points.push_back(cur);
  for (const auto& d : diffs) {
    cur.x += d.dx;
    cur.y += d.dy;
    seq.points.push_back(cur);
  }
  return seq;
}

inline CoordinateSequence trajectory(const Recording& rec, const DifVizConfig& config) {
  return accumulate(differentials(rec, config));
}

}  // namespace airscript
