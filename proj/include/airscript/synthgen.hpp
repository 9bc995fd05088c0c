#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "airscript/datastore.hpp"
#include "airscript/difviz.hpp"
#include "airscript/pipeline.hpp"
#include "airscript/quat.hpp"
#include "airscript/rng.hpp"

namespace airscript {

// Canonical single-stroke digit shape, polyline inside the unit box.
// Template files store one "x y" pair per line with x running right and
// y running up; '#' starts a comment.
struct DigitTemplate {
  int digit = 0;
  std::vector<RealPoint> polyline;  // RealPoint{x = vertical (pitch axis), y = horizontal (yaw axis)}
};

inline DigitTemplate load_template(const std::string& path, int digit) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_template: cannot open '" + path + "'");
  DigitTemplate tpl;
  tpl.digit = digit;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    double file_x = 0.0, file_y = 0.0;
    if (!(ss >> file_x >> file_y)) continue;
    if (file_x < -1e-9 || file_x > 1.0 + 1e-9 || file_y < -1e-9 || file_y > 1.0 + 1e-9) {
      throw std::runtime_error("load_template: " + path + " line " + std::to_string(line_no) +
                               ": point outside the unit box");
    }
    // file x (horizontal) lands on the yaw axis, file y (vertical) on pitch
    tpl.polyline.push_back({file_y, file_x});
  }
  if (tpl.polyline.size() < 8) {
    throw std::runtime_error("load_template: '" + path + "' needs at least 8 points");
  }
  return tpl;
}

inline std::array<DigitTemplate, 10> load_templates(const std::string& dir) {
  std::array<DigitTemplate, 10> templates;
  for (int d = 0; d < 10; ++d) {
    templates[static_cast<std::size_t>(d)] =
        load_template(dir + "/digit" + std::to_string(d) + ".txt", d);
  }
  return templates;
}

inline std::string default_template_dir() {
#ifdef AIRSCRIPT_DEFAULT_TEMPLATE_DIR
  return AIRSCRIPT_DEFAULT_TEMPLATE_DIR;
#else
  return "data/templates";
#endif
}

// How one simulated person writes: size, lean and speed of the stroke, how
// the device is worn (base orientation), and sensor noise levels.
struct ParticipantStyle {
  double scale = 220.0;        // stroke height in canvas pixels
  double slant = 0.0;          // radians, positive leans the digit right
  double speed_factor = 1.0;   // > 1 writes faster (fewer samples)
  double gyro_noise_std = 0.0; // deg/s, per device-frame axis
  Quaternion base_orientation; // how the armband sits on the forearm
  double wobble_std_deg = 0.0; // per-step orientation random-walk step
  double accel_noise_std = 0.0;  // g-units
  std::uint64_t stream = 0;    // style-stream id, recorded for reproducibility
};

// Style sampling ranges for a population of participants.
struct NoiseProfile {
  double scale_min = 150.0, scale_max = 300.0;
  double slant_min = -0.15, slant_max = 0.15;
  double speed_min = 0.85, speed_max = 1.3;
  double gyro_noise_min = 1.0, gyro_noise_max = 3.0;
  double wobble_std_deg = 2.0;
  double accel_noise_min = 0.02, accel_noise_max = 0.08;
  double base_tilt_max_deg = 25.0;

  static NoiseProfile defaults() { return {}; }

  static NoiseProfile noise_free() {
    NoiseProfile p;
    p.slant_min = p.slant_max = 0.0;
    p.gyro_noise_min = p.gyro_noise_max = 0.0;
    p.wobble_std_deg = 0.0;
    p.accel_noise_min = p.accel_noise_max = 0.0;
    p.base_tilt_max_deg = 0.0;
    return p;
  }
};

inline Quaternion random_unit_quaternion(Rng& rng) {
  Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  if (norm(q) == 0.0) q = Quaternion::identity();
  return normalize(q);
}

inline ParticipantStyle sample_style(const NoiseProfile& profile, Rng& rng) {
  ParticipantStyle style;
  style.scale = rng.uniform(profile.scale_min, profile.scale_max);
  style.slant = rng.uniform(profile.slant_min, profile.slant_max);
  style.speed_factor = rng.uniform(profile.speed_min, profile.speed_max);
  style.gyro_noise_std = rng.uniform(profile.gyro_noise_min, profile.gyro_noise_max);
  style.wobble_std_deg = profile.wobble_std_deg;
  style.accel_noise_std = rng.uniform(profile.accel_noise_min, profile.accel_noise_max);
  if (profile.base_tilt_max_deg > 0.0) {
    Vec3 axis{rng.normal(), rng.normal(), rng.normal()};
    if (norm(axis) == 0.0) axis = {0.0, 0.0, 1.0};
    const double angle =
        rng.uniform(0.0, profile.base_tilt_max_deg) * 3.141592653589793238462643383279502884 / 180.0;
    style.base_orientation = axis_angle(axis, angle);
  }
  return style;
}

namespace detail {

inline double polyline_length(const std::vector<RealPoint>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].x - pts[i - 1].x;
    const double dy = pts[i].y - pts[i - 1].y;
    len += std::sqrt(dx * dx + dy * dy);
  }
  return len;
}

// Uniform arc-length resampling (constant writing speed along the stroke).
inline std::vector<RealPoint> resample_arclength(const std::vector<RealPoint>& pts,
                                                 std::size_t n) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double dx = pts[i].x - pts[i - 1].x;
    const double dy = pts[i].y - pts[i - 1].y;
    cum[i] = cum[i - 1] + std::sqrt(dx * dx + dy * dy);
  }
  const double total = cum.back();
  std::vector<RealPoint> out(n);
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n - 1);
    while (seg + 2 < pts.size() && cum[seg + 1] < target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double frac = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    out[j] = {pts[seg].x + frac * (pts[seg + 1].x - pts[seg].x),
              pts[seg].y + frac * (pts[seg + 1].y - pts[seg].y)};
  }
  return out;
}

}  // namespace detail

// The canvas-space stroke a style writes for a template: slant shear plus
// uniform scale, resampled to n points at constant speed. This is the path
// 2-DifViz should reconstruct.
inline std::vector<RealPoint> styled_path(const DigitTemplate& tpl, const ParticipantStyle& style,
                                          std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("styled_path: need at least 2 points");
  std::vector<RealPoint> warped(tpl.polyline.size());
  const double shear = std::tan(style.slant);
  for (std::size_t i = 0; i < tpl.polyline.size(); ++i) {
    const double vert = tpl.polyline[i].x;
    const double horiz = tpl.polyline[i].y + shear * tpl.polyline[i].x;
    warped[i] = {vert * style.scale, horiz * style.scale};
  }
  return detail::resample_arclength(warped, n_points);
}

struct GenResult {
  Recording recording;
  std::vector<RealPoint> target_path;  // canvas pixels, length = samples + 1
};

// Inverse of the 2-DifViz pipeline: picks per-step world-frame pitch/yaw so
// that accumulating (pitch, yaw) * K * F retraces the styled template, then
// moves those rates into the device frame through the sampled orientation.
inline GenResult generate_recording_traced(const DigitTemplate& tpl,
                                           const ParticipantStyle& style,
                                           const DifVizConfig& config, std::uint64_t seed,
                                           const std::string& participant_id) {
  config.validate();
  Rng rng(derive_seed(seed, "recording"));

  const double base_tau = 60.0 / style.speed_factor;
  const double jitter = rng.uniform(0.9, 1.1);
  const std::size_t tau = static_cast<std::size_t>(
      std::clamp(std::llround(base_tau * jitter), 40LL, 160LL));

  const auto path = styled_path(tpl, style, tau + 1);
  const double scale = compute_gain(config) * config.frame_duration;

  const double wobble_rad =
      style.wobble_std_deg * 3.141592653589793238462643383279502884 / 180.0;
  Quaternion wobble = Quaternion::identity();

  GenResult result;
  result.target_path = path;
  Recording& rec = result.recording;
  rec.participant_id = participant_id;
  rec.label = tpl.digit;
  rec.sample_rate_hz = 1.0 / config.frame_duration;
  rec.samples.reserve(tau);

  for (std::size_t t = 0; t < tau; ++t) {
    if (wobble_rad > 0.0) {
      Vec3 axis{rng.normal(), rng.normal(), rng.normal()};
      if (norm(axis) == 0.0) axis = {1.0, 0.0, 0.0};
      wobble = normalize(hamilton(wobble, axis_angle(axis, rng.normal(0.0, wobble_rad))));
    }
    const Quaternion orientation = normalize(hamilton(style.base_orientation, wobble));

    const double pitch = (path[t + 1].x - path[t].x) / scale;
    const double yaw = (path[t + 1].y - path[t].y) / scale;
    const double roll = style.gyro_noise_std > 0.0 ? rng.normal(0.0, style.gyro_noise_std) : 0.0;

    Vec3 device_gyro = rotate_vector(inverse(orientation), Vec3{pitch, yaw, roll});
    if (style.gyro_noise_std > 0.0) {
      device_gyro.x += rng.normal(0.0, style.gyro_noise_std);
      device_gyro.y += rng.normal(0.0, style.gyro_noise_std);
      device_gyro.z += rng.normal(0.0, style.gyro_noise_std);
    }

    ImuSample sample;
    sample.t = static_cast<double>(t) * config.frame_duration;
    sample.gyro = device_gyro;
    sample.quat = orientation;
    if (style.accel_noise_std > 0.0) {
      sample.accel = {rng.normal(0.0, style.accel_noise_std),
                      rng.normal(0.0, style.accel_noise_std),
                      rng.normal(0.0, style.accel_noise_std)};
    }
    rec.samples.push_back(sample);
  }
  return result;
}

inline Recording generate_recording(const DigitTemplate& tpl, const ParticipantStyle& style,
                                    const DifVizConfig& config, std::uint64_t seed,
                                    const std::string& participant_id) {
  return generate_recording_traced(tpl, style, config, seed, participant_id).recording;
}

// One style per participant, per_digit recordings per digit per participant.
inline Dataset generate_dataset(std::size_t n_participants, std::size_t per_digit,
                                const NoiseProfile& profile, std::uint64_t seed,
                                const std::array<DigitTemplate, 10>& templates,
                                const DifVizConfig& config = {}) {
  if (n_participants == 0) throw std::domain_error("generate_dataset: need >= 1 participant");
  if (per_digit == 0) throw std::domain_error("generate_dataset: need >= 1 recording per digit");
  Dataset ds;
  ds.recordings.reserve(n_participants * per_digit * 10);
  for (std::size_t p = 0; p < n_participants; ++p) {
    char id[24];
    std::snprintf(id, sizeof(id), "p%02zu", p);
    Rng style_rng(derive_seed(seed, "style/" + std::string(id)));
    ParticipantStyle style = sample_style(profile, style_rng);
    style.stream = p;
    for (int digit = 0; digit < 10; ++digit) {
      for (std::size_t iter = 0; iter < per_digit; ++iter) {
        const std::uint64_t rec_seed = derive_seed(
            seed, "rec/" + std::string(id) + "/" + std::to_string(digit) + "/" +
                      std::to_string(iter));
        ds.recordings.push_back(generate_recording(
            templates[static_cast<std::size_t>(digit)], style, config, rec_seed, id));
      }
    }
  }
  return ds;
}

}  // namespace airscript
