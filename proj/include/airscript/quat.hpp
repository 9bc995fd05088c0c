#pragma once

#include <cmath>
#include <stdexcept>

namespace airscript {

// Gyro channels are degrees/second, accelerometer channels are g-units.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, const Vec3& a) { return a * s; }
};

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// Scalar-first (w, x, y, z) everywhere, including the on-disk formats.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
};

inline double norm_sq(const Quaternion& q) {
  return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

inline double norm(const Quaternion& q) { return std::sqrt(norm_sq(q)); }

inline Quaternion conjugate(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline Quaternion hamilton(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quaternion normalize(const Quaternion& q) {
  const double n = norm(q);
  if (n == 0.0) throw std::domain_error("normalize: zero-norm quaternion");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Quaternion inverse(const Quaternion& q) {
  const double n2 = norm_sq(q);
  if (n2 == 0.0) throw std::domain_error("inverse: zero-norm quaternion");
  return {q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2};
}

// Sandwich product q * (0, v) * q^-1. Sensor quaternions drift: inputs within
// 1e-3 of unit norm are renormalized, anything worse is rejected.
inline Vec3 rotate_vector(const Quaternion& q, const Vec3& v) {
  const double n2 = norm_sq(q);
  if (n2 == 0.0) throw std::domain_error("rotate_vector: zero-norm quaternion");
  Quaternion u = q;
  const double drift = std::abs(std::sqrt(n2) - 1.0);
  if (drift > 1e-3) {
    throw std::domain_error("rotate_vector: quaternion norm drifted beyond 1e-3");
  }
  if (drift > 1e-12) u = normalize(q);
  const Quaternion p{0.0, v.x, v.y, v.z};
  const Quaternion r = hamilton(hamilton(u, p), conjugate(u));
  return {r.x, r.y, r.z};
}

// Rotation of `angle_rad` about `axis` (need not be unit length).
inline Quaternion axis_angle(const Vec3& axis, double angle_rad) {
  const double n = norm(axis);
  if (n == 0.0) throw std::domain_error("axis_angle: zero axis");
  const double half = 0.5 * angle_rad;
  const double s = std::sin(half) / n;
  return {std::cos(half), axis.x * s, axis.y * s, axis.z * s};
}

}  // namespace airscript
