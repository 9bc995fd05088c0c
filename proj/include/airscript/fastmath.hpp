#pragma once

#include <bit>
#include <cstdint>

namespace airscript {

// Branch-free exp with ~1 ulp of slack over [-708, 708]. The gate and softmax
// loops call this per element; keeping it inlineable lets the compiler
// vectorize those loops, which libm exp would block. exp_fast(0) == 1 exactly.
inline double exp_fast(double x) {
  constexpr double kLog2e = 1.4426950408889634073599246810018921;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;

  x = x > 708.0 ? 708.0 : x;
  x = x < -708.0 ? -708.0 : x;

  const double kf = x * kLog2e;
  // round-to-nearest via the 2^52 trick, valid since |kf| < 1023
  const double shifted = kf + 6755399441055744.0;  // 1.5 * 2^52
  const double k = shifted - 6755399441055744.0;
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;

  // Taylor series on |r| <= ln2/2; degree 11 keeps the tail below 1e-16.
  double p = 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;

  const auto ki = static_cast<std::int64_t>(k);
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(p);
  const std::uint64_t scaled = bits + (static_cast<std::uint64_t>(ki) << 52);
  return std::bit_cast<double>(scaled);
}

// sigmoid_fast(0) == 0.5 exactly; saturates to 0/1 for |x| beyond ~745.
inline double sigmoid_fast(double x) { return 1.0 / (1.0 + exp_fast(-x)); }

// tanh_fast(0) == 0 exactly.
inline double tanh_fast(double x) {
  const double ax = x < 0.0 ? -x : x;
  const double t = 1.0 - 2.0 / (exp_fast(2.0 * ax) + 1.0);
  return x < 0.0 ? -t : t;
}

}  // namespace airscript
