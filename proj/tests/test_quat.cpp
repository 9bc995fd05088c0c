#include <doctest.h>

#include <cmath>

#include "airscript/quat.hpp"
#include "airscript/rng.hpp"
#include "oracles.hpp"

using airscript::Quaternion;
using airscript::Rng;
using airscript::Vec3;

namespace {

Quaternion random_unit(Rng& rng) {
  Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return airscript::normalize(q);
}

Quaternion random_quat(Rng& rng) {
  return {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
}

double quat_dist(const Quaternion& a, const Quaternion& b) {
  return std::max({std::abs(a.w - b.w), std::abs(a.x - b.x), std::abs(a.y - b.y),
                   std::abs(a.z - b.z)});
}

}  // namespace

TEST_SUITE("quat") {

TEST_CASE("hamilton identity element") {
  const Quaternion q{0.3, 0.1, 0.2, 0.9};
  const Quaternion r = hamilton(Quaternion::identity(), q);
  CHECK(quat_dist(r, q) == 0.0);
}

TEST_CASE("hamilton i*j = k") {
  const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0};
  const Quaternion r = hamilton(i, j);
  CHECK(quat_dist(r, Quaternion{0, 0, 0, 1}) <= 1e-12);
}

TEST_CASE("hamilton matches 4x4 matrix-form product") {
  Rng rng(101);
  for (int n = 0; n < 500; ++n) {
    const Quaternion a = random_quat(rng), b = random_quat(rng);
    CHECK(quat_dist(hamilton(a, b), oracles::matrix_hamilton(a, b)) <= 1e-12);
  }
}

TEST_CASE("hamilton associativity") {
  Rng rng(102);
  for (int n = 0; n < 300; ++n) {
    const Quaternion a = random_quat(rng), b = random_quat(rng), c = random_quat(rng);
    CHECK(quat_dist(hamilton(hamilton(a, b), c), hamilton(a, hamilton(b, c))) <= 1e-12);
  }
}

TEST_CASE("inverse basics") {
  CHECK(quat_dist(inverse(Quaternion{1, 0, 0, 0}), Quaternion{1, 0, 0, 0}) == 0.0);
  CHECK(quat_dist(inverse(Quaternion{0, 1, 0, 0}), Quaternion{0, -1, 0, 0}) == 0.0);
  CHECK_THROWS_AS(inverse(Quaternion{0, 0, 0, 0}), std::domain_error);
}

TEST_CASE("inverse composes to identity") {
  Rng rng(103);
  for (int n = 0; n < 500; ++n) {
    const Quaternion q = random_unit(rng);
    CHECK(quat_dist(hamilton(inverse(q), q), Quaternion::identity()) <= 1e-12);
  }
}

TEST_CASE("normalize examples") {
  const Quaternion a = normalize(Quaternion{2, 0, 0, 0});
  CHECK(quat_dist(a, Quaternion{1, 0, 0, 0}) == 0.0);
  const Quaternion b = normalize(Quaternion{0, 0, 3, 4});
  CHECK(quat_dist(b, Quaternion{0, 0, 0.6, 0.8}) <= 1e-15);
  CHECK_THROWS_AS(normalize(Quaternion{0, 0, 0, 0}), std::domain_error);

  Rng rng(104);
  for (int n = 0; n < 200; ++n) {
    CHECK(std::abs(norm(normalize(random_quat(rng))) - 1.0) <= 1e-12);
  }
}

TEST_CASE("rotate_vector identity and 90 degrees about z") {
  const Vec3 id = rotate_vector(Quaternion::identity(), Vec3{1, 2, 3});
  CHECK(id.x == 1.0);
  CHECK(id.y == 2.0);
  CHECK(id.z == 3.0);

  const double s = std::sqrt(0.5);
  const Vec3 r = rotate_vector(Quaternion{s, 0, 0, s}, Vec3{1, 0, 0});
  const Vec3 expected = oracles::rotate_by_matrix(Quaternion{s, 0, 0, s}, Vec3{1, 0, 0});
  CHECK(std::abs(r.x - expected.x) <= 1e-12);
  CHECK(std::abs(r.y - expected.y) <= 1e-12);
  CHECK(std::abs(r.x - 0.0) <= 1e-12);
  CHECK(std::abs(r.y - 1.0) <= 1e-12);
  CHECK(std::abs(r.z - 0.0) <= 1e-12);
}

TEST_CASE("rotate_vector matches rotation-matrix oracle") {
  Rng rng(105);
  for (int n = 0; n < 1000; ++n) {
    const Quaternion q = random_unit(rng);
    const Vec3 v{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 a = rotate_vector(q, v);
    const Vec3 b = oracles::rotate_by_matrix(q, v);
    CHECK(std::abs(a.x - b.x) <= 1e-9);
    CHECK(std::abs(a.y - b.y) <= 1e-9);
    CHECK(std::abs(a.z - b.z) <= 1e-9);
  }
}

TEST_CASE("rotation preserves vector norm") {
  Rng rng(106);
  for (int n = 0; n < 500; ++n) {
    const Quaternion q = random_unit(rng);
    const Vec3 v{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    CHECK(std::abs(norm(rotate_vector(q, v)) - norm(v)) <= 1e-9);
  }
}

TEST_CASE("rotation composition equals hamilton of rotations") {
  Rng rng(107);
  for (int n = 0; n < 300; ++n) {
    const Quaternion q1 = random_unit(rng), q2 = random_unit(rng);
    const Vec3 v{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec3 a = rotate_vector(q2, rotate_vector(q1, v));
    const Vec3 b = rotate_vector(hamilton(q2, q1), v);
    CHECK(std::abs(a.x - b.x) <= 1e-9);
    CHECK(std::abs(a.y - b.y) <= 1e-9);
    CHECK(std::abs(a.z - b.z) <= 1e-9);
  }
}

TEST_CASE("rotate_vector drift policy") {
  const double s = std::sqrt(0.5);
  // drift of ~5e-4: renormalized silently
  const Quaternion drifted{s * 1.0005, 0, 0, s * 1.0005};
  const Vec3 r = rotate_vector(drifted, Vec3{1, 0, 0});
  CHECK(std::abs(r.y - 1.0) <= 1e-9);
  // drift of ~1e-2: rejected
  const Quaternion bad{s * 1.01, 0, 0, s * 1.01};
  CHECK_THROWS_AS(rotate_vector(bad, Vec3{1, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(rotate_vector(Quaternion{0, 0, 0, 0}, Vec3{1, 0, 0}), std::domain_error);
}

}  // TEST_SUITE
