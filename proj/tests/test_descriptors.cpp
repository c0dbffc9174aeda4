#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relfeat/descriptors.hpp"
#include "relfeat/rng.hpp"

using namespace relfeat;

TEST_SUITE("descriptors") {

TEST_CASE("planar points get the plane normal and near-zero curvature") {
  Rng rng(21);
  std::vector<Vec3> points;
  for (int i = 0; i < 100; ++i)
    points.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0);

  const auto described = estimate_local_descriptors(points, 10);
  for (const OrientedPoint& p : described) {
    REQUIRE(p.valid);
    CHECK(std::abs(std::abs(p.normal.z()) - 1.0) < 1e-3);
    CHECK(p.normal.z() > 0.0);  // oriented toward the default viewpoint
    CHECK(p.curvature < 1e-6);
    CHECK(p.spectral[0] == doctest::Approx(1.0).epsilon(1e-3));  // planarity
  }
}

TEST_CASE("sphere normals stay within 5 degrees of radial") {
  Rng rng(22);
  std::vector<Vec3> points;
  for (int i = 0; i < 400; ++i) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    points.push_back(v.normalized());
  }
  const auto described = estimate_local_descriptors(points, 10, Vec3(0, 0, 4));
  const double cos_tol = std::cos(5.0 * std::numbers::pi / 180.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    REQUIRE(described[i].valid);
    // The sign depends on viewpoint visibility; compare up to sign.
    CHECK(std::abs(described[i].normal.dot(points[i])) > cos_tol);
  }
}

TEST_CASE("collinear neighborhoods are marked invalid") {
  std::vector<Vec3> points;
  for (int i = 0; i < 4; ++i) points.emplace_back(i * 0.1, 0.0, 0.0);
  const auto described = estimate_local_descriptors(points, 3);
  for (const OrientedPoint& p : described) CHECK_FALSE(p.valid);
}

TEST_CASE("coincident points are marked invalid") {
  std::vector<Vec3> points(6, Vec3(1.0, 1.0, 1.0));
  const auto described = estimate_local_descriptors(points, 3);
  for (const OrientedPoint& p : described) CHECK_FALSE(p.valid);
}

TEST_CASE("preconditions are enforced") {
  std::vector<Vec3> points(5, Vec3::Zero());
  CHECK_THROWS_AS(estimate_local_descriptors(points, 2), Error);
  CHECK_THROWS_AS(estimate_local_descriptors(points, 5), Error);
}

TEST_CASE("descriptors are invariant to input permutation") {
  Rng rng(23);
  std::vector<Vec3> points;
  for (int i = 0; i < 60; ++i)
    points.emplace_back(rng.normal(), rng.normal(), 0.2 * rng.normal());

  const auto base = estimate_local_descriptors(points, 8);

  std::vector<std::size_t> perm(points.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng shuffler(24);
  shuffler.shuffle(perm);
  std::vector<Vec3> shuffled(points.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = points[perm[i]];

  const auto permuted = estimate_local_descriptors(shuffled, 8);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK((permuted[i].normal - base[perm[i]].normal).norm() < 1e-9);
    CHECK(permuted[i].curvature == doctest::Approx(base[perm[i]].curvature));
    CHECK((permuted[i].spectral - base[perm[i]].spectral).norm() < 1e-9);
  }
}

TEST_CASE("spectral components stay in the unit interval") {
  Rng rng(25);
  std::vector<Vec3> points;
  for (int i = 0; i < 80; ++i)
    points.emplace_back(rng.normal(), 0.3 * rng.normal(), 0.05 * rng.normal());
  for (const OrientedPoint& p : estimate_local_descriptors(points, 10)) {
    REQUIRE(p.valid);
    for (int a = 0; a < 3; ++a) {
      CHECK(p.spectral[a] >= -1e-12);
      CHECK(p.spectral[a] <= 1.0 + 1e-12);
    }
    CHECK(std::abs(p.normal.norm() - 1.0) < 1e-6);
  }
}

}  // TEST_SUITE
