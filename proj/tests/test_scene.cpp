#include <doctest.h>

#include "relfeat/descriptors.hpp"
#include "relfeat/rng.hpp"
#include "relfeat/scene.hpp"

using namespace relfeat;

namespace {

Scene one_part_scene() {
  Scene scene;
  scene.hand_start = Vec3(0.1, 0.2, 0.3);
  scene.hand_end = Vec3(0.4, 0.5, 0.6);
  ScenePart part;
  part.object_id = "obj1";
  part.center_start = Vec3(1.0, 2.0, 3.0);
  part.center_end = Vec3(1.5, 2.0, 3.0);
  part.dims = Vec3(0.2, 0.4, 0.6);
  scene.parts.push_back(part);
  return scene;
}

RigidTransform rotation_z_90() {
  RigidTransform g;
  g.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  return g;
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("rigid transforms preserve pairwise distances") {
  Rng rng(11);
  RigidTransform g = rotation_z_90();
  g.translation = Vec3(0.3, -0.2, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 a(rng.normal(), rng.normal(), rng.normal());
    const Vec3 b(rng.normal(), rng.normal(), rng.normal());
    CHECK(std::abs((g.apply(a) - g.apply(b)).norm() - (a - b).norm()) < 1e-9);
  }
}

TEST_CASE("non-orthonormal rotations are rejected") {
  RigidTransform g;
  g.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(g.validate(), Error);
  CHECK_THROWS_AS(transform_scene_to_task_frame(one_part_scene(), g), Error);
}

TEST_CASE("identity transform leaves the scene unchanged") {
  const Scene scene = one_part_scene();
  const Scene mapped = transform_scene_to_task_frame(scene, RigidTransform::identity());
  CHECK((mapped.hand_start - scene.hand_start).norm() == doctest::Approx(0.0));
  CHECK((mapped.parts[0].center_start - scene.parts[0].center_start).norm() ==
        doctest::Approx(0.0));
  CHECK((mapped.parts[0].dims - scene.parts[0].dims).norm() == doctest::Approx(0.0));
}

TEST_CASE("pure translation shifts positions and keeps dims") {
  const Scene scene = one_part_scene();
  RigidTransform g;
  g.translation = Vec3(1.0, -2.0, 0.5);
  const Scene mapped = transform_scene_to_task_frame(scene, g);
  CHECK((mapped.hand_start - (scene.hand_start + g.translation)).norm() < 1e-12);
  CHECK((mapped.parts[0].center_start - (scene.parts[0].center_start + g.translation))
            .norm() < 1e-12);
  CHECK((mapped.parts[0].dims - scene.parts[0].dims).norm() < 1e-12);
}

TEST_CASE("90 degree z-rotation swaps the x and y box dims") {
  const Scene scene = one_part_scene();
  const Scene mapped = transform_scene_to_task_frame(scene, rotation_z_90());
  CHECK(mapped.parts[0].dims.x() == doctest::Approx(scene.parts[0].dims.y()));
  CHECK(mapped.parts[0].dims.y() == doctest::Approx(scene.parts[0].dims.x()));
  CHECK(mapped.parts[0].dims.z() == doctest::Approx(scene.parts[0].dims.z()));
}

TEST_CASE("demonstration start mismatch is an error, never repaired") {
  Scene scene = one_part_scene();
  Trajectory traj;
  traj.times = {0.0, 0.1, 0.2};
  traj.values[0] = {scene.hand_start.x(), 0.2, 0.3};
  traj.values[1] = {scene.hand_start.y(), 0.2, 0.3};
  traj.values[2] = {scene.hand_start.z(), 0.2, 0.3};
  CHECK_NOTHROW(make_demonstration(scene, traj));

  traj.values[2][0] += 1e-6;
  CHECK_THROWS_AS(make_demonstration(scene, traj), Error);
}

TEST_CASE("part bbox must enclose all members") {
  PointSet object;
  object.object_id = "obj";
  for (int i = 0; i < 4; ++i) {
    OrientedPoint p;
    p.position = Vec3(i * 0.1, 0.0, 0.0);
    object.points.push_back(p);
  }
  object.pose_sequence.push_back(RigidTransform::identity());
  object.pose_times.push_back(0.0);

  const Part part = make_part(object, {0, 1, 2, 3});
  CHECK_NOTHROW(part.validate(&object));
  CHECK(part.bbox.dims.x() == doctest::Approx(0.3));
  CHECK(part.bbox.dims.y() > 0.0);  // floored, never zero

  Part broken = part;
  broken.bbox.center += Vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(broken.validate(&object), Error);
}

TEST_CASE("trajectory times must strictly increase") {
  Trajectory traj;
  traj.times = {0.0, 0.1, 0.1};
  for (auto& track : traj.values) track = {0.0, 0.1, 0.2};
  CHECK_THROWS_AS(traj.validate(), Error);
}

}  // TEST_SUITE
