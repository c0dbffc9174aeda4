#pragma once

#include <vector>

#include "relfeat/scene.hpp"

namespace relfeat {

/// Default synthetic sensor viewpoint used to orient normals.
inline const Vec3 kDefaultViewpoint{0.0, 0.0, 2.0};

/// Estimate normals, curvature, and spectral shape descriptors for each
/// point from its k nearest neighbors. Normals point toward `viewpoint`.
/// Points whose neighborhood covariance is rank deficient (coincident or
/// collinear neighborhoods) come back with `valid = false`.
std::vector<OrientedPoint> estimate_local_descriptors(
    const std::vector<Vec3>& positions, int k,
    const Vec3& viewpoint = kDefaultViewpoint);

/// Map every position and direction of a scene through a rigid transform.
/// Box dims are refit from the transformed corners, so lengths are
/// preserved under translation and permuted under axis-aligned rotations.
Scene transform_scene_to_task_frame(const Scene& scene, const RigidTransform& frame);

}  // namespace relfeat
