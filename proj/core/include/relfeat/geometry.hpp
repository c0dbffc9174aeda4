#pragma once

#include <Eigen/Dense>

#include "relfeat/error.hpp"

namespace relfeat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform p -> R p + t. Rotations are checked for orthonormality
/// on construction; units are meters throughout.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }

  RigidTransform compose(const RigidTransform& inner) const {
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  bool is_orthonormal(double tol = 1e-6) const {
    return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           rotation.determinant() > 0.0;
  }

  void validate() const {
    if (!is_orthonormal()) fail(ErrorCode::Data, "rotation is not orthonormal");
    if (!translation.allFinite()) fail(ErrorCode::Data, "translation is not finite");
  }
};

/// Axis-aligned box given by center and edge lengths.
struct Aabb {
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Zero();

  Vec3 min_corner() const { return center - 0.5 * dims; }
  Vec3 max_corner() const { return center + 0.5 * dims; }

  bool contains(const Vec3& p, double tol = 1e-9) const {
    return (p.array() >= min_corner().array() - tol).all() &&
           (p.array() <= max_corner().array() + tol).all();
  }

  /// Refit after a rigid transform by mapping the eight corners.
  Aabb transformed(const RigidTransform& g) const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    const Vec3 mn = min_corner();
    const Vec3 mx = max_corner();
    for (int i = 0; i < 8; ++i) {
      Vec3 corner((i & 1) ? mx.x() : mn.x(), (i & 2) ? mx.y() : mn.y(),
                  (i & 4) ? mx.z() : mn.z());
      Vec3 q = g.apply(corner);
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
    return {0.5 * (lo + hi), hi - lo};
  }

  template <typename Iter>
  static Aabb of_points(Iter begin, Iter end) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (Iter it = begin; it != end; ++it) {
      lo = lo.cwiseMin(*it);
      hi = hi.cwiseMax(*it);
    }
    return {0.5 * (lo + hi), hi - lo};
  }
};

}  // namespace relfeat
