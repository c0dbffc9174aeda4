#include "relfeat/descriptors.hpp"

#include <algorithm>
#include <numeric>

namespace relfeat {

namespace {

std::vector<std::size_t> k_nearest(const std::vector<Vec3>& positions,
                                   std::size_t query, int k) {
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), 0);
  order.erase(std::remove(order.begin(), order.end(), query), order.end());
  const Vec3 q = positions[query];
  std::nth_element(order.begin(), order.begin() + k, order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return (positions[a] - q).squaredNorm() <
                            (positions[b] - q).squaredNorm();
                   });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

}  // namespace

std::vector<OrientedPoint> estimate_local_descriptors(
    const std::vector<Vec3>& positions, int k, const Vec3& viewpoint) {
  if (k < 3) fail(ErrorCode::Config, "descriptor neighborhood needs k >= 3");
  if (positions.size() < static_cast<std::size_t>(k) + 1)
    fail(ErrorCode::Data, "not enough points for the requested neighborhood");

  std::vector<OrientedPoint> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto neighbors = k_nearest(positions, i, k);

    Vec3 mean = positions[i];
    for (std::size_t j : neighbors) mean += positions[j];
    mean /= static_cast<double>(neighbors.size() + 1);

    Mat3 cov = Mat3::Zero();
    {
      Vec3 d = positions[i] - mean;
      cov += d * d.transpose();
    }
    for (std::size_t j : neighbors) {
      Vec3 d = positions[j] - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(neighbors.size() + 1);

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    // Ascending eigenvalues: l0 <= l1 <= l2.
    const Vec3 lambda = eig.eigenvalues().cwiseMax(0.0);
    const double l0 = lambda[0], l1 = lambda[1], l2 = lambda[2];
    const double total = l0 + l1 + l2;

    OrientedPoint p;
    p.position = positions[i];
    // Rank-deficient neighborhoods (coincident points, or a line where the
    // normal direction is ambiguous) cannot carry a descriptor.
    if (total <= 1e-18 || l1 <= 1e-9 * l2) {
      p.valid = false;
      out[i] = p;
      continue;
    }
    Vec3 n = eig.eigenvectors().col(0);
    if (n.dot(viewpoint - positions[i]) < 0.0) n = -n;
    p.normal = n.normalized();
    p.curvature = l0 / total;
    p.spectral = Vec3((l1 - l0) / l2,   // planarity
                      (l2 - l1) / l2,   // linearity
                      l0 / l2);         // scatter
    out[i] = p;
  }
  return out;
}

Scene transform_scene_to_task_frame(const Scene& scene, const RigidTransform& frame) {
  frame.validate();
  Scene out = scene;
  out.hand_start = frame.apply(scene.hand_start);
  out.hand_end = frame.apply(scene.hand_end);
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    const ScenePart& sp = scene.parts[i];
    ScenePart& op = out.parts[i];
    Aabb start{sp.center_start, sp.dims};
    Aabb mapped = start.transformed(frame);
    op.center_start = mapped.center;
    op.dims = mapped.dims;
    op.center_end = frame.apply(sp.center_end);
    op.net_rotation = frame.rotation * sp.net_rotation * frame.rotation.transpose();
  }
  return out;
}

}  // namespace relfeat
