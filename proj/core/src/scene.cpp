#include "relfeat/scene.hpp"

#include <algorithm>

namespace relfeat {

Part make_part(const PointSet& owner, std::vector<std::size_t> members) {
  Part part;
  part.object_id = owner.object_id;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  part.member_indices = std::move(members);
  if (part.member_indices.empty()) fail(ErrorCode::Data, "part has no members");

  std::vector<Vec3> positions;
  positions.reserve(part.member_indices.size());
  for (std::size_t i : part.member_indices) {
    if (i >= owner.points.size())
      fail(ErrorCode::Dimension, "part member index out of range");
    positions.push_back(owner.points[i].position);
  }
  part.bbox = Aabb::of_points(positions.begin(), positions.end());
  // Flat parts (a single face) get a hair of thickness so length features
  // stay strictly positive.
  part.bbox.dims = part.bbox.dims.cwiseMax(1e-9);
  return part;
}

Demonstration make_demonstration(Scene scene, Trajectory trajectory) {
  trajectory.validate();
  for (int c = 0; c < kNumComponents; ++c) {
    const double start = trajectory.values[c].front();
    if (std::abs(start - scene.hand_start[c]) > 1e-9)
      fail(ErrorCode::Data, "trajectory start does not match scene hand_start");
  }
  return Demonstration{std::move(scene), std::move(trajectory)};
}

}  // namespace relfeat
