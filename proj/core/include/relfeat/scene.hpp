#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relfeat/geometry.hpp"

namespace relfeat {

/// A point with its local geometric descriptors. `spectral` holds the
/// eigenvalue-ratio shape descriptors (planarity, linearity, scatter).
/// Points whose neighborhood was rank deficient are marked invalid and
/// skipped by downstream consumers.
struct OrientedPoint {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double curvature = 0.0;
  Vec3 spectral = Vec3::Zero();
  bool valid = true;
};

/// Point cloud model of one object plus its tracked pose over a
/// demonstration. Points live in the object frame.
struct PointSet {
  std::string object_id;
  std::vector<OrientedPoint> points;
  std::vector<RigidTransform> pose_sequence;
  std::vector<double> pose_times;  // seconds, one per pose

  void validate() const {
    if (points.empty()) fail(ErrorCode::Data, "point set is empty");
    if (pose_sequence.empty()) fail(ErrorCode::Data, "pose sequence is empty");
    if (pose_sequence.size() != pose_times.size())
      fail(ErrorCode::Dimension, "pose_times length does not match pose_sequence");
    for (const auto& g : pose_sequence) g.validate();
  }

  Vec3 world_position(std::size_t point_index, std::size_t frame) const {
    return pose_sequence[frame].apply(points[point_index].position);
  }
  Vec3 world_normal(std::size_t point_index, std::size_t frame) const {
    return pose_sequence[frame].apply_direction(points[point_index].normal);
  }
};

/// A part of an object, as indices into the owning PointSet plus an
/// axis-aligned box summary in the object frame.
struct Part {
  std::string object_id;
  std::vector<std::size_t> member_indices;
  Aabb bbox;

  void validate(const PointSet* owner = nullptr) const {
    if (member_indices.empty()) fail(ErrorCode::Data, "part has no members");
    std::vector<std::size_t> sorted = member_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail(ErrorCode::Data, "part member indices are not unique");
    if (owner) {
      if (sorted.back() >= owner->points.size())
        fail(ErrorCode::Dimension, "part member index out of range");
      for (std::size_t i : member_indices) {
        if (!bbox.contains(owner->points[i].position, 1e-7))
          fail(ErrorCode::Data, "part bbox does not enclose all member points");
      }
    }
  }
};

/// Build a part from member indices, fitting the object-frame box.
/// Degenerate box extents are floored so length features stay positive.
Part make_part(const PointSet& owner, std::vector<std::size_t> members);

/// One part placed in the task frame: start/end box poses resolved from
/// the object's tracked motion. `net_rotation` maps start directions to
/// end directions.
struct ScenePart {
  std::string object_id;
  Vec3 center_start = Vec3::Zero();
  Vec3 center_end = Vec3::Zero();
  Vec3 dims = Vec3::Zero();
  Mat3 net_rotation = Mat3::Identity();
  std::optional<Part> source;  // present when the part came from a point cloud
};

/// Hand start/end positions plus the aligned part constellation, all in
/// the task frame.
struct Scene {
  Vec3 hand_start = Vec3::Zero();
  Vec3 hand_end = Vec3::Zero();
  std::vector<ScenePart> parts;
};

inline constexpr int kNumComponents = 3;  // translational x, y, z

/// Per-component scalar tracks of the hand over time.
struct Trajectory {
  std::vector<double> times;
  std::array<std::vector<double>, kNumComponents> values;

  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }

  void validate() const {
    if (times.size() < 2) fail(ErrorCode::Data, "trajectory needs at least two samples");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        fail(ErrorCode::Data, "trajectory times must be strictly increasing");
    for (const auto& track : values) {
      if (track.size() != times.size())
        fail(ErrorCode::Dimension, "trajectory track length mismatch");
      for (double v : track)
        if (!std::isfinite(v)) fail(ErrorCode::Data, "trajectory value not finite");
    }
  }
};

struct Demonstration {
  Scene scene;
  Trajectory trajectory;
};

/// Validating constructor: the trajectory must start at the scene's hand
/// position. A mismatch is an error, never silently repaired.
Demonstration make_demonstration(Scene scene, Trajectory trajectory);

/// Ground-truth relevance labels: one boolean per feature per skill
/// component. Only synthetic tasks and hand-labeled corpora carry them.
using RelevanceLabels = std::array<std::vector<bool>, kNumComponents>;

struct Dataset {
  std::string task_name;
  std::string exclude_group;  // tasks sharing a group are held out together
  std::vector<Demonstration> demonstrations;
  std::optional<RelevanceLabels> ground_truth_relevance;

  std::size_t size() const { return demonstrations.size(); }

  void validate() const {
    if (demonstrations.empty()) fail(ErrorCode::Data, "dataset has no demonstrations");
    const std::size_t n_parts = demonstrations.front().scene.parts.size();
    for (const auto& demo : demonstrations) {
      if (demo.scene.parts.size() != n_parts)
        fail(ErrorCode::Dimension, "scenes have inconsistent part counts");
      demo.trajectory.validate();
    }
  }
};

}  // namespace relfeat
