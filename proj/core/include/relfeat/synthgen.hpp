#pragma once

#include <array>
#include <string>
#include <vector>

#include "relfeat/featgen.hpp"
#include "relfeat/scene.hpp"

namespace relfeat {

/// Configuration of the synthetic task generator. Relevance is planted
/// through theta_star acting on the realized meta features, so transfer
/// has genuine signal to find.
struct GeneratorConfig {
  std::string task_name = "task";
  int n_parts = 4;
  int n_demos = 12;
  Vec3 center_min{-0.5, -0.5, -0.5};
  Vec3 center_max{0.5, 0.5, 0.5};
  double extent_min = 0.02;
  double extent_max = 0.3;
  double center_jitter = 0.05;   // per-demo part placement variation, meters
  double extent_jitter = 0.01;   // per-demo extent variation, meters
  double hand_goal_radius = 0.05;  // hand ends within this of the goal part
  double true_sparsity = 0.10;
  MetaFeatureVector theta_star = default_theta_star();
  double weight_std = 1.0607;  // slab scale of the planted weights
  double noise_std = 0.0;
  double duration = 3.0;    // seconds per demonstration
  int samples = 151;        // trajectory samples
  int basis_count = 5;
  std::uint64_t seed = 0;

  static MetaFeatureVector default_theta_star() {
    MetaFeatureVector t;
    t << 0.0, -1.0, 1.2, -6.0, -6.0, 1.2, 0.3, -1.2;
    return t;
  }

  void validate() const {
    if (n_parts < 1 || n_demos < 2) fail(ErrorCode::Config, "generator needs parts and demos");
    if (!(center_min.array() < center_max.array()).all() || extent_min >= extent_max ||
        extent_min <= 0.0)
      fail(ErrorCode::Config, "generator geometry ranges are empty");
    if (!(true_sparsity > 0.0 && true_sparsity < 1.0))
      fail(ErrorCode::Config, "true_sparsity must lie in (0, 1)");
    if (noise_std < 0.0) fail(ErrorCode::Config, "noise_std must be nonnegative");
  }
};

/// A generated task: the dataset (labels filled in) plus the planted
/// truth needed by the oracles.
struct SyntheticTask {
  Dataset dataset;
  std::array<MatrixXd, kNumComponents> true_weights;  // M x (K+1) each
  MetaFeatureVector theta_star;  // after sparsity calibration
  double noise_std = 0.0;
  std::size_t goal_part = 0;
};

SyntheticTask generate_task(const GeneratorConfig& cfg);

/// Synthetic two-object contact scenes for the segmentation oracle.
struct ContactSceneConfig {
  double dim_min = 0.12;
  double dim_max = 0.24;
  double spacing = 0.015;  // surface sampling step, meters
  double gap = 0.01;       // face separation, meters
  int n_frames = 3;
  bool allow_cylinders = true;
  std::uint64_t seed = 0;
};

struct ContactScene {
  PointSet object_a;  // lower object; its top face is the contact face
  PointSet object_b;  // upper object; its bottom face is the contact face
  std::vector<std::size_t> true_face_a;
  std::vector<std::size_t> true_face_b;
};

ContactScene generate_contact_scene(const ContactSceneConfig& cfg);

/// Intersection over union of two index sets.
double index_iou(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace relfeat
