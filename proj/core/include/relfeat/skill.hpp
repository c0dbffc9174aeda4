#pragma once

#include <array>
#include <string>
#include <vector>

#include "relfeat/dmp.hpp"
#include "relfeat/featgen.hpp"
#include "relfeat/scene.hpp"
#include "relfeat/ssvs.hpp"

namespace relfeat {

/// Learned state of one skill component: the selection mask, the weights
/// in normalized feature/target space, and the target scaler.
struct SkillComponent {
  std::vector<bool> selected;
  MatrixXd weights;      // M x (K+1), normalized spaces
  VectorXd marginal_p1;  // empty when selection was not sampled
  Scaler target_scaler;
};

/// A feature-linear skill: per-component weights over the scene features,
/// plus everything needed to evaluate on a new scene.
struct SkillModel {
  std::string task_name;
  DmpConfig dmp;
  Scaler feature_scaler;
  std::array<SkillComponent, kNumComponents> components;
  std::vector<std::string> feature_names;
  double nominal_duration = 0.0;

  /// Denormalized target shape parameters predicted for raw features.
  VectorXd predict_targets(int component, const VectorXd& raw_features) const;

  /// Movement end point per component for a new scene (start = hand_start).
  Vec3 predict_goal_vector(const Scene& scene) const;

  /// Full trajectory rollout for a new scene.
  Trajectory predict_trajectory(const Scene& scene, double dt = 0.01) const;
};

/// Per-demonstration target shape parameters for every component,
/// extracted after temporal rescaling to the median demo duration.
struct DatasetTargets {
  std::array<MatrixXd, kNumComponents> targets;  // each N x (K+1)
  DmpConfig cfg;                                 // tau matched to the duration
  double nominal_duration = 0.0;
  std::array<VectorXd, kNumComponents> goals;    // final demo value per component
};

DatasetTargets extract_dataset_targets(const Dataset& dataset, DmpConfig base,
                                       int resample_samples = 200);

/// Feature matrix of a dataset, one column per demonstration.
MatrixXd dataset_features(const Dataset& dataset);

/// Fit a skill given explicit per-component selection masks.
SkillModel learn_skill_with_masks(const Dataset& dataset,
                                  const std::array<std::vector<bool>, kNumComponents>& masks,
                                  const DmpConfig& base, int resample_samples = 200);

/// Select features per component by Gibbs sampling under the given priors,
/// then fit. Marginals are kept in the model.
SkillModel learn_skill_with_priors(const Dataset& dataset,
                                   const std::array<RelevancePrior, kNumComponents>& priors,
                                   const SsvsHyper& hyper, const DmpConfig& base,
                                   std::uint64_t seed, int resample_samples = 200);

}  // namespace relfeat
