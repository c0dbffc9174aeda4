#include "relfeat/skill.hpp"

#include <algorithm>

namespace relfeat {

VectorXd SkillModel::predict_targets(int component, const VectorXd& raw_features) const {
  const SkillComponent& comp = components[static_cast<std::size_t>(component)];
  if (raw_features.size() != comp.weights.rows())
    fail(ErrorCode::Dimension, "feature count does not match the learned skill");
  const VectorXd normalized = feature_scaler.apply(raw_features);
  const VectorXd predicted = comp.weights.transpose() * normalized;
  return comp.target_scaler.invert(predicted);
}

Vec3 SkillModel::predict_goal_vector(const Scene& scene) const {
  const FeatureVector fv = generate_features(scene);
  Vec3 goal;
  for (int c = 0; c < kNumComponents; ++c) {
    const VectorXd targets = predict_targets(c, fv.values);
    goal[c] = scene.hand_start[c] + targets[0];
  }
  return goal;
}

Trajectory SkillModel::predict_trajectory(const Scene& scene, double dt) const {
  const FeatureVector fv = generate_features(scene);
  Trajectory traj;
  for (int c = 0; c < kNumComponents; ++c) {
    const VectorXd targets = predict_targets(c, fv.values);
    ShapeWeights w;
    w.weights = targets.transpose();
    const IntegrationResult rollout =
        integrate(scene.hand_start[c], VectorXd::Ones(1), w, dmp,
                  nominal_duration, dt);
    if (c == 0) traj.times = rollout.times;
    traj.values[static_cast<std::size_t>(c)] = rollout.positions;
  }
  return traj;
}

DatasetTargets extract_dataset_targets(const Dataset& dataset, DmpConfig base,
                                       int resample_samples) {
  dataset.validate();
  const std::size_t n = dataset.size();

  std::vector<double> durations;
  durations.reserve(n);
  for (const auto& demo : dataset.demonstrations)
    durations.push_back(demo.trajectory.duration());
  std::vector<double> sorted = durations;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];

  DatasetTargets out;
  out.nominal_duration = median;
  out.cfg = base;
  out.cfg.tau = DmpConfig::tau_for_duration(median, base.x_cutoff);
  out.cfg.validate();

  const int cols = out.cfg.basis_count + 1;
  for (int c = 0; c < kNumComponents; ++c) {
    out.targets[c].resize(static_cast<Eigen::Index>(n), cols);
    out.goals[c].resize(static_cast<Eigen::Index>(n));
  }

  std::vector<double> times, values;
  for (std::size_t i = 0; i < n; ++i) {
    const Trajectory& traj = dataset.demonstrations[i].trajectory;
    for (int c = 0; c < kNumComponents; ++c) {
      resample_track(traj.times, traj.values[static_cast<std::size_t>(c)], median,
                     resample_samples, times, values);
      out.targets[c].row(static_cast<Eigen::Index>(i)) =
          extract_targets(times, values, out.cfg).transpose();
      out.goals[c][static_cast<Eigen::Index>(i)] =
          traj.values[static_cast<std::size_t>(c)].back();
    }
  }
  return out;
}

MatrixXd dataset_features(const Dataset& dataset) {
  dataset.validate();
  const std::size_t n = dataset.size();
  MatrixXd features;
  for (std::size_t i = 0; i < n; ++i) {
    const FeatureVector fv = generate_features(dataset.demonstrations[i].scene);
    if (features.size() == 0) features.resize(fv.values.size(), static_cast<Eigen::Index>(n));
    if (fv.values.size() != features.rows())
      fail(ErrorCode::Dimension, "demonstrations disagree on feature dimensionality");
    features.col(static_cast<Eigen::Index>(i)) = fv.values;
  }
  return features;
}

namespace {

SkillModel assemble_skill(const Dataset& dataset, const DatasetTargets& targets,
                          const MatrixXd& features) {
  SkillModel model;
  model.task_name = dataset.task_name;
  model.dmp = targets.cfg;
  model.nominal_duration = targets.nominal_duration;
  const Scene& scene = dataset.demonstrations.front().scene;
  const auto layout = feature_layout(scene.parts.size());
  for (const FeatureSpec& spec : layout)
    model.feature_names.push_back(feature_display_name(spec, scene));
  (void)features;
  return model;
}

}  // namespace

SkillModel learn_skill_with_masks(const Dataset& dataset,
                                  const std::array<std::vector<bool>, kNumComponents>& masks,
                                  const DmpConfig& base, int resample_samples) {
  const MatrixXd features = dataset_features(dataset);
  const DatasetTargets targets = extract_dataset_targets(dataset, base, resample_samples);
  SkillModel model = assemble_skill(dataset, targets, features);
  for (int c = 0; c < kNumComponents; ++c) {
    const NormalizedData norm = normalize_dataset(features, targets.targets[c]);
    if (c == 0) model.feature_scaler = norm.feature_scaler;
    SkillComponent& comp = model.components[static_cast<std::size_t>(c)];
    comp.selected = masks[static_cast<std::size_t>(c)];
    comp.target_scaler = norm.target_scaler;
    comp.weights = fit_final_weights(norm.features, norm.targets, comp.selected);
  }
  return model;
}

SkillModel learn_skill_with_priors(const Dataset& dataset,
                                   const std::array<RelevancePrior, kNumComponents>& priors,
                                   const SsvsHyper& hyper, const DmpConfig& base,
                                   std::uint64_t seed, int resample_samples) {
  const MatrixXd features = dataset_features(dataset);
  const DatasetTargets targets = extract_dataset_targets(dataset, base, resample_samples);
  SkillModel model = assemble_skill(dataset, targets, features);
  for (int c = 0; c < kNumComponents; ++c) {
    const NormalizedData norm = normalize_dataset(features, targets.targets[c]);
    if (c == 0) model.feature_scaler = norm.feature_scaler;
    SkillComponent& comp = model.components[static_cast<std::size_t>(c)];
    const GibbsResult gibbs =
        run_gibbs(norm.features, norm.targets, priors[static_cast<std::size_t>(c)],
                  hyper, derive_seed(seed, "skill-component", static_cast<std::uint64_t>(c)));
    comp.selected = map_relevance(gibbs.chain);
    comp.marginal_p1 = gibbs.marginal_p1;
    comp.target_scaler = norm.target_scaler;
    comp.weights = fit_final_weights(norm.features, norm.targets, comp.selected);
  }
  return model;
}

}  // namespace relfeat
