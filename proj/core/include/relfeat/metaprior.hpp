#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relfeat/featgen.hpp"
#include "relfeat/rng.hpp"
#include "relfeat/ssvs.hpp"

namespace relfeat {

/// One labeled example for meta-prior training: the demo-averaged meta
/// features of a feature for one skill component, and whether that
/// feature was relevant.
struct MetaTrainingRow {
  MetaFeatureVector phi;
  bool relevant = false;
  std::string source_skill;
};

struct MetaTrainingSet {
  std::vector<MetaTrainingRow> rows;
};

/// Logistic weights over the eight meta features plus the scalers applied
/// before evaluation. The bias component is neither scaled nor penalized.
struct MetaPrior {
  Eigen::Matrix<double, kMetaFeatureCount, 1> theta =
      Eigen::Matrix<double, kMetaFeatureCount, 1>::Zero();
  Eigen::Matrix<double, kMetaFeatureCount, 1> scaler_mean =
      Eigen::Matrix<double, kMetaFeatureCount, 1>::Zero();
  Eigen::Matrix<double, kMetaFeatureCount, 1> scaler_scale =
      Eigen::Matrix<double, kMetaFeatureCount, 1>::Ones();
  double l2_penalty = 1e-3;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;  // penalized log-likelihood per iteration
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::string> source_skills;

  double sigmoid_of(const MetaFeatureVector& phi) const {
    double z = 0.0;
    for (int h = 0; h < kMetaFeatureCount; ++h)
      z += theta[h] * (phi[h] - scaler_mean[h]) / scaler_scale[h];
    return 1.0 / (1.0 + std::exp(-z));
  }

  /// Weights mapped back to the raw (unscaled) meta-feature space: the
  /// per-component scaling folds into the weights and the centering folds
  /// into the bias.
  Eigen::Matrix<double, kMetaFeatureCount, 1> theta_raw() const {
    Eigen::Matrix<double, kMetaFeatureCount, 1> raw;
    double bias_shift = 0.0;
    for (int h = 0; h < kMetaFeatureCount; ++h) {
      raw[h] = theta[h] / scaler_scale[h];
      bias_shift += theta[h] * scaler_mean[h] / scaler_scale[h];
    }
    raw[kMetaFeatureCount - 1] -= bias_shift;
    return raw;
  }
};

/// A labeled skill: everything needed to mine (meta feature, relevance)
/// pairs, namely the per-component, demo-averaged meta feature rows and
/// the ground-truth labels.
struct LabeledSkill {
  std::string skill_id;
  std::string exclude_group;
  std::array<MatrixXd, kNumComponents> meta_rows;  // per component: M x 8
  RelevanceLabels labels;
};

/// Extract the labeled rows of a skill from its dataset: meta features
/// averaged over the skill's demonstrations, one row per (feature,
/// component).
LabeledSkill labeled_skill_from_dataset(const Dataset& dataset);

/// Pool rows from all non-excluded skills, then draw half the positives
/// and an equal number of negatives. Deterministic given the seed.
MetaTrainingSet build_training_set(const std::vector<LabeledSkill>& prior_skills,
                                   const std::vector<std::string>& exclude_groups,
                                   std::uint64_t seed);

/// Penalized logistic regression via Newton steps with step halving.
/// Meta features are standardized first (bias column untouched).
MetaPrior train_irls(const MetaTrainingSet& ts, double l2 = 1e-3, int max_iter = 100);

/// Prior inclusion probabilities for a new skill: the sigmoid evaluated
/// per demonstration, then averaged.
RelevancePrior compute_prior(const MetaPrior& meta,
                             const std::vector<MatrixXd>& per_demo_meta_rows);

/// The constant-probability baseline: the relevant fraction over all
/// labels of the prior skills.
RelevancePrior uniform_prior(const std::vector<LabeledSkill>& prior_skills,
                             const std::vector<std::string>& exclude_groups, int m);

}  // namespace relfeat
