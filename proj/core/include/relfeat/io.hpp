#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "relfeat/bench.hpp"
#include "relfeat/metaprior.hpp"
#include "relfeat/partseg.hpp"
#include "relfeat/skill.hpp"
#include "relfeat/synthgen.hpp"

namespace relfeat {

inline constexpr int kSchemaVersion = 1;

/// Written into every output file: the master seed that produced it and a
/// fingerprint of the effective configuration.
struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// FNV-1a fingerprint of a canonical config dump, hex encoded.
std::string config_fingerprint(const std::string& canonical_json);

void save_pointset(const std::filesystem::path& path, const PointSet& object,
                   const Provenance& prov);
PointSet load_pointset(const std::filesystem::path& path);

void save_dataset(const std::filesystem::path& path, const Dataset& dataset,
                  const Provenance& prov);
Dataset load_dataset(const std::filesystem::path& path);

/// Planted truth emitted next to a synthetic dataset.
struct GroundTruthSidecar {
  std::string task_name;
  RelevanceLabels relevance;
  std::array<MatrixXd, kNumComponents> true_weights;
  MetaFeatureVector theta_star = MetaFeatureVector::Zero();
  double noise_std = 0.0;
  std::size_t goal_part = 0;
};

void save_ground_truth(const std::filesystem::path& path, const GroundTruthSidecar& gt,
                       const Provenance& prov);
GroundTruthSidecar load_ground_truth(const std::filesystem::path& path);

void save_skill_model(const std::filesystem::path& path, const SkillModel& model,
                      const Provenance& prov);
SkillModel load_skill_model(const std::filesystem::path& path);

void save_meta_prior(const std::filesystem::path& path, const MetaPrior& prior,
                     const Provenance& prov);
MetaPrior load_meta_prior(const std::filesystem::path& path);

void save_metrics_report(const std::filesystem::path& path, const MetricsReport& report,
                         const Provenance& prov);
MetricsReport load_metrics_report(const std::filesystem::path& path);

/// Flat per-trial rows: trial_id, task, component, condition, accuracy,
/// precision, recall, rmse. Rows are ordered canonically.
void save_metrics_csv(const std::filesystem::path& path, const MetricsReport& report);

void save_parts(const std::filesystem::path& path,
                const std::vector<std::vector<PartCluster>>& parts_per_object,
                const std::vector<std::string>& object_ids, const Provenance& prov);

/// Output of a feature-selection run.
struct SelectionResult {
  std::array<VectorXd, kNumComponents> marginal_p1;
  std::array<std::vector<bool>, kNumComponents> selected;
  std::array<VectorXd, kNumComponents> prior_p1;
  std::vector<std::string> feature_names;
};

void save_selection(const std::filesystem::path& path, const SelectionResult& sel,
                    const Provenance& prov);

/// Features plus meta features of every demonstration, with index metadata.
void save_features(const std::filesystem::path& path, const Dataset& dataset,
                   const Provenance& prov);

/// Contact-scene ground truth (face membership of both objects).
void save_contact_truth(const std::filesystem::path& path, const ContactScene& scene,
                        const Provenance& prov);

}  // namespace relfeat
