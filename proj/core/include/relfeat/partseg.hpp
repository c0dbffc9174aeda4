#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "relfeat/gmm.hpp"
#include "relfeat/scene.hpp"

namespace relfeat {

/// Thresholds for calling two points "interacting": close enough, with
/// opposing normals, sampled at the configured frame rate.
struct InteractionConfig {
  double distance_threshold = 0.02;   // meters
  double normal_dot_threshold = -0.5;
  double frame_subsample_hz = 1.0;

  void validate() const {
    if (distance_threshold <= 0.0)
      fail(ErrorCode::Config, "interaction distance threshold must be positive");
    if (normal_dot_threshold < -1.0 || normal_dot_threshold > 1.0)
      fail(ErrorCode::Config, "normal dot threshold must lie in [-1, 1]");
    if (frame_subsample_hz <= 0.0)
      fail(ErrorCode::Config, "frame subsample rate must be positive");
  }
};

struct SegmentationConfig {
  double pairwise_coefficient = 1.0;  // Potts weight
  int gmm_components = 3;
  int knn = 8;
  int max_iterations = 10;

  void validate() const {
    if (pairwise_coefficient <= 0.0 || gmm_components < 1 || knn < 1 ||
        max_iterations < 1)
      fail(ErrorCode::Config, "segmentation config values must be positive");
  }
};

/// Diagonal regularizer added to part covariances before kernel
/// evaluation: one value for the position block, one for the normals.
struct KernelConfig {
  double position_cov = 0.025;
  double normal_cov = 0.25;

  void validate() const {
    if (position_cov <= 0.0 || normal_cov <= 0.0)
      fail(ErrorCode::Config, "kernel covariances must be positive");
  }
};

/// Gaussian summary of a part's 6-D (position, normal) samples in the
/// object frame.
struct PartGaussian {
  Eigen::Matrix<double, 6, 1> mean = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Zero();
};

/// One per-frame, per-object-pair estimate of an affordance-bearing part.
struct PartEstimate {
  std::string object_id;
  std::size_t frame_index = 0;
  std::vector<std::size_t> member_indices;
  PartGaussian summary;
};

PartGaussian summarize_part(const PointSet& object,
                            const std::vector<std::size_t>& members);

/// Indices of points in `a` that are within the distance threshold of a
/// point of `b` with opposing normals, both mapped to the world frame at
/// the given frame.
std::vector<std::size_t> detect_interacting_points(const PointSet& a, const PointSet& b,
                                                   std::size_t frame,
                                                   const InteractionConfig& cfg);

struct GrabCutResult {
  PartEstimate estimate;
  bool degenerate = false;
  std::vector<double> energy_history;  // one entry per min-cut iteration
  // Compact view over the valid points, exposed so the energy bound
  // properties can be checked from outside.
  std::vector<std::size_t> valid_indices;
  Eigen::MatrixXd descriptor_rows;             // valid points x 10
  std::vector<std::pair<int, int>> edges;      // knn graph, compact indexing
  std::vector<bool> foreground;                // compact indexing
  DiagonalGmm fg_model;
  DiagonalGmm bg_model;
};

/// Binary part segmentation: iterate between mixture fits of the two
/// segments' local descriptors and an exact min cut on the k-NN graph
/// with Potts pairwise terms. Seeds are hard foreground constraints.
/// Total energy never increases across iterations.
GrabCutResult grabcut_segment(const PointSet& object, std::size_t frame,
                              const std::vector<std::size_t>& seed,
                              const SegmentationConfig& cfg, std::uint64_t rng_seed = 0);

/// Energy of an arbitrary labeling under the given models, for bound checks.
double segmentation_energy(const Eigen::MatrixXd& descriptor_rows,
                           const std::vector<std::pair<int, int>>& edges,
                           const std::vector<bool>& foreground,
                           const DiagonalGmm& fg_model, const DiagonalGmm& bg_model,
                           double pairwise_coefficient);

/// Bhattacharyya coefficient of two regularized Gaussian part summaries;
/// symmetric, in (0, 1], and 1 exactly when the summaries coincide.
double bhattacharyya_kernel(const PartGaussian& p, const PartGaussian& q,
                            const KernelConfig& cfg);
double bhattacharyya_kernel(const PartEstimate& p, const PartEstimate& q,
                            const KernelConfig& cfg);

/// A merged part plus the summary used for matching across demos.
struct PartCluster {
  Part part;
  PartGaussian summary;
  bool fill_flagged = false;  // set when matching had to substitute a part
};

/// Merge redundant per-frame estimates of one object's parts: spectral
/// clustering over the kernel matrix with the cluster count chosen to
/// maximize intra- minus inter-cluster kernel mass, then majority voting
/// on point membership. Output parts are disjoint.
std::vector<PartCluster> cluster_part_estimates(const PointSet& object,
                                                const std::vector<PartEstimate>& estimates,
                                                const KernelConfig& cfg,
                                                std::uint64_t seed = 0);

struct MatchResult {
  std::vector<std::vector<PartCluster>> aligned;  // one list per demo, mode-sized
  std::size_t prototype_index = 0;
};

/// Align one object's part lists across demonstrations: the prototype is
/// the first demo attaining the modal part count; other demos' parts are
/// greedily matched by kernel similarity, extras dropped, gaps filled by
/// the most similar available part and flagged.
MatchResult match_parts_across_demos(const std::vector<std::vector<PartCluster>>& per_demo,
                                     const KernelConfig& cfg);

/// Frame indices subsampled at the interaction config's rate.
std::vector<std::size_t> subsample_frames(const std::vector<double>& pose_times,
                                          double hz);

/// Full single-demonstration pipeline: interaction seeds per object pair
/// per subsampled frame, GrabCut per seed set, and per-object clustering.
/// Returns one part list per object, in input order.
std::vector<std::vector<PartCluster>> extract_parts(
    const std::vector<PointSet>& objects, const InteractionConfig& icfg,
    const SegmentationConfig& scfg, const KernelConfig& kcfg, std::uint64_t seed);

}  // namespace relfeat
