#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "relfeat/scene.hpp"

namespace relfeat {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr int kMetaFeatureCount = 8;

enum class FeatureKind { Position, Length };

/// Identity of one scalar object feature: which part, position or length,
/// and along which task-frame axis. Six features per part, ordered
/// pos x,y,z then len x,y,z.
struct FeatureSpec {
  std::size_t part_index = 0;
  FeatureKind kind = FeatureKind::Position;
  int axis = 0;  // 0=x, 1=y, 2=z

  Vec3 direction() const { return Vec3::Unit(axis); }
};

/// Display name following the position/length, object, part, axis scheme,
/// e.g. "pos-o1-p2-x".
std::string feature_display_name(const FeatureSpec& spec, const Scene& scene);

/// Deterministic feature layout for a scene with the given part count.
std::vector<FeatureSpec> feature_layout(std::size_t part_count);

struct FeatureVector {
  VectorXd values;
  std::vector<FeatureSpec> spec;
};

/// Hand-relative part positions and box extents, in the task frame.
/// Scenes must already be aligned to the task prototype's part order.
FeatureVector generate_features(const Scene& scene);

/// The eight meta features describing how feature `spec` relates to the
/// skill component with direction `skill_dir`:
///   0: squared distance hand-to-part at start
///   1: squared distance along the skill direction at start
///   2: |alignment| of the feature axis with the skill direction
///   3-5: the same three at the end of the demonstration
///   6: +1 for position features, -1 for length features
///   7: bias, always 1
using MetaFeatureVector = Eigen::Matrix<double, kMetaFeatureCount, 1>;

MetaFeatureVector compute_meta_features(const Scene& scene, const FeatureSpec& spec,
                                        const Vec3& skill_dir);

/// All meta features of a scene for one skill component, one row per feature.
MatrixXd compute_meta_feature_rows(const Scene& scene, const Vec3& skill_dir);

/// Affine per-row (or per-column) scaler with an exact inverse.
/// Zero-variance rows keep scale 1 so constant features survive.
struct Scaler {
  VectorXd mean;
  VectorXd scale;

  VectorXd apply(const Eigen::Ref<const VectorXd>& v) const {
    return (v - mean).cwiseQuotient(scale);
  }
  VectorXd invert(const Eigen::Ref<const VectorXd>& v) const {
    return v.cwiseProduct(scale) + mean;
  }
  double invert_one(int i, double v) const { return v * scale[i] + mean[i]; }
};

struct NormalizedData {
  MatrixXd features;  // M x N, rows z-scored
  MatrixXd targets;   // N x (K+1), columns z-scored
  Scaler feature_scaler;
  Scaler target_scaler;
};

/// Z-score feature rows and target columns over the N demonstrations
/// (sample standard deviation, N-1 denominator).
NormalizedData normalize_dataset(const MatrixXd& features, const MatrixXd& targets);

/// Row-wise scaler over columns of an M x N matrix.
Scaler fit_row_scaler(const MatrixXd& m);

}  // namespace relfeat
