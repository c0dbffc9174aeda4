#include "relfeat/featgen.hpp"

#include <map>

namespace relfeat {

std::vector<FeatureSpec> feature_layout(std::size_t part_count) {
  std::vector<FeatureSpec> layout;
  layout.reserve(part_count * 6);
  for (std::size_t p = 0; p < part_count; ++p) {
    for (int axis = 0; axis < 3; ++axis)
      layout.push_back({p, FeatureKind::Position, axis});
    for (int axis = 0; axis < 3; ++axis)
      layout.push_back({p, FeatureKind::Length, axis});
  }
  return layout;
}

std::string feature_display_name(const FeatureSpec& spec, const Scene& scene) {
  // Object number = order of first appearance of the object id, part
  // number = index of the part within its object.
  std::map<std::string, int> object_number;
  std::vector<int> part_number(scene.parts.size(), 0);
  std::map<std::string, int> parts_seen;
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    const std::string& id = scene.parts[i].object_id;
    if (!object_number.count(id))
      object_number[id] = static_cast<int>(object_number.size()) + 1;
    part_number[i] = ++parts_seen[id];
  }
  const ScenePart& part = scene.parts.at(spec.part_index);
  const char* kind = spec.kind == FeatureKind::Position ? "pos" : "len";
  const char axis = static_cast<char>('x' + spec.axis);
  return std::string(kind) + "-o" + std::to_string(object_number[part.object_id]) +
         "-p" + std::to_string(part_number[spec.part_index]) + "-" + axis;
}

FeatureVector generate_features(const Scene& scene) {
  FeatureVector fv;
  fv.spec = feature_layout(scene.parts.size());
  fv.values.resize(static_cast<Eigen::Index>(fv.spec.size()));
  for (std::size_t i = 0; i < fv.spec.size(); ++i) {
    const FeatureSpec& spec = fv.spec[i];
    const ScenePart& part = scene.parts[spec.part_index];
    fv.values[static_cast<Eigen::Index>(i)] =
        spec.kind == FeatureKind::Position
            ? part.center_start[spec.axis] - scene.hand_start[spec.axis]
            : part.dims[spec.axis];
  }
  return fv;
}

MetaFeatureVector compute_meta_features(const Scene& scene, const FeatureSpec& spec,
                                        const Vec3& skill_dir) {
  if (spec.part_index >= scene.parts.size())
    fail(ErrorCode::Dimension, "feature spec refers to a missing part");
  const ScenePart& part = scene.parts[spec.part_index];

  const Vec3 d_feature = spec.direction();
  const Vec3 d_feature_end = part.net_rotation * d_feature;

  const Vec3 rel_start = part.center_start - scene.hand_start;
  const Vec3 rel_end = part.center_end - scene.hand_end;

  MetaFeatureVector phi;
  phi[0] = rel_start.squaredNorm();
  const double proj_start = skill_dir.dot(rel_start);
  phi[1] = proj_start * proj_start;
  phi[2] = std::abs(skill_dir.dot(d_feature));
  phi[3] = rel_end.squaredNorm();
  const double proj_end = skill_dir.dot(rel_end);
  phi[4] = proj_end * proj_end;
  phi[5] = std::abs(skill_dir.dot(d_feature_end));
  phi[6] = spec.kind == FeatureKind::Position ? 1.0 : -1.0;
  phi[7] = 1.0;
  return phi;
}

MatrixXd compute_meta_feature_rows(const Scene& scene, const Vec3& skill_dir) {
  const auto layout = feature_layout(scene.parts.size());
  MatrixXd rows(layout.size(), kMetaFeatureCount);
  for (std::size_t j = 0; j < layout.size(); ++j)
    rows.row(static_cast<Eigen::Index>(j)) =
        compute_meta_features(scene, layout[j], skill_dir).transpose();
  return rows;
}

Scaler fit_row_scaler(const MatrixXd& m) {
  const Eigen::Index n = m.cols();
  Scaler s;
  s.mean = m.rowwise().mean();
  s.scale.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double var =
        (m.row(i).array() - s.mean[i]).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    s.scale[i] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

NormalizedData normalize_dataset(const MatrixXd& features, const MatrixXd& targets) {
  if (features.cols() < 2)
    fail(ErrorCode::Data, "normalization needs at least two demonstrations");
  if (targets.rows() != features.cols())
    fail(ErrorCode::Dimension, "feature columns and target rows must both count demos");

  NormalizedData out;
  out.feature_scaler = fit_row_scaler(features);
  out.features = (features.colwise() - out.feature_scaler.mean)
                     .array()
                     .colwise() /
                 out.feature_scaler.scale.array();

  const MatrixXd targets_t = targets.transpose();
  out.target_scaler = fit_row_scaler(targets_t);
  out.targets = ((targets_t.colwise() - out.target_scaler.mean).array().colwise() /
                 out.target_scaler.scale.array())
                    .transpose();
  return out;
}

}  // namespace relfeat
