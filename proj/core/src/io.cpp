#include "relfeat/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace relfeat {

using nlohmann::json;

namespace {

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    fail(ErrorCode::Schema, std::string(what) + " must be a 3-array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

Mat3 mat3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    fail(ErrorCode::Schema, std::string(what) + " must be a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::Schema, std::string(what) + " must be an array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      fail(ErrorCode::Schema, std::string(what) + " has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

VectorXd vector_from(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::Schema, std::string(what) + " must be an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json to_json(const std::vector<bool>& v) {
  json arr = json::array();
  for (bool b : v) arr.push_back(b);
  return arr;
}

std::vector<bool> bools_from(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::Schema, std::string(what) + " must be an array");
  std::vector<bool> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<bool>();
  return v;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::Schema, std::string("missing field: ") + key);
  return *it;
}

json read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, "invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::Schema, "document root must be an object");
  const int version = require(doc, "schema_version").get<int>();
  if (version != kSchemaVersion)
    fail(ErrorCode::Schema, "unsupported schema_version " + std::to_string(version));
  return doc;
}

void write_document(const std::filesystem::path& path, json doc, const Provenance& prov) {
  doc["schema_version"] = kSchemaVersion;
  doc["seed"] = prov.seed;
  doc["config_hash"] = prov.config_hash;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

json scene_to_json(const Scene& scene) {
  json parts = json::array();
  for (const ScenePart& p : scene.parts) {
    json jp{{"object_id", p.object_id},
            {"center_start", to_json(p.center_start)},
            {"center_end", to_json(p.center_end)},
            {"dims", to_json(p.dims)},
            {"net_rotation", to_json(p.net_rotation)}};
    if (p.source) {
      jp["member_indices"] = p.source->member_indices;
      jp["bbox_center"] = to_json(p.source->bbox.center);
      jp["bbox_dims"] = to_json(p.source->bbox.dims);
    }
    parts.push_back(std::move(jp));
  }
  return json{{"hand_start", to_json(scene.hand_start)},
              {"hand_end", to_json(scene.hand_end)},
              {"parts", std::move(parts)}};
}

Scene scene_from_json(const json& j) {
  Scene scene;
  scene.hand_start = vec3_from(require(j, "hand_start"), "hand_start");
  scene.hand_end = vec3_from(require(j, "hand_end"), "hand_end");
  for (const json& jp : require(j, "parts")) {
    ScenePart p;
    p.object_id = require(jp, "object_id").get<std::string>();
    p.center_start = vec3_from(require(jp, "center_start"), "center_start");
    p.center_end = vec3_from(require(jp, "center_end"), "center_end");
    p.dims = vec3_from(require(jp, "dims"), "dims");
    p.net_rotation = mat3_from(require(jp, "net_rotation"), "net_rotation");
    if (jp.contains("member_indices")) {
      Part part;
      part.object_id = p.object_id;
      part.member_indices = jp["member_indices"].get<std::vector<std::size_t>>();
      part.bbox.center = vec3_from(require(jp, "bbox_center"), "bbox_center");
      part.bbox.dims = vec3_from(require(jp, "bbox_dims"), "bbox_dims");
      p.source = std::move(part);
    }
    scene.parts.push_back(std::move(p));
  }
  return scene;
}

json trajectory_to_json(const Trajectory& t) {
  return json{{"times", t.times},
              {"values", json::array({t.values[0], t.values[1], t.values[2]})}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  t.times = require(j, "times").get<std::vector<double>>();
  const json& values = require(j, "values");
  if (!values.is_array() || values.size() != kNumComponents)
    fail(ErrorCode::Schema, "trajectory values must hold three component tracks");
  for (int c = 0; c < kNumComponents; ++c)
    t.values[static_cast<std::size_t>(c)] = values[c].get<std::vector<double>>();
  t.validate();
  return t;
}

json scaler_to_json(const Scaler& s) {
  return json{{"mean", to_json(s.mean)}, {"scale", to_json(s.scale)}};
}

Scaler scaler_from_json(const json& j) {
  Scaler s;
  s.mean = vector_from(require(j, "mean"), "scaler mean");
  s.scale = vector_from(require(j, "scale"), "scaler scale");
  return s;
}

json labels_to_json(const RelevanceLabels& labels) {
  return json::array(
      {to_json(labels[0]), to_json(labels[1]), to_json(labels[2])});
}

RelevanceLabels labels_from_json(const json& j) {
  if (!j.is_array() || j.size() != kNumComponents)
    fail(ErrorCode::Schema, "relevance labels must hold three component vectors");
  RelevanceLabels labels;
  for (int c = 0; c < kNumComponents; ++c)
    labels[static_cast<std::size_t>(c)] = bools_from(j[c], "relevance labels");
  return labels;
}

}  // namespace

std::string config_fingerprint(const std::string& canonical_json) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << fnv1a(canonical_json);
  return out.str();
}

void save_pointset(const std::filesystem::path& path, const PointSet& object,
                   const Provenance& prov) {
  json points = json::array();
  for (const OrientedPoint& p : object.points) {
    points.push_back(json{{"position", to_json(p.position)},
                          {"normal", to_json(p.normal)},
                          {"curvature", p.curvature},
                          {"spectral", to_json(p.spectral)},
                          {"valid", p.valid}});
  }
  json poses = json::array();
  for (const RigidTransform& g : object.pose_sequence)
    poses.push_back(json{{"rotation", to_json(g.rotation)},
                         {"translation", to_json(g.translation)}});
  write_document(path,
                 json{{"kind", "pointset"},
                      {"object_id", object.object_id},
                      {"points", std::move(points)},
                      {"pose_sequence", std::move(poses)},
                      {"pose_times", object.pose_times}},
                 prov);
}

PointSet load_pointset(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "pointset")
    fail(ErrorCode::Schema, "expected a pointset document");
  PointSet object;
  object.object_id = require(doc, "object_id").get<std::string>();
  for (const json& jp : require(doc, "points")) {
    OrientedPoint p;
    p.position = vec3_from(require(jp, "position"), "point position");
    p.normal = vec3_from(require(jp, "normal"), "point normal");
    p.curvature = require(jp, "curvature").get<double>();
    p.spectral = vec3_from(require(jp, "spectral"), "point spectral");
    p.valid = jp.value("valid", true);
    object.points.push_back(p);
  }
  for (const json& jg : require(doc, "pose_sequence")) {
    RigidTransform g;
    g.rotation = mat3_from(require(jg, "rotation"), "pose rotation");
    g.translation = vec3_from(require(jg, "translation"), "pose translation");
    object.pose_sequence.push_back(g);
  }
  object.pose_times = require(doc, "pose_times").get<std::vector<double>>();
  object.validate();
  return object;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset,
                  const Provenance& prov) {
  json demos = json::array();
  for (const Demonstration& d : dataset.demonstrations)
    demos.push_back(json{{"scene", scene_to_json(d.scene)},
                         {"trajectory", trajectory_to_json(d.trajectory)}});
  json doc{{"kind", "dataset"},
           {"task_name", dataset.task_name},
           {"exclude_group", dataset.exclude_group},
           {"demonstrations", std::move(demos)}};
  if (dataset.ground_truth_relevance)
    doc["ground_truth_relevance"] = labels_to_json(*dataset.ground_truth_relevance);
  write_document(path, std::move(doc), prov);
}

Dataset load_dataset(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "dataset")
    fail(ErrorCode::Schema, "expected a dataset document");
  Dataset dataset;
  dataset.task_name = require(doc, "task_name").get<std::string>();
  dataset.exclude_group = doc.value("exclude_group", dataset.task_name);
  for (const json& jd : require(doc, "demonstrations")) {
    dataset.demonstrations.push_back(
        make_demonstration(scene_from_json(require(jd, "scene")),
                           trajectory_from_json(require(jd, "trajectory"))));
  }
  if (doc.contains("ground_truth_relevance"))
    dataset.ground_truth_relevance = labels_from_json(doc["ground_truth_relevance"]);
  dataset.validate();
  return dataset;
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruthSidecar& gt,
                       const Provenance& prov) {
  json weights = json::array();
  for (int c = 0; c < kNumComponents; ++c) weights.push_back(to_json(gt.true_weights[c]));
  json theta = json::array();
  for (int h = 0; h < kMetaFeatureCount; ++h) theta.push_back(gt.theta_star[h]);
  write_document(path,
                 json{{"kind", "ground_truth"},
                      {"task_name", gt.task_name},
                      {"relevance", labels_to_json(gt.relevance)},
                      {"true_weights", std::move(weights)},
                      {"theta_star", std::move(theta)},
                      {"noise_std", gt.noise_std},
                      {"goal_part", gt.goal_part}},
                 prov);
}

GroundTruthSidecar load_ground_truth(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "ground_truth")
    fail(ErrorCode::Schema, "expected a ground_truth document");
  GroundTruthSidecar gt;
  gt.task_name = require(doc, "task_name").get<std::string>();
  gt.relevance = labels_from_json(require(doc, "relevance"));
  const json& weights = require(doc, "true_weights");
  for (int c = 0; c < kNumComponents; ++c)
    gt.true_weights[c] = matrix_from(weights[c], "true weights");
  const json& theta = require(doc, "theta_star");
  for (int h = 0; h < kMetaFeatureCount; ++h) gt.theta_star[h] = theta[h].get<double>();
  gt.noise_std = require(doc, "noise_std").get<double>();
  gt.goal_part = require(doc, "goal_part").get<std::size_t>();
  return gt;
}

void save_skill_model(const std::filesystem::path& path, const SkillModel& model,
                      const Provenance& prov) {
  json components = json::array();
  for (const SkillComponent& comp : model.components) {
    json jc{{"selected", to_json(comp.selected)},
            {"weights", to_json(comp.weights)},
            {"target_scaler", scaler_to_json(comp.target_scaler)}};
    if (comp.marginal_p1.size() > 0) jc["marginal_p1"] = to_json(comp.marginal_p1);
    components.push_back(std::move(jc));
  }
  write_document(path,
                 json{{"kind", "skill_model"},
                      {"task_name", model.task_name},
                      {"dmp",
                       json{{"alpha_z", model.dmp.alpha_z},
                            {"beta_z", model.dmp.beta_z},
                            {"tau", model.dmp.tau},
                            {"basis_count", model.dmp.basis_count},
                            {"x_cutoff", model.dmp.x_cutoff}}},
                      {"nominal_duration", model.nominal_duration},
                      {"feature_scaler", scaler_to_json(model.feature_scaler)},
                      {"feature_names", model.feature_names},
                      {"components", std::move(components)}},
                 prov);
}

SkillModel load_skill_model(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "skill_model")
    fail(ErrorCode::Schema, "expected a skill_model document");
  SkillModel model;
  model.task_name = require(doc, "task_name").get<std::string>();
  const json& jd = require(doc, "dmp");
  model.dmp.alpha_z = require(jd, "alpha_z").get<double>();
  model.dmp.beta_z = require(jd, "beta_z").get<double>();
  model.dmp.tau = require(jd, "tau").get<double>();
  model.dmp.basis_count = require(jd, "basis_count").get<int>();
  model.dmp.x_cutoff = require(jd, "x_cutoff").get<double>();
  model.nominal_duration = require(doc, "nominal_duration").get<double>();
  model.feature_scaler = scaler_from_json(require(doc, "feature_scaler"));
  model.feature_names = require(doc, "feature_names").get<std::vector<std::string>>();
  const json& components = require(doc, "components");
  if (components.size() != kNumComponents)
    fail(ErrorCode::Schema, "skill model must carry three components");
  for (int c = 0; c < kNumComponents; ++c) {
    SkillComponent& comp = model.components[static_cast<std::size_t>(c)];
    comp.selected = bools_from(require(components[c], "selected"), "selected");
    comp.weights = matrix_from(require(components[c], "weights"), "weights");
    comp.target_scaler = scaler_from_json(require(components[c], "target_scaler"));
    if (components[c].contains("marginal_p1"))
      comp.marginal_p1 = vector_from(components[c]["marginal_p1"], "marginal_p1");
  }
  return model;
}

void save_meta_prior(const std::filesystem::path& path, const MetaPrior& prior,
                     const Provenance& prov) {
  json theta = json::array(), mean = json::array(), scale = json::array();
  for (int h = 0; h < kMetaFeatureCount; ++h) {
    theta.push_back(prior.theta[h]);
    mean.push_back(prior.scaler_mean[h]);
    scale.push_back(prior.scaler_scale[h]);
  }
  write_document(path,
                 json{{"kind", "meta_prior"},
                      {"theta", std::move(theta)},
                      {"scaler_mean", std::move(mean)},
                      {"scaler_scale", std::move(scale)},
                      {"l2_penalty", prior.l2_penalty},
                      {"converged", prior.converged},
                      {"iterations", prior.iterations},
                      {"training_summary",
                       json{{"positives", prior.positives},
                            {"negatives", prior.negatives},
                            {"source_skills", prior.source_skills}}}},
                 prov);
}

MetaPrior load_meta_prior(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "meta_prior")
    fail(ErrorCode::Schema, "expected a meta_prior document");
  MetaPrior prior;
  const json& theta = require(doc, "theta");
  const json& mean = require(doc, "scaler_mean");
  const json& scale = require(doc, "scaler_scale");
  for (int h = 0; h < kMetaFeatureCount; ++h) {
    prior.theta[h] = theta[h].get<double>();
    prior.scaler_mean[h] = mean[h].get<double>();
    prior.scaler_scale[h] = scale[h].get<double>();
  }
  prior.l2_penalty = require(doc, "l2_penalty").get<double>();
  prior.converged = require(doc, "converged").get<bool>();
  prior.iterations = require(doc, "iterations").get<int>();
  const json& summary = require(doc, "training_summary");
  prior.positives = require(summary, "positives").get<std::size_t>();
  prior.negatives = require(summary, "negatives").get<std::size_t>();
  prior.source_skills = require(summary, "source_skills").get<std::vector<std::string>>();
  return prior;
}

namespace {

json row_to_json(const TrialRow& row) {
  json j{{"task", row.task},
         {"repetition", row.repetition},
         {"component", row.component},
         {"condition", condition_name(row.condition)},
         {"leak", row.leak}};
  if (!std::isnan(row.accuracy)) j["accuracy"] = row.accuracy;
  if (!std::isnan(row.precision)) j["precision"] = row.precision;
  if (!std::isnan(row.recall)) j["recall"] = row.recall;
  if (!std::isnan(row.rmse)) j["rmse"] = row.rmse;
  return j;
}

TrialRow row_from_json(const json& j) {
  TrialRow row;
  row.task = require(j, "task").get<std::string>();
  row.repetition = require(j, "repetition").get<int>();
  row.component = require(j, "component").get<int>();
  row.condition = condition_from_name(require(j, "condition").get<std::string>());
  row.leak = j.value("leak", false);
  row.accuracy = j.value("accuracy", std::numeric_limits<double>::quiet_NaN());
  row.precision = j.value("precision", std::numeric_limits<double>::quiet_NaN());
  row.recall = j.value("recall", std::numeric_limits<double>::quiet_NaN());
  row.rmse = j.value("rmse", std::numeric_limits<double>::quiet_NaN());
  return row;
}

}  // namespace

void save_metrics_report(const std::filesystem::path& path, const MetricsReport& report,
                         const Provenance& prov) {
  json rows = json::array();
  for (const TrialRow& row : report.rows) rows.push_back(row_to_json(row));
  json aggregates = json::array();
  for (const AggregateRow& a : report.aggregates) {
    aggregates.push_back(json{{"condition", condition_name(a.condition)},
                              {"component", a.component},
                              {"count", a.count},
                              {"accuracy_mean", a.accuracy_mean},
                              {"accuracy_std", a.accuracy_std},
                              {"precision_mean", a.precision_mean},
                              {"precision_std", a.precision_std},
                              {"recall_mean", a.recall_mean},
                              {"recall_std", a.recall_std},
                              {"rmse", a.rmse},
                              {"rmse_std", a.rmse_std}});
  }
  write_document(path,
                 json{{"kind", "metrics_report"},
                      {"benchmark", report.benchmark},
                      {"rows", std::move(rows)},
                      {"aggregates", std::move(aggregates)}},
                 prov);
}

MetricsReport load_metrics_report(const std::filesystem::path& path) {
  const json doc = read_document(path);
  if (require(doc, "kind").get<std::string>() != "metrics_report")
    fail(ErrorCode::Schema, "expected a metrics_report document");
  MetricsReport report;
  report.benchmark = require(doc, "benchmark").get<std::string>();
  for (const json& j : require(doc, "rows")) report.rows.push_back(row_from_json(j));
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

void save_metrics_csv(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << "trial_id,task,component,condition,accuracy,precision,recall,rmse\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : std::to_string(v); };
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const TrialRow& r = report.rows[i];
    out << i << ',' << r.task << ',' << r.component << ',' << condition_name(r.condition)
        << ',' << cell(r.accuracy) << ',' << cell(r.precision) << ',' << cell(r.recall)
        << ',' << cell(r.rmse) << '\n';
  }
}

void save_parts(const std::filesystem::path& path,
                const std::vector<std::vector<PartCluster>>& parts_per_object,
                const std::vector<std::string>& object_ids, const Provenance& prov) {
  json objects = json::array();
  for (std::size_t o = 0; o < parts_per_object.size(); ++o) {
    json parts = json::array();
    for (const PartCluster& pc : parts_per_object[o]) {
      parts.push_back(json{{"member_indices", pc.part.member_indices},
                           {"bbox_center", to_json(pc.part.bbox.center)},
                           {"bbox_dims", to_json(pc.part.bbox.dims)},
                           {"fill_flagged", pc.fill_flagged}});
    }
    objects.push_back(json{{"object_id", object_ids.at(o)}, {"parts", std::move(parts)}});
  }
  write_document(path, json{{"kind", "parts"}, {"objects", std::move(objects)}}, prov);
}

void save_selection(const std::filesystem::path& path, const SelectionResult& sel,
                    const Provenance& prov) {
  json components = json::array();
  for (int c = 0; c < kNumComponents; ++c) {
    components.push_back(json{{"marginal_p1", to_json(sel.marginal_p1[c])},
                              {"selected", to_json(sel.selected[c])},
                              {"prior_p1", to_json(sel.prior_p1[c])}});
  }
  write_document(path,
                 json{{"kind", "selection"},
                      {"feature_names", sel.feature_names},
                      {"components", std::move(components)}},
                 prov);
}

void save_features(const std::filesystem::path& path, const Dataset& dataset,
                   const Provenance& prov) {
  const MatrixXd features = dataset_features(dataset);
  const Scene& first = dataset.demonstrations.front().scene;
  const auto layout = feature_layout(first.parts.size());
  json names = json::array();
  for (const FeatureSpec& spec : layout)
    names.push_back(feature_display_name(spec, first));

  json meta = json::array();
  for (int c = 0; c < kNumComponents; ++c) {
    json per_demo = json::array();
    for (const Demonstration& demo : dataset.demonstrations)
      per_demo.push_back(to_json(compute_meta_feature_rows(demo.scene, Vec3::Unit(c))));
    meta.push_back(std::move(per_demo));
  }
  write_document(path,
                 json{{"kind", "features"},
                      {"task_name", dataset.task_name},
                      {"feature_names", std::move(names)},
                      {"features", to_json(features)},
                      {"meta_features", std::move(meta)}},
                 prov);
}

void save_contact_truth(const std::filesystem::path& path, const ContactScene& scene,
                        const Provenance& prov) {
  write_document(path,
                 json{{"kind", "contact_truth"},
                      {"object_a", scene.object_a.object_id},
                      {"object_b", scene.object_b.object_id},
                      {"true_face_a", scene.true_face_a},
                      {"true_face_b", scene.true_face_b}},
                 prov);
}

}  // namespace relfeat
