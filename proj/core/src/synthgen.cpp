#include "relfeat/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "relfeat/descriptors.hpp"
#include "relfeat/dmp.hpp"
#include "relfeat/rng.hpp"

namespace relfeat {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Expected fraction of relevant features when theta_star is scaled by s.
double expected_sparsity(const std::vector<MetaFeatureVector>& phi_bars,
                         const MetaFeatureVector& theta, double s) {
  double acc = 0.0;
  for (const auto& phi : phi_bars) acc += sigmoid(s * theta.dot(phi));
  return acc / static_cast<double>(phi_bars.size());
}

}  // namespace

SyntheticTask generate_task(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "synthetic-task"));

  // Base geometry: boxes grouped two parts per object.
  std::vector<Vec3> base_centers(cfg.n_parts), base_dims(cfg.n_parts);
  for (int p = 0; p < cfg.n_parts; ++p) {
    for (int a = 0; a < 3; ++a) {
      base_centers[p][a] = rng.uniform(cfg.center_min[a], cfg.center_max[a]);
      base_dims[p][a] = rng.uniform(cfg.extent_min, cfg.extent_max);
    }
  }
  const std::size_t goal_part = rng.uniform_index(cfg.n_parts);

  SyntheticTask task;
  task.goal_part = goal_part;
  task.noise_std = cfg.noise_std;
  task.dataset.task_name = cfg.task_name;
  task.dataset.exclude_group = cfg.task_name;

  // Scenes first; trajectories are synthesized once the weights exist.
  std::vector<Scene> scenes(cfg.n_demos);
  for (int i = 0; i < cfg.n_demos; ++i) {
    Scene& scene = scenes[i];
    scene.hand_start = Vec3::Zero();
    for (int p = 0; p < cfg.n_parts; ++p) {
      ScenePart part;
      part.object_id = "obj" + std::to_string(p / 2 + 1);
      for (int a = 0; a < 3; ++a) {
        part.center_start[a] =
            base_centers[p][a] + rng.uniform(-cfg.center_jitter, cfg.center_jitter);
        part.dims[a] = std::clamp(
            base_dims[p][a] + rng.uniform(-cfg.extent_jitter, cfg.extent_jitter),
            cfg.extent_min, cfg.extent_max);
      }
      part.center_end = part.center_start;
      part.net_rotation = Mat3::Identity();
      scene.parts.push_back(std::move(part));
    }
    Vec3 offset;
    do {
      offset = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    } while (offset.squaredNorm() > 1.0);
    scene.hand_end = scene.parts[goal_part].center_start + cfg.hand_goal_radius * offset;
  }

  const int m = cfg.n_parts * 6;
  MatrixXd features(m, cfg.n_demos);
  for (int i = 0; i < cfg.n_demos; ++i)
    features.col(i) = generate_features(scenes[i]).values;

  // Demo-averaged meta features per (feature, component).
  std::array<MatrixXd, kNumComponents> phi_bar;
  std::vector<MetaFeatureVector> flat_rows;
  for (int c = 0; c < kNumComponents; ++c) {
    MatrixXd acc = MatrixXd::Zero(m, kMetaFeatureCount);
    for (int i = 0; i < cfg.n_demos; ++i)
      acc += compute_meta_feature_rows(scenes[i], Vec3::Unit(c));
    phi_bar[c] = acc / static_cast<double>(cfg.n_demos);
    for (int j = 0; j < m; ++j) flat_rows.push_back(phi_bar[c].row(j).transpose());
  }

  // Calibrate the theta_star scale so the planted sparsity is attainable,
  // then draw labels until the realized fraction lands in range and every
  // component keeps at least one relevant feature.
  double lo = 0.0, hi = 1.0;
  while (expected_sparsity(flat_rows, cfg.theta_star, hi) > cfg.true_sparsity &&
         hi < 1e6)
    hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expected_sparsity(flat_rows, cfg.theta_star, mid) > cfg.true_sparsity)
      lo = mid;
    else
      hi = mid;
  }
  const double scale = 0.5 * (lo + hi);
  task.theta_star = scale * cfg.theta_star;

  RelevanceLabels labels;
  bool accepted = false;
  for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
    std::size_t relevant = 0;
    bool each_component_nonempty = true;
    for (int c = 0; c < kNumComponents; ++c) {
      labels[c].assign(m, false);
      std::size_t comp_count = 0;
      for (int j = 0; j < m; ++j) {
        const double p = sigmoid(task.theta_star.dot(phi_bar[c].row(j).transpose()));
        if (rng.bernoulli(p)) {
          labels[c][j] = true;
          ++comp_count;
        }
      }
      relevant += comp_count;
      each_component_nonempty &= comp_count > 0;
    }
    const double realized =
        static_cast<double>(relevant) / static_cast<double>(kNumComponents * m);
    accepted = each_component_nonempty && realized >= 0.5 * cfg.true_sparsity &&
               realized <= 2.0 * cfg.true_sparsity;
  }
  if (!accepted)
    fail(ErrorCode::Data, "sparsity calibration failed after 100 attempts");
  task.dataset.ground_truth_relevance = labels;

  // Planted weights: relevant rows from the slab, irrelevant rows zero.
  const int cols = cfg.basis_count + 1;
  for (int c = 0; c < kNumComponents; ++c) {
    task.true_weights[c] = MatrixXd::Zero(m, cols);
    for (int j = 0; j < m; ++j) {
      if (!labels[c][j]) continue;
      for (int k = 0; k < cols; ++k)
        task.true_weights[c](j, k) = rng.normal(0.0, cfg.weight_std);
    }
  }

  // Trajectories: integrate the primitive with a single constant feature
  // and the demo's noisy target weights.
  DmpConfig dmp;
  dmp.basis_count = cfg.basis_count;
  dmp.tau = DmpConfig::tau_for_duration(cfg.duration, dmp.x_cutoff);
  const double dt = cfg.duration / (cfg.samples - 1);

  for (int i = 0; i < cfg.n_demos; ++i) {
    Trajectory traj;
    for (int c = 0; c < kNumComponents; ++c) {
      VectorXd targets = task.true_weights[c].transpose() * features.col(i);
      for (int k = 0; k < cols; ++k) targets[k] += rng.normal(0.0, cfg.noise_std);
      ShapeWeights w;
      w.weights = targets.transpose();
      const IntegrationResult rollout =
          integrate(scenes[i].hand_start[c], VectorXd::Ones(1), w, dmp, cfg.duration, dt);
      if (c == 0) traj.times = rollout.times;
      traj.values[static_cast<std::size_t>(c)] = rollout.positions;
    }
    task.dataset.demonstrations.push_back(
        make_demonstration(scenes[i], std::move(traj)));
  }
  return task;
}

namespace {

void append_face_grid(std::vector<Vec3>& positions, std::vector<Vec3>& normals,
                      std::vector<std::size_t>* face_out, const Vec3& center,
                      const Vec3& dims, int axis, int sign, double spacing) {
  const int u_axis = (axis + 1) % 3;
  const int v_axis = (axis + 2) % 3;
  const int nu = std::max(2, static_cast<int>(std::floor(dims[u_axis] / spacing)) + 1);
  const int nv = std::max(2, static_cast<int>(std::floor(dims[v_axis] / spacing)) + 1);
  Vec3 normal = Vec3::Zero();
  normal[axis] = sign;
  for (int iu = 0; iu < nu; ++iu) {
    for (int iv = 0; iv < nv; ++iv) {
      Vec3 p = center;
      p[axis] += 0.5 * sign * dims[axis];
      // Half-step inset keeps edges from producing duplicate positions.
      p[u_axis] += dims[u_axis] * ((iu + 0.5) / nu - 0.5);
      p[v_axis] += dims[v_axis] * ((iv + 0.5) / nv - 0.5);
      if (face_out) face_out->push_back(positions.size());
      positions.push_back(p);
      normals.push_back(normal);
    }
  }
}

void append_box(std::vector<Vec3>& positions, std::vector<Vec3>& normals,
                const Vec3& center, const Vec3& dims, double spacing,
                int contact_axis, int contact_sign,
                std::vector<std::size_t>& contact_face) {
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      const bool is_contact = axis == contact_axis && sign == contact_sign;
      append_face_grid(positions, normals, is_contact ? &contact_face : nullptr,
                       center, dims, axis, sign, spacing);
    }
  }
}

void append_cylinder(std::vector<Vec3>& positions, std::vector<Vec3>& normals,
                     const Vec3& center, double radius, double height,
                     double spacing, int contact_sign,
                     std::vector<std::size_t>& contact_face) {
  const int n_theta =
      std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / spacing)));
  const int n_z = std::max(2, static_cast<int>(std::floor(height / spacing)) + 1);
  for (int iz = 0; iz < n_z; ++iz) {
    const double z = center.z() + height * ((iz + 0.5) / n_z - 0.5);
    for (int it = 0; it < n_theta; ++it) {
      const double theta = 2.0 * std::numbers::pi * it / n_theta;
      const Vec3 dir(std::cos(theta), std::sin(theta), 0.0);
      positions.push_back(Vec3(center.x(), center.y(), z) + radius * dir);
      normals.push_back(dir);
    }
  }
  for (int sign : {-1, 1}) {
    const bool is_contact = sign == contact_sign;
    const int n_r = std::max(2, static_cast<int>(std::floor(radius / spacing)) + 1);
    for (int ir = 0; ir < n_r; ++ir) {
      const double r = radius * (ir + 0.5) / n_r;
      const int n_t = std::max(6, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / spacing)));
      for (int it = 0; it < n_t; ++it) {
        const double theta = 2.0 * std::numbers::pi * it / n_t;
        Vec3 p(center.x() + r * std::cos(theta), center.y() + r * std::sin(theta),
               center.z() + 0.5 * sign * height);
        if (is_contact) contact_face.push_back(positions.size());
        positions.push_back(p);
        normals.push_back(Vec3(0.0, 0.0, sign));
      }
    }
  }
}

PointSet finish_object(const std::string& id, std::vector<Vec3> positions,
                       const std::vector<Vec3>& normals, int n_frames) {
  PointSet object;
  object.object_id = id;
  // Curvature and spectral descriptors come from the estimator; the
  // analytic face normals are kept since their outward orientation is
  // what the interaction test relies on.
  auto estimated = estimate_local_descriptors(positions, 10);
  object.points.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    object.points[i] = estimated[i];
    object.points[i].position = positions[i];
    object.points[i].normal = normals[i];
    object.points[i].valid = true;
  }
  for (int f = 0; f < n_frames; ++f) {
    object.pose_sequence.push_back(RigidTransform::identity());
    object.pose_times.push_back(static_cast<double>(f));
  }
  return object;
}

}  // namespace

ContactScene generate_contact_scene(const ContactSceneConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "contact-scene"));
  ContactScene scene;

  Vec3 dims_a(rng.uniform(cfg.dim_min, cfg.dim_max), rng.uniform(cfg.dim_min, cfg.dim_max),
              rng.uniform(cfg.dim_min, cfg.dim_max));
  const Vec3 center_a = Vec3::Zero();

  std::vector<Vec3> pos_a, nrm_a;
  append_box(pos_a, nrm_a, center_a, dims_a, cfg.spacing, 2, +1, scene.true_face_a);
  scene.object_a = finish_object("object_a", std::move(pos_a), nrm_a, cfg.n_frames);

  const bool cylinder = cfg.allow_cylinders && rng.bernoulli(0.5);
  std::vector<Vec3> pos_b, nrm_b;
  if (cylinder) {
    const double radius = 0.5 * rng.uniform(cfg.dim_min, cfg.dim_max);
    const double height = rng.uniform(cfg.dim_min, cfg.dim_max);
    const Vec3 center_b(rng.uniform(-0.2, 0.2) * dims_a.x(),
                        rng.uniform(-0.2, 0.2) * dims_a.y(),
                        0.5 * dims_a.z() + cfg.gap + 0.5 * height);
    append_cylinder(pos_b, nrm_b, center_b, radius, height, cfg.spacing, -1,
                    scene.true_face_b);
  } else {
    Vec3 dims_b(rng.uniform(cfg.dim_min, cfg.dim_max), rng.uniform(cfg.dim_min, cfg.dim_max),
                rng.uniform(cfg.dim_min, cfg.dim_max));
    const Vec3 center_b(rng.uniform(-0.2, 0.2) * dims_a.x(),
                        rng.uniform(-0.2, 0.2) * dims_a.y(),
                        0.5 * dims_a.z() + cfg.gap + 0.5 * dims_b.z());
    append_box(pos_b, nrm_b, center_b, dims_b, cfg.spacing, 2, -1, scene.true_face_b);
  }
  scene.object_b = finish_object("object_b", std::move(pos_b), nrm_b, cfg.n_frames);
  return scene;
}

double index_iou(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::set<std::size_t> sa(a.begin(), a.end());
  const std::set<std::size_t> sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (std::size_t x : sa) inter += sb.count(x);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace relfeat
