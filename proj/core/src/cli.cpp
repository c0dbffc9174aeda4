#include "relfeat/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relfeat/io.hpp"
#include "relfeat/rng.hpp"

namespace relfeat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::Config, "config root must be an object");
  return doc;
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      fail(ErrorCode::Config, "unknown config key '" + it.key() + "' in " + where);
  }
}

GeneratorConfig generator_from_json(const json& j) {
  reject_unknown_keys(
      j,
      {"task_name", "n_parts", "n_demos", "center_min", "center_max", "extent_min",
       "extent_max", "center_jitter", "extent_jitter", "hand_goal_radius",
       "true_sparsity", "theta_star", "weight_std", "noise_std", "duration", "samples",
       "basis_count"},
      "generator");
  GeneratorConfig cfg;
  cfg.task_name = j.value("task_name", cfg.task_name);
  cfg.n_parts = j.value("n_parts", cfg.n_parts);
  cfg.n_demos = j.value("n_demos", cfg.n_demos);
  if (j.contains("center_min"))
    cfg.center_min = Vec3(j["center_min"][0], j["center_min"][1], j["center_min"][2]);
  if (j.contains("center_max"))
    cfg.center_max = Vec3(j["center_max"][0], j["center_max"][1], j["center_max"][2]);
  cfg.extent_min = j.value("extent_min", cfg.extent_min);
  cfg.extent_max = j.value("extent_max", cfg.extent_max);
  cfg.center_jitter = j.value("center_jitter", cfg.center_jitter);
  cfg.extent_jitter = j.value("extent_jitter", cfg.extent_jitter);
  cfg.hand_goal_radius = j.value("hand_goal_radius", cfg.hand_goal_radius);
  cfg.true_sparsity = j.value("true_sparsity", cfg.true_sparsity);
  if (j.contains("theta_star")) {
    const json& theta = j["theta_star"];
    if (theta.size() != kMetaFeatureCount)
      fail(ErrorCode::Config, "theta_star must have 8 entries");
    for (int h = 0; h < kMetaFeatureCount; ++h) cfg.theta_star[h] = theta[h].get<double>();
  }
  cfg.weight_std = j.value("weight_std", cfg.weight_std);
  cfg.noise_std = j.value("noise_std", cfg.noise_std);
  cfg.duration = j.value("duration", cfg.duration);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.basis_count = j.value("basis_count", cfg.basis_count);
  return cfg;
}

SsvsHyper hyper_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"spike_var", "slab_var", "ig_shape", "ig_scale", "burn_in",
                       "samples", "printed_sigma_update"},
                      "hyper");
  SsvsHyper hyper;
  hyper.spike_var = j.value("spike_var", hyper.spike_var);
  hyper.slab_var = j.value("slab_var", hyper.slab_var);
  hyper.ig_shape = j.value("ig_shape", hyper.ig_shape);
  hyper.ig_scale = j.value("ig_scale", hyper.ig_scale);
  hyper.burn_in = j.value("burn_in", hyper.burn_in);
  hyper.samples = j.value("samples", hyper.samples);
  hyper.printed_sigma_update = j.value("printed_sigma_update", hyper.printed_sigma_update);
  return hyper;
}

DmpConfig dmp_from_json(const json& j) {
  reject_unknown_keys(j, {"alpha_z", "beta_z", "tau", "basis_count", "x_cutoff"}, "dmp");
  DmpConfig cfg;
  cfg.alpha_z = j.value("alpha_z", cfg.alpha_z);
  cfg.beta_z = j.value("beta_z", cfg.beta_z);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.basis_count = j.value("basis_count", cfg.basis_count);
  cfg.x_cutoff = j.value("x_cutoff", cfg.x_cutoff);
  return cfg;
}

/// Datasets for a benchmark suite: explicit file paths, or generated
/// tasks cycling through the configured part counts.
std::vector<Dataset> build_suite(const json& suite, std::uint64_t seed) {
  std::vector<Dataset> tasks;
  if (suite.contains("datasets")) {
    for (const json& p : suite["datasets"]) tasks.push_back(load_dataset(p.get<std::string>()));
    return tasks;
  }
  const int count = suite.value("task_count", 6);
  std::vector<int> part_counts = {3, 4, 5};
  if (suite.contains("part_counts"))
    part_counts = suite["part_counts"].get<std::vector<int>>();
  GeneratorConfig base = generator_from_json(suite.value("generator", json::object()));
  for (int k = 0; k < count; ++k) {
    GeneratorConfig cfg = base;
    cfg.task_name = "task_" + std::to_string(k);
    cfg.n_parts = part_counts[static_cast<std::size_t>(k) % part_counts.size()];
    cfg.seed = derive_seed(seed, "suite-task", static_cast<std::uint64_t>(k));
    tasks.push_back(generate_task(cfg).dataset);
  }
  return tasks;
}

TrialConfig trial_from_json(const json& suite, std::uint64_t seed) {
  reject_unknown_keys(suite,
                      {"datasets", "task_count", "part_counts", "generator", "n_train",
                       "repetitions", "conditions", "hyper", "dmp", "resample_samples",
                       "irls_l2", "leak_check"},
                      "suite");
  TrialConfig cfg;
  cfg.seed = seed;
  cfg.n_train = suite.value("n_train", cfg.n_train);
  cfg.repetitions = suite.value("repetitions", cfg.repetitions);
  if (suite.contains("conditions")) {
    cfg.conditions.clear();
    for (const json& c : suite["conditions"])
      cfg.conditions.push_back(condition_from_name(c.get<std::string>()));
  }
  cfg.hyper = hyper_from_json(suite.value("hyper", json::object()));
  cfg.dmp = dmp_from_json(suite.value("dmp", json::object()));
  cfg.resample_samples = suite.value("resample_samples", cfg.resample_samples);
  cfg.irls_l2 = suite.value("irls_l2", cfg.irls_l2);
  cfg.leak_check = suite.value("leak_check", cfg.leak_check);
  return cfg;
}

Provenance make_provenance(std::uint64_t seed, const json& effective) {
  return Provenance{seed, config_fingerprint(effective.dump())};
}

std::array<RelevancePrior, kNumComponents> priors_for_selection(
    const std::string& prior_kind, const Dataset& dataset, const std::string& prior_file,
    double uniform_p, int m) {
  std::array<RelevancePrior, kNumComponents> priors;
  if (prior_kind == "uniform") {
    for (auto& p : priors) p = RelevancePrior::uniform(m, uniform_p);
  } else if (prior_kind == "meta") {
    if (prior_file.empty())
      fail(ErrorCode::Config, "meta prior requires --prior-file");
    const MetaPrior meta = load_meta_prior(prior_file);
    for (int c = 0; c < kNumComponents; ++c) {
      std::vector<MatrixXd> per_demo;
      for (const auto& demo : dataset.demonstrations)
        per_demo.push_back(compute_meta_feature_rows(demo.scene, Vec3::Unit(c)));
      priors[static_cast<std::size_t>(c)] = compute_prior(meta, per_demo);
    }
  } else {
    fail(ErrorCode::Config, "selection priors must be 'uniform' or 'meta'");
  }
  return priors;
}

struct CommonArgs {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
};

int run_gen(const CommonArgs& common, int count, bool clouds, int scene_count) {
  const json config = load_config_file(common.config_path);
  fs::create_directories(common.out);

  if (clouds) {
    reject_unknown_keys(config,
                        {"dim_min", "dim_max", "spacing", "gap", "n_frames",
                         "allow_cylinders"},
                        "contact scenes");
    ContactSceneConfig base;
    base.dim_min = config.value("dim_min", base.dim_min);
    base.dim_max = config.value("dim_max", base.dim_max);
    base.spacing = config.value("spacing", base.spacing);
    base.gap = config.value("gap", base.gap);
    base.n_frames = config.value("n_frames", base.n_frames);
    base.allow_cylinders = config.value("allow_cylinders", base.allow_cylinders);
    json effective = config;
    effective["command"] = "gen-clouds";
    const Provenance prov = make_provenance(common.seed, effective);
    for (int k = 0; k < scene_count; ++k) {
      ContactSceneConfig cfg = base;
      cfg.seed = derive_seed(common.seed, "contact-scene", static_cast<std::uint64_t>(k));
      const ContactScene scene = generate_contact_scene(cfg);
      const std::string stem = "scene_" + std::to_string(k);
      save_pointset(fs::path(common.out) / (stem + "_a.json"), scene.object_a, prov);
      save_pointset(fs::path(common.out) / (stem + "_b.json"), scene.object_b, prov);
      save_contact_truth(fs::path(common.out) / (stem + ".truth.json"), scene, prov);
    }
    return 0;
  }

  GeneratorConfig base = generator_from_json(config);
  json effective = config;
  effective["command"] = "gen";
  const Provenance prov = make_provenance(common.seed, effective);
  for (int k = 0; k < count; ++k) {
    GeneratorConfig cfg = base;
    if (count > 1) cfg.task_name = base.task_name + "_" + std::to_string(k);
    cfg.seed = derive_seed(common.seed, "gen-task", static_cast<std::uint64_t>(k));
    const SyntheticTask task = generate_task(cfg);
    const std::string stem = cfg.task_name;
    save_dataset(fs::path(common.out) / (stem + ".json"), task.dataset, prov);
    GroundTruthSidecar gt;
    gt.task_name = cfg.task_name;
    gt.relevance = *task.dataset.ground_truth_relevance;
    gt.true_weights = task.true_weights;
    gt.theta_star = task.theta_star;
    gt.noise_std = task.noise_std;
    gt.goal_part = task.goal_part;
    save_ground_truth(fs::path(common.out) / (stem + ".truth.json"), gt, prov);
  }
  return 0;
}

int run_segment(const CommonArgs& common, const std::vector<std::string>& inputs) {
  const json config = load_config_file(common.config_path);
  reject_unknown_keys(config, {"interaction", "segmentation", "kernel"}, "segment");

  InteractionConfig icfg;
  if (config.contains("interaction")) {
    const json& j = config["interaction"];
    reject_unknown_keys(
        j, {"distance_threshold", "normal_dot_threshold", "frame_subsample_hz"},
        "interaction");
    icfg.distance_threshold = j.value("distance_threshold", icfg.distance_threshold);
    icfg.normal_dot_threshold = j.value("normal_dot_threshold", icfg.normal_dot_threshold);
    icfg.frame_subsample_hz = j.value("frame_subsample_hz", icfg.frame_subsample_hz);
  }
  SegmentationConfig scfg;
  if (config.contains("segmentation")) {
    const json& j = config["segmentation"];
    reject_unknown_keys(
        j, {"pairwise_coefficient", "gmm_components", "knn", "max_iterations"},
        "segmentation");
    scfg.pairwise_coefficient = j.value("pairwise_coefficient", scfg.pairwise_coefficient);
    scfg.gmm_components = j.value("gmm_components", scfg.gmm_components);
    scfg.knn = j.value("knn", scfg.knn);
    scfg.max_iterations = j.value("max_iterations", scfg.max_iterations);
  }
  KernelConfig kcfg;
  if (config.contains("kernel")) {
    const json& j = config["kernel"];
    reject_unknown_keys(j, {"position_cov", "normal_cov"}, "kernel");
    kcfg.position_cov = j.value("position_cov", kcfg.position_cov);
    kcfg.normal_cov = j.value("normal_cov", kcfg.normal_cov);
  }

  std::vector<PointSet> objects;
  std::vector<std::string> ids;
  for (const std::string& path : inputs) {
    objects.push_back(load_pointset(path));
    ids.push_back(objects.back().object_id);
  }
  if (objects.size() < 2) fail(ErrorCode::Config, "segment needs at least two objects");

  const auto parts = extract_parts(objects, icfg, scfg, kcfg, common.seed);
  json effective = config;
  effective["command"] = "segment";
  save_parts(common.out, parts, ids, make_provenance(common.seed, effective));
  return 0;
}

int run_select_like(const CommonArgs& common, const std::string& dataset_path,
                    const std::string& prior_kind, const std::string& prior_file,
                    double uniform_p, const json& config, bool emit_skill) {
  reject_unknown_keys(config, {"hyper", "dmp", "resample_samples"}, "select");
  const SsvsHyper hyper = hyper_from_json(config.value("hyper", json::object()));
  const DmpConfig dmp = dmp_from_json(config.value("dmp", json::object()));
  const int resample = config.value("resample_samples", 200);

  const Dataset dataset = load_dataset(dataset_path);
  const MatrixXd features = dataset_features(dataset);
  const int m = static_cast<int>(features.rows());

  json effective = config;
  effective["command"] = emit_skill ? "learn" : "select";
  effective["prior"] = prior_kind;
  effective["uniform_p"] = uniform_p;
  const Provenance prov = make_provenance(common.seed, effective);

  SkillModel model;
  if (prior_kind == "oracle" || prior_kind == "all") {
    std::array<std::vector<bool>, kNumComponents> masks;
    if (prior_kind == "oracle") {
      if (!dataset.ground_truth_relevance)
        fail(ErrorCode::Data, "oracle selection needs ground-truth labels");
      masks = *dataset.ground_truth_relevance;
    } else {
      for (auto& mask : masks) mask.assign(static_cast<std::size_t>(m), true);
    }
    model = learn_skill_with_masks(dataset, masks, dmp, resample);
  } else {
    const auto priors =
        priors_for_selection(prior_kind, dataset, prior_file, uniform_p, m);
    model = learn_skill_with_priors(dataset, priors, hyper, dmp, common.seed, resample);
    if (!emit_skill) {
      SelectionResult sel;
      sel.feature_names = model.feature_names;
      for (int c = 0; c < kNumComponents; ++c) {
        sel.marginal_p1[c] = model.components[static_cast<std::size_t>(c)].marginal_p1;
        sel.selected[c] = model.components[static_cast<std::size_t>(c)].selected;
        sel.prior_p1[c] = priors[static_cast<std::size_t>(c)].p1;
      }
      save_selection(common.out, sel, prov);
      return 0;
    }
  }
  if (!emit_skill) {
    SelectionResult sel;
    sel.feature_names = model.feature_names;
    for (int c = 0; c < kNumComponents; ++c) {
      sel.marginal_p1[c] = VectorXd::Zero(m);
      sel.selected[c] = model.components[static_cast<std::size_t>(c)].selected;
      sel.prior_p1[c] = VectorXd::Zero(m);
    }
    save_selection(common.out, sel, prov);
    return 0;
  }
  save_skill_model(common.out, model, prov);
  return 0;
}

int run_bench(const CommonArgs& common, bool priors_benchmark) {
  const json suite = load_config_file(common.config_path);
  const TrialConfig cfg = trial_from_json(suite, common.seed);
  const std::vector<Dataset> tasks = build_suite(suite, common.seed);

  const MetricsReport report = priors_benchmark ? run_prior_benchmark(tasks, cfg)
                                                : run_goal_benchmark(tasks, cfg);
  json effective = suite;
  effective["command"] = priors_benchmark ? "bench-priors" : "bench-goals";
  const Provenance prov = make_provenance(common.seed, effective);
  fs::create_directories(common.out);
  save_metrics_report(fs::path(common.out) / "report.json", report, prov);
  save_metrics_csv(fs::path(common.out) / "trials.csv", report);
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Feature-relevance skill learning toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  int gen_count = 1;
  bool gen_clouds = false;
  int gen_scenes = 1;
  std::vector<std::string> inputs;
  std::string dataset_path, prior_kind = "uniform", prior_file;
  double uniform_p = 0.1;
  std::vector<std::string> meta_datasets, meta_exclude;
  double irls_l2 = 1e-3;
  std::string skill_path;
  int demo_index = 0;
  bool with_trajectory = false;
  int burn_in = -1, samples = -1;

  auto add_common = [&](CLI::App* cmd, bool needs_seed, bool needs_out = true) {
    auto* seed_opt = cmd->add_option("--seed", common.seed, "master random seed");
    if (needs_seed) seed_opt->required();
    if (needs_out) cmd->add_option("--out", common.out, "output path")->required();
    cmd->add_option("--config", common.config_path, "JSON config file");
  };

  auto* gen = app.add_subcommand("gen", "generate synthetic tasks or contact scenes");
  add_common(gen, true);
  gen->add_option("--count", gen_count, "number of tasks");
  gen->add_flag("--clouds", gen_clouds, "emit contact point-cloud scenes instead");
  gen->add_option("--scenes", gen_scenes, "number of contact scenes");

  auto* segment = app.add_subcommand("segment", "run the part segmentation pipeline");
  add_common(segment, true);
  segment->add_option("--inputs", inputs, "point-set JSON files")->required();

  auto* features = app.add_subcommand("features", "extract features and meta features");
  add_common(features, false);
  features->add_option("--dataset", dataset_path, "dataset JSON")->required();

  auto* train_meta = app.add_subcommand("train-meta", "train the meta prior");
  add_common(train_meta, true);
  train_meta->add_option("--datasets", meta_datasets, "labeled dataset files")->required();
  train_meta->add_option("--exclude", meta_exclude, "exclude groups");
  train_meta->add_option("--l2", irls_l2, "IRLS L2 penalty");

  auto* select = app.add_subcommand("select", "run feature selection");
  add_common(select, true);
  select->add_option("--dataset", dataset_path, "dataset JSON")->required();
  select->add_option("--prior", prior_kind, "uniform|meta|oracle|all");
  select->add_option("--prior-file", prior_file, "meta prior JSON");
  select->add_option("--uniform-p", uniform_p, "uniform prior probability");
  select->add_option("--burn-in", burn_in, "burn-in sweeps");
  select->add_option("--samples", samples, "post-burn-in sweeps");

  auto* learn = app.add_subcommand("learn", "select features and fit a skill model");
  add_common(learn, true);
  learn->add_option("--dataset", dataset_path, "dataset JSON")->required();
  learn->add_option("--prior", prior_kind, "uniform|meta|oracle|all");
  learn->add_option("--prior-file", prior_file, "meta prior JSON");
  learn->add_option("--uniform-p", uniform_p, "uniform prior probability");
  learn->add_option("--burn-in", burn_in, "burn-in sweeps");
  learn->add_option("--samples", samples, "post-burn-in sweeps");

  auto* predict = app.add_subcommand("predict", "predict the goal for a scene");
  add_common(predict, false);
  predict->add_option("--skill", skill_path, "skill model JSON")->required();
  predict->add_option("--dataset", dataset_path, "dataset JSON")->required();
  predict->add_option("--demo-index", demo_index, "scene index within the dataset");
  predict->add_flag("--trajectory", with_trajectory, "include the trajectory rollout");

  auto* bench_priors = app.add_subcommand("bench-priors", "prior-comparison benchmark");
  add_common(bench_priors, true);
  auto* bench_goals = app.add_subcommand("bench-goals", "goal-prediction benchmark");
  add_common(bench_goals, true);

  std::vector<const char*> argv;
  argv.push_back("relfeat");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(common, gen_count, gen_clouds, gen_scenes);
    if (segment->parsed()) return run_segment(common, inputs);
    if (features->parsed()) {
      const Dataset dataset = load_dataset(dataset_path);
      json effective{{"command", "features"}};
      save_features(common.out, dataset, make_provenance(common.seed, effective));
      return 0;
    }
    if (train_meta->parsed()) {
      std::vector<LabeledSkill> skills;
      for (const std::string& p : meta_datasets)
        skills.push_back(labeled_skill_from_dataset(load_dataset(p)));
      const MetaTrainingSet ts = build_training_set(skills, meta_exclude, common.seed);
      const MetaPrior prior = train_irls(ts, irls_l2);
      json effective{{"command", "train-meta"}, {"l2", irls_l2},
                     {"exclude", meta_exclude}};
      save_meta_prior(common.out, prior, make_provenance(common.seed, effective));
      return 0;
    }
    if (select->parsed() || learn->parsed()) {
      json config = load_config_file(common.config_path);
      if (burn_in >= 0 || samples >= 0) {
        json hyper = config.value("hyper", json::object());
        if (burn_in >= 0) hyper["burn_in"] = burn_in;
        if (samples >= 0) hyper["samples"] = samples;
        config["hyper"] = hyper;
      }
      return run_select_like(common, dataset_path, prior_kind, prior_file, uniform_p,
                             config, learn->parsed());
    }
    if (predict->parsed()) {
      const SkillModel model = load_skill_model(skill_path);
      const Dataset dataset = load_dataset(dataset_path);
      if (demo_index < 0 || static_cast<std::size_t>(demo_index) >= dataset.size())
        fail(ErrorCode::Config, "demo index out of range");
      const Scene& scene = dataset.demonstrations[static_cast<std::size_t>(demo_index)].scene;
      const Vec3 goal = model.predict_goal_vector(scene);
      json effective{{"command", "predict"}, {"demo_index", demo_index}};
      json doc{{"kind", "prediction"},
               {"task_name", model.task_name},
               {"goal", {goal.x(), goal.y(), goal.z()}},
               {"schema_version", kSchemaVersion},
               {"seed", common.seed},
               {"config_hash", config_fingerprint(effective.dump())}};
      if (with_trajectory) {
        const Trajectory traj = model.predict_trajectory(scene);
        doc["trajectory"] = {{"times", traj.times},
                             {"values", {traj.values[0], traj.values[1], traj.values[2]}}};
      }
      std::ofstream out(common.out);
      if (!out) fail(ErrorCode::Io, "cannot write " + common.out);
      out << doc.dump(2) << "\n";
      return 0;
    }
    if (bench_priors->parsed()) return run_bench(common, true);
    if (bench_goals->parsed()) return run_bench(common, false);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace relfeat
