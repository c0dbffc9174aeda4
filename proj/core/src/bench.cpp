#include "relfeat/bench.hpp"

#include <algorithm>
#include <cmath>

namespace relfeat {

const char* condition_name(PriorCondition c) {
  switch (c) {
    case PriorCondition::Uniform: return "uniform";
    case PriorCondition::Meta: return "meta";
    case PriorCondition::AllFeatures: return "all_features";
    case PriorCondition::Oracle: return "oracle";
  }
  return "uniform";
}

PriorCondition condition_from_name(const std::string& name) {
  if (name == "uniform") return PriorCondition::Uniform;
  if (name == "meta") return PriorCondition::Meta;
  if (name == "all_features" || name == "all") return PriorCondition::AllFeatures;
  if (name == "oracle") return PriorCondition::Oracle;
  fail(ErrorCode::Config, "unknown prior condition: " + name);
}

SelectionMetrics selection_metrics(const std::vector<bool>& selected,
                                   const std::vector<bool>& truth) {
  if (selected.size() != truth.size())
    fail(ErrorCode::Dimension, "selection and truth vectors differ in length");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (selected[j] && truth[j]) ++tp;
    else if (selected[j] && !truth[j]) ++fp;
    else if (!selected[j] && truth[j]) ++fn;
    else ++tn;
  }
  SelectionMetrics m;
  m.accuracy = truth.empty() ? 1.0
                             : static_cast<double>(tp + tn) /
                                   static_cast<double>(truth.size());
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                              : (tp + fn == 0 ? 1.0 : 0.0);
  m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  return m;
}

namespace {

struct Split {
  std::vector<std::size_t> train;
  std::size_t test = 0;
  bool leak = false;
};

Dataset subset_dataset(const Dataset& src, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.task_name = src.task_name;
  out.exclude_group = src.exclude_group;
  out.ground_truth_relevance = src.ground_truth_relevance;
  for (std::size_t i : indices) out.demonstrations.push_back(src.demonstrations[i]);
  return out;
}

const RelevanceLabels& labels_of(const Dataset& dataset) {
  if (!dataset.ground_truth_relevance)
    fail(ErrorCode::Data, "benchmark tasks need ground-truth relevance");
  return *dataset.ground_truth_relevance;
}

std::array<RelevancePrior, kNumComponents> build_meta_priors(
    const MetaPrior& meta, const Dataset& train_set) {
  std::array<RelevancePrior, kNumComponents> priors;
  for (int c = 0; c < kNumComponents; ++c) {
    std::vector<MatrixXd> per_demo;
    for (const auto& demo : train_set.demonstrations)
      per_demo.push_back(compute_meta_feature_rows(demo.scene, Vec3::Unit(c)));
    priors[static_cast<std::size_t>(c)] = compute_prior(meta, per_demo);
  }
  return priors;
}

double stat_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stat_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = stat_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<TrialRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<PriorCondition> conditions;
  for (const TrialRow& r : rows)
    if (std::find(conditions.begin(), conditions.end(), r.condition) == conditions.end())
      conditions.push_back(r.condition);

  for (PriorCondition cond : conditions) {
    for (int component = -1; component < kNumComponents; ++component) {
      std::vector<double> acc, prec, rec, err;
      for (const TrialRow& r : rows) {
        if (r.condition != cond) continue;
        if (component >= 0 && r.component != component) continue;
        if (!std::isnan(r.accuracy)) acc.push_back(r.accuracy);
        if (!std::isnan(r.precision)) prec.push_back(r.precision);
        if (!std::isnan(r.recall)) rec.push_back(r.recall);
        if (!std::isnan(r.rmse)) err.push_back(r.rmse);
      }
      AggregateRow a;
      a.condition = cond;
      a.component = component;
      a.count = static_cast<int>(std::max({acc.size(), err.size()}));
      if (a.count == 0) continue;
      a.accuracy_mean = stat_mean(acc);
      a.accuracy_std = stat_std(acc);
      a.precision_mean = stat_mean(prec);
      a.precision_std = stat_std(prec);
      a.recall_mean = stat_mean(rec);
      a.recall_std = stat_std(rec);
      double sq = 0.0;
      for (double e : err) sq += e * e;
      a.rmse = err.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(err.size()));
      a.rmse_std = stat_std(err);
      out.push_back(a);
    }
  }
  return out;
}

MetricsReport run_prior_benchmark(const std::vector<Dataset>& tasks,
                                  const TrialConfig& cfg) {
  cfg.validate();
  if (tasks.empty()) fail(ErrorCode::Data, "no benchmark tasks");

  std::vector<LabeledSkill> skills;
  for (const Dataset& t : tasks) skills.push_back(labeled_skill_from_dataset(t));

  MetricsReport report;
  report.benchmark = "priors";

  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const Dataset& task = tasks[ti];
    const RelevanceLabels& truth = labels_of(task);
    const std::vector<std::string> excluded = {skills[ti].exclude_group};
    const int m = static_cast<int>(truth[0].size());

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t trial_seed =
          derive_seed(cfg.seed, "prior-bench", ti * 10007 + static_cast<std::size_t>(rep));
      Rng rng(trial_seed);
      if (task.size() < static_cast<std::size_t>(cfg.n_train))
        fail(ErrorCode::Data, "task has fewer demos than n_train");
      const auto train_idx =
          rng.sample_without_replacement(task.size(), static_cast<std::size_t>(cfg.n_train));
      const Dataset train_set = subset_dataset(task, train_idx);

      const MatrixXd features = dataset_features(train_set);
      const DatasetTargets targets =
          extract_dataset_targets(train_set, cfg.dmp, cfg.resample_samples);

      const MetaTrainingSet ts = build_training_set(
          skills, excluded, derive_seed(trial_seed, "meta-subsample"));
      const MetaPrior meta = train_irls(ts, cfg.irls_l2);
      const auto meta_priors = build_meta_priors(meta, train_set);
      const RelevancePrior uni = uniform_prior(skills, excluded, m);

      for (int c = 0; c < kNumComponents; ++c) {
        const NormalizedData norm = normalize_dataset(features, targets.targets[c]);
        const std::vector<bool>& truth_c = truth[static_cast<std::size_t>(c)];

        for (PriorCondition cond : cfg.conditions) {
          std::vector<bool> selected;
          switch (cond) {
            case PriorCondition::Uniform:
            case PriorCondition::Meta: {
              const RelevancePrior& prior =
                  cond == PriorCondition::Meta ? meta_priors[static_cast<std::size_t>(c)] : uni;
              const GibbsResult gibbs = run_gibbs(
                  norm.features, norm.targets, prior, cfg.hyper,
                  derive_seed(trial_seed, condition_name(cond), static_cast<std::uint64_t>(c)));
              selected = map_relevance(gibbs.chain);
              break;
            }
            case PriorCondition::AllFeatures:
              selected.assign(truth_c.size(), true);
              break;
            case PriorCondition::Oracle:
              selected = truth_c;
              break;
          }
          const SelectionMetrics sm = selection_metrics(selected, truth_c);
          TrialRow row;
          row.task = task.task_name;
          row.repetition = rep;
          row.component = c;
          row.condition = cond;
          row.accuracy = sm.accuracy;
          row.precision = sm.precision;
          row.recall = sm.recall;
          report.rows.push_back(row);
        }
      }
    }
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

MetricsReport run_goal_benchmark(const std::vector<Dataset>& tasks,
                                 const TrialConfig& cfg) {
  cfg.validate();
  if (tasks.empty()) fail(ErrorCode::Data, "no benchmark tasks");

  std::vector<LabeledSkill> skills;
  for (const Dataset& t : tasks) skills.push_back(labeled_skill_from_dataset(t));

  MetricsReport report;
  report.benchmark = "goals";

  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const Dataset& task = tasks[ti];
    const RelevanceLabels& truth = labels_of(task);
    const std::vector<std::string> excluded = {skills[ti].exclude_group};

    if (task.size() < static_cast<std::size_t>(cfg.n_train) + 1)
      fail(ErrorCode::Data, "goal benchmark needs n_train + 1 demos per task");

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t trial_seed =
          derive_seed(cfg.seed, "goal-bench", ti * 10007 + static_cast<std::size_t>(rep));
      Rng rng(trial_seed);

      Split split;
      split.test = rng.uniform_index(task.size());
      if (cfg.leak_check) {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < task.size(); ++i)
          if (i != split.test) pool.push_back(i);
        Rng shuffler(derive_seed(trial_seed, "train-pick"));
        for (std::size_t i : shuffler.sample_without_replacement(
                 pool.size(), static_cast<std::size_t>(cfg.n_train)))
          split.train.push_back(pool[i]);
      } else {
        // Deliberately include the held-out demo; rows carry the leak flag.
        split.train.push_back(split.test);
        Rng shuffler(derive_seed(trial_seed, "train-pick"));
        for (std::size_t i : shuffler.sample_without_replacement(
                 task.size(), static_cast<std::size_t>(cfg.n_train) - 1))
          split.train.push_back(i);
        split.leak = true;
      }

      const Dataset train_set = subset_dataset(task, split.train);
      const Demonstration& test_demo = task.demonstrations[split.test];

      const MetaTrainingSet ts = build_training_set(
          skills, excluded, derive_seed(trial_seed, "meta-subsample"));
      const MetaPrior meta = train_irls(ts, cfg.irls_l2);
      const auto meta_priors = build_meta_priors(meta, train_set);
      const RelevancePrior uni =
          uniform_prior(skills, excluded, static_cast<int>(truth[0].size()));

      for (PriorCondition cond : cfg.conditions) {
        SkillModel model;
        switch (cond) {
          case PriorCondition::Uniform:
          case PriorCondition::Meta: {
            std::array<RelevancePrior, kNumComponents> priors;
            for (int c = 0; c < kNumComponents; ++c)
              priors[static_cast<std::size_t>(c)] =
                  cond == PriorCondition::Meta ? meta_priors[static_cast<std::size_t>(c)] : uni;
            model = learn_skill_with_priors(
                train_set, priors, cfg.hyper, cfg.dmp,
                derive_seed(trial_seed, condition_name(cond)), cfg.resample_samples);
            break;
          }
          case PriorCondition::AllFeatures: {
            std::array<std::vector<bool>, kNumComponents> masks;
            for (auto& mask : masks) mask.assign(truth[0].size(), true);
            model = learn_skill_with_masks(train_set, masks, cfg.dmp, cfg.resample_samples);
            break;
          }
          case PriorCondition::Oracle: {
            model = learn_skill_with_masks(train_set, truth, cfg.dmp, cfg.resample_samples);
            break;
          }
        }

        const Vec3 predicted = model.predict_goal_vector(test_demo.scene);
        for (int c = 0; c < kNumComponents; ++c) {
          const double actual =
              test_demo.trajectory.values[static_cast<std::size_t>(c)].back();
          TrialRow row;
          row.task = task.task_name;
          row.repetition = rep;
          row.component = c;
          row.condition = cond;
          row.rmse = std::abs(predicted[c] - actual);
          row.leak = split.leak;
          report.rows.push_back(row);
        }
      }
    }
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

}  // namespace relfeat
