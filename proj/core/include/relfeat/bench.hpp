#pragma once

#include <string>
#include <vector>

#include "relfeat/metaprior.hpp"
#include "relfeat/skill.hpp"

namespace relfeat {

enum class PriorCondition { Uniform, Meta, AllFeatures, Oracle };

const char* condition_name(PriorCondition c);
PriorCondition condition_from_name(const std::string& name);

struct TrialConfig {
  int n_train = 5;
  int repetitions = 10;
  std::vector<PriorCondition> conditions = {
      PriorCondition::Uniform, PriorCondition::Meta, PriorCondition::AllFeatures,
      PriorCondition::Oracle};
  std::uint64_t seed = 0;
  SsvsHyper hyper;
  DmpConfig dmp;
  int resample_samples = 200;
  double irls_l2 = 1e-3;
  // Disabling the leak check lets the test demo appear in the training
  // set; rows produced that way carry the leak flag.
  bool leak_check = true;

  void validate() const {
    if (n_train < 2) fail(ErrorCode::Config, "n_train must be at least 2");
    if (repetitions < 1) fail(ErrorCode::Config, "repetitions must be at least 1");
    hyper.validate();
  }
};

struct SelectionMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Confusion-matrix rates with the sparse-truth conventions: no predicted
/// positives scores precision 1 only when there are no true positives;
/// no true positives scores recall 1.
SelectionMetrics selection_metrics(const std::vector<bool>& selected,
                                   const std::vector<bool>& truth);

struct TrialRow {
  std::string task;
  int repetition = 0;
  int component = 0;
  PriorCondition condition = PriorCondition::Uniform;
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double precision = std::numeric_limits<double>::quiet_NaN();
  double recall = std::numeric_limits<double>::quiet_NaN();
  double rmse = std::numeric_limits<double>::quiet_NaN();
  bool leak = false;
};

struct AggregateRow {
  PriorCondition condition;
  int component = -1;  // -1 pools the three components
  int count = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;
  // Root mean square of the per-row errors, and the spread of their
  // absolute values.
  double rmse = 0.0, rmse_std = 0.0;
};

struct MetricsReport {
  std::string benchmark;  // "priors" or "goals"
  std::vector<TrialRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Recompute the aggregate block from the rows (also used to verify that
/// stored aggregates never drift from the per-trial data).
std::vector<AggregateRow> aggregate_rows(const std::vector<TrialRow>& rows);

/// Feature-selection benchmark: leave-current-task-out meta prior, both
/// priors run through the sampler on n_train demos, MAP selection scored
/// against ground truth.
MetricsReport run_prior_benchmark(const std::vector<Dataset>& tasks,
                                  const TrialConfig& cfg);

/// Goal-prediction benchmark: per repetition one held-out demo, n_train
/// training demos, all four conditions, absolute goal errors per component.
MetricsReport run_goal_benchmark(const std::vector<Dataset>& tasks,
                                 const TrialConfig& cfg);

}  // namespace relfeat
