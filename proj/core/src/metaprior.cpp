#include "relfeat/metaprior.hpp"

#include <algorithm>
#include <cmath>

namespace relfeat {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double penalized_loglik(const MatrixXd& x, const VectorXd& y,
                        const VectorXd& theta, double l2) {
  const VectorXd z = x * theta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // y log p + (1-y) log(1-p) in a stable form.
    const double zi = z[i];
    ll += y[i] * zi - (zi > 0.0 ? zi + std::log1p(std::exp(-zi))
                                : std::log1p(std::exp(zi)));
  }
  double penalty = 0.0;
  for (Eigen::Index h = 0; h + 1 < theta.size(); ++h) penalty += theta[h] * theta[h];
  return ll - 0.5 * l2 * penalty;
}

}  // namespace

LabeledSkill labeled_skill_from_dataset(const Dataset& dataset) {
  if (!dataset.ground_truth_relevance)
    fail(ErrorCode::Data, "dataset carries no relevance labels");
  dataset.validate();

  LabeledSkill skill;
  skill.skill_id = dataset.task_name;
  skill.exclude_group =
      dataset.exclude_group.empty() ? dataset.task_name : dataset.exclude_group;
  skill.labels = *dataset.ground_truth_relevance;

  const std::size_t n = dataset.size();
  for (int c = 0; c < kNumComponents; ++c) {
    const Vec3 dir = Vec3::Unit(c);
    MatrixXd sum;
    for (const auto& demo : dataset.demonstrations) {
      MatrixXd rows = compute_meta_feature_rows(demo.scene, dir);
      if (sum.size() == 0)
        sum = rows;
      else
        sum += rows;
    }
    skill.meta_rows[c] = sum / static_cast<double>(n);
    if (skill.labels[c].size() != static_cast<std::size_t>(skill.meta_rows[c].rows()))
      fail(ErrorCode::Dimension, "label length does not match feature count");
  }
  return skill;
}

MetaTrainingSet build_training_set(const std::vector<LabeledSkill>& prior_skills,
                                   const std::vector<std::string>& exclude_groups,
                                   std::uint64_t seed) {
  std::vector<MetaTrainingRow> positives;
  std::vector<MetaTrainingRow> negatives;
  for (const LabeledSkill& skill : prior_skills) {
    if (std::find(exclude_groups.begin(), exclude_groups.end(), skill.exclude_group) !=
        exclude_groups.end())
      continue;
    for (int c = 0; c < kNumComponents; ++c) {
      for (Eigen::Index j = 0; j < skill.meta_rows[c].rows(); ++j) {
        MetaTrainingRow row;
        row.phi = skill.meta_rows[c].row(j).transpose();
        row.relevant = skill.labels[c][static_cast<std::size_t>(j)];
        row.source_skill = skill.skill_id;
        (row.relevant ? positives : negatives).push_back(std::move(row));
      }
    }
  }
  if (positives.empty())
    fail(ErrorCode::Data, "no positive relevance examples in the prior-skill pool");

  Rng rng(derive_seed(seed, "meta-training-subsample"));
  const std::size_t take_pos =
      std::max<std::size_t>(1, std::min(positives.size(), (positives.size() + 1) / 2));
  const std::size_t take = std::min(take_pos, negatives.size());
  if (take == 0) fail(ErrorCode::Data, "no negative relevance examples to balance with");

  MetaTrainingSet ts;
  for (std::size_t i : rng.sample_without_replacement(positives.size(), take))
    ts.rows.push_back(positives[i]);
  for (std::size_t i : rng.sample_without_replacement(negatives.size(), take))
    ts.rows.push_back(negatives[i]);
  return ts;
}

MetaPrior train_irls(const MetaTrainingSet& ts, double l2, int max_iter) {
  if (ts.rows.empty()) fail(ErrorCode::Data, "empty meta training set");
  const Eigen::Index n = static_cast<Eigen::Index>(ts.rows.size());
  constexpr int h_dim = kMetaFeatureCount;

  MetaPrior prior;
  prior.l2_penalty = l2;
  for (const auto& row : ts.rows) {
    (row.relevant ? prior.positives : prior.negatives)++;
    if (std::find(prior.source_skills.begin(), prior.source_skills.end(),
                  row.source_skill) == prior.source_skills.end())
      prior.source_skills.push_back(row.source_skill);
  }

  MatrixXd raw(n, h_dim);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    raw.row(i) = ts.rows[static_cast<std::size_t>(i)].phi.transpose();
    y[i] = ts.rows[static_cast<std::size_t>(i)].relevant ? 1.0 : 0.0;
  }

  // Standardize all components except the trailing bias.
  for (int h = 0; h < h_dim - 1; ++h) {
    const double mean = raw.col(h).mean();
    const double var = (raw.col(h).array() - mean).square().sum() /
                       std::max<double>(1.0, static_cast<double>(n - 1));
    const double sd = std::sqrt(var);
    prior.scaler_mean[h] = mean;
    prior.scaler_scale[h] = sd > 1e-12 ? sd : 1.0;
    raw.col(h) = (raw.col(h).array() - mean) / prior.scaler_scale[h];
  }

  VectorXd theta = VectorXd::Zero(h_dim);
  VectorXd penalty_diag = VectorXd::Constant(h_dim, l2);
  penalty_diag[h_dim - 1] = 0.0;  // bias unpenalized

  double objective = penalized_loglik(raw, y, theta, l2);
  prior.objective_history.push_back(objective);

  for (int iter = 0; iter < max_iter; ++iter) {
    const VectorXd z = raw * theta;
    VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    VectorXd grad = raw.transpose() * (y - p) - penalty_diag.cwiseProduct(theta);
    prior.iterations = iter + 1;
    if (grad.norm() < 1e-8) {
      prior.converged = true;
      break;
    }
    MatrixXd hess = raw.transpose() * w.asDiagonal() * raw;
    hess.diagonal() += penalty_diag;
    const VectorXd direction = hess.ldlt().solve(grad);
    if (!direction.allFinite())
      fail(ErrorCode::Data, "IRLS system produced a non-finite step");

    // Step halving keeps the penalized log-likelihood non-decreasing.
    double step = 1.0;
    VectorXd candidate = theta + step * direction;
    double cand_obj = penalized_loglik(raw, y, candidate, l2);
    while (cand_obj < objective && step > 1e-12) {
      step *= 0.5;
      candidate = theta + step * direction;
      cand_obj = penalized_loglik(raw, y, candidate, l2);
    }
    if (cand_obj < objective) {
      prior.converged = grad.norm() < 1e-6;
      break;
    }
    theta = candidate;
    objective = cand_obj;
    prior.objective_history.push_back(objective);
  }

  prior.theta = theta;
  return prior;
}

RelevancePrior compute_prior(const MetaPrior& meta,
                             const std::vector<MatrixXd>& per_demo_meta_rows) {
  if (per_demo_meta_rows.empty())
    fail(ErrorCode::Data, "prior needs at least one demonstration");
  const Eigen::Index m = per_demo_meta_rows.front().rows();
  VectorXd acc = VectorXd::Zero(m);
  for (const MatrixXd& rows : per_demo_meta_rows) {
    if (rows.rows() != m || rows.cols() != kMetaFeatureCount)
      fail(ErrorCode::Dimension, "meta feature rows have inconsistent shape");
    for (Eigen::Index j = 0; j < m; ++j)
      acc[j] += meta.sigmoid_of(rows.row(j).transpose());
  }
  RelevancePrior prior;
  prior.p1 = acc / static_cast<double>(per_demo_meta_rows.size());
  prior.clamp();
  return prior;
}

RelevancePrior uniform_prior(const std::vector<LabeledSkill>& prior_skills,
                             const std::vector<std::string>& exclude_groups, int m) {
  std::size_t relevant = 0;
  std::size_t total = 0;
  for (const LabeledSkill& skill : prior_skills) {
    if (std::find(exclude_groups.begin(), exclude_groups.end(), skill.exclude_group) !=
        exclude_groups.end())
      continue;
    for (int c = 0; c < kNumComponents; ++c) {
      for (bool label : skill.labels[c]) {
        ++total;
        if (label) ++relevant;
      }
    }
  }
  if (total == 0) fail(ErrorCode::Data, "no labeled features in the prior-skill pool");
  const double p = static_cast<double>(relevant) / static_cast<double>(total);
  return RelevancePrior::uniform(m, p);
}

}  // namespace relfeat
