#include "relfeat/ssvs.hpp"

#include <cmath>

namespace relfeat {

namespace {

VectorXd prior_variances(const std::vector<bool>& gamma, const SsvsHyper& hyper) {
  VectorXd r(gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j)
    r[static_cast<Eigen::Index>(j)] = gamma[j] ? hyper.slab_var : hyper.spike_var;
  return r;
}

}  // namespace

void weight_posterior(const std::vector<bool>& gamma, double sigma2_k,
                      const MatrixXd& phi, const VectorXd& target_col,
                      const SsvsHyper& hyper, VectorXd& mean, MatrixXd& cov) {
  const Eigen::Index m = phi.rows();
  const VectorXd r = prior_variances(gamma, hyper);
  MatrixXd precision = phi * phi.transpose() / sigma2_k;
  precision.diagonal() += r.cwiseInverse();
  Eigen::LLT<MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::Data, "weight posterior precision is not positive definite");
  cov = llt.solve(MatrixXd::Identity(m, m));
  mean = llt.solve(phi * target_col / sigma2_k);
}

MatrixXd sample_weights(const SsvsState& state, const MatrixXd& phi,
                        const MatrixXd& targets, const SsvsHyper& hyper, Rng& rng) {
  const Eigen::Index m = phi.rows();
  const Eigen::Index cols = targets.cols();
  const VectorXd r = prior_variances(state.gamma, hyper);

  MatrixXd weights(m, cols);
  VectorXd z(m);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double sigma2_k = state.sigma2[k];
    MatrixXd precision = phi * phi.transpose() / sigma2_k;
    precision.diagonal() += r.cwiseInverse();
    Eigen::LLT<MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::Data, "weight posterior precision is not positive definite");
    const VectorXd mean = llt.solve(phi * targets.col(k) / sigma2_k);
    for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.normal();
    // x = mean + L^-T z has covariance (L L^T)^-1.
    weights.col(k) = mean + llt.matrixU().solve(z);
  }
  return weights;
}

VectorXd sample_sigma(const SsvsState& state, const MatrixXd& phi,
                      const MatrixXd& targets, const SsvsHyper& hyper, Rng& rng) {
  if (hyper.fixed_sigma2) return *hyper.fixed_sigma2;
  const Eigen::Index cols = targets.cols();
  const double n = static_cast<double>(targets.rows());
  VectorXd sigma2(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const VectorXd residual = targets.col(k) - phi.transpose() * state.weights.col(k);
    const double rss = residual.squaredNorm();
    double shape = hyper.ig_shape + 0.5 * n;
    double scale = hyper.ig_scale + 0.5 * rss;
    if (hyper.printed_sigma_update) {
      shape = hyper.ig_shape;
      scale = hyper.ig_scale + (rss > 0.0 ? 1.0 / (2.0 * rss)
                                          : std::numeric_limits<double>::infinity());
    }
    sigma2[k] = rng.inverse_gamma(shape, scale);
  }
  return sigma2;
}

double relevance_probability(const Eigen::Ref<const VectorXd>& weight_row,
                             double prior_p1, const SsvsHyper& hyper) {
  const double d = static_cast<double>(weight_row.size());
  const double ss = weight_row.squaredNorm();
  const double log_slab =
      -0.5 * d * std::log(hyper.slab_var) - 0.5 * ss / hyper.slab_var;
  const double log_spike =
      -0.5 * d * std::log(hyper.spike_var) - 0.5 * ss / hyper.spike_var;
  const double log_one = log_slab + std::log(prior_p1);
  const double log_zero = log_spike + std::log1p(-prior_p1);
  // p = exp(log_one) / (exp(log_one) + exp(log_zero)) in a stable form.
  const double diff = log_zero - log_one;
  if (diff > 700.0) return 0.0;
  if (diff < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(diff));
}

std::vector<bool> sample_relevance(const SsvsState& state, const RelevancePrior& prior,
                                   const SsvsHyper& hyper, Rng& rng) {
  const Eigen::Index m = state.weights.rows();
  if (prior.p1.size() != m)
    fail(ErrorCode::Dimension, "prior length does not match feature count");
  std::vector<bool> gamma(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const double p = relevance_probability(state.weights.row(j), prior.p1[j], hyper);
    gamma[static_cast<std::size_t>(j)] = rng.bernoulli(p);
  }
  return gamma;
}

GibbsResult run_gibbs(const MatrixXd& phi, const MatrixXd& targets,
                      const RelevancePrior& prior, const SsvsHyper& hyper,
                      std::uint64_t seed) {
  hyper.validate();
  const Eigen::Index m = phi.rows();
  const Eigen::Index n = phi.cols();
  const Eigen::Index cols = targets.cols();
  if (targets.rows() != n)
    fail(ErrorCode::Dimension, "targets must have one row per demonstration");
  if (n < 2) fail(ErrorCode::Data, "gibbs needs at least two demonstrations");
  if (prior.p1.size() != m)
    fail(ErrorCode::Dimension, "prior length does not match feature count");
  if (hyper.fixed_sigma2 && hyper.fixed_sigma2->size() != cols)
    fail(ErrorCode::Dimension, "fixed sigma override has the wrong length");

  Rng rng(seed);
  SsvsState state;
  state.gamma.assign(static_cast<std::size_t>(m), true);
  state.sigma2 = hyper.fixed_sigma2
                     ? *hyper.fixed_sigma2
                     : VectorXd::Constant(cols, hyper.ig_scale / (hyper.ig_shape - 1.0));
  state.weights = MatrixXd::Zero(m, cols);

  GibbsResult result;
  result.chain.reserve(static_cast<std::size_t>(hyper.samples));
  VectorXd counts = VectorXd::Zero(m);

  const int total = hyper.burn_in + hyper.samples;
  for (int sweep = 0; sweep < total; ++sweep) {
    state.weights = sample_weights(state, phi, targets, hyper, rng);
    state.sigma2 = sample_sigma(state, phi, targets, hyper, rng);
    state.gamma = sample_relevance(state, prior, hyper, rng);
    state.rng_counter = rng.counter();
    if (sweep >= hyper.burn_in) {
      result.chain.push_back(state);
      for (Eigen::Index j = 0; j < m; ++j)
        if (state.gamma[static_cast<std::size_t>(j)]) counts[j] += 1.0;
    }
  }
  result.marginal_p1 = counts / static_cast<double>(hyper.samples);
  return result;
}

std::vector<bool> map_relevance(const std::vector<SsvsState>& chain) {
  if (chain.empty()) fail(ErrorCode::Data, "empty chain has no MAP estimate");
  const std::size_t m = chain.front().gamma.size();
  std::vector<std::size_t> counts(m, 0);
  for (const SsvsState& s : chain)
    for (std::size_t j = 0; j < m; ++j)
      if (s.gamma[j]) ++counts[j];
  std::vector<bool> selected(m);
  for (std::size_t j = 0; j < m; ++j) selected[j] = 2 * counts[j] > chain.size();
  return selected;
}

MatrixXd fit_final_weights(const MatrixXd& phi, const MatrixXd& targets,
                           const std::vector<bool>& selected) {
  const Eigen::Index m = phi.rows();
  if (selected.size() != static_cast<std::size_t>(m))
    fail(ErrorCode::Dimension, "selection mask length does not match feature count");

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < m; ++j)
    if (selected[static_cast<std::size_t>(j)]) active.push_back(j);

  MatrixXd weights = MatrixXd::Zero(m, targets.cols());
  if (active.empty()) return weights;

  MatrixXd design(phi.cols(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a)
    design.col(static_cast<Eigen::Index>(a)) = phi.row(active[a]).transpose();

  MatrixXd gram = design.transpose() * design;
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    gram.diagonal().array() += 1e-8;
    llt.compute(gram);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::Data, "selected design is numerically unusable");
  }
  const MatrixXd solution = llt.solve(design.transpose() * targets);
  for (std::size_t a = 0; a < active.size(); ++a)
    weights.row(active[a]) = solution.row(static_cast<Eigen::Index>(a));
  return weights;
}

}  // namespace relfeat
