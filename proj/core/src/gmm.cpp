#include "relfeat/gmm.hpp"

#include <cmath>
#include <numbers>

#include "relfeat/error.hpp"

namespace relfeat {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double logsumexp_row(const Eigen::RowVectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

}  // namespace

DiagonalGmm DiagonalGmm::fit(const Eigen::MatrixXd& rows, int components, Rng& rng,
                             int max_iter, double tol, double var_floor) {
  check_internal(rows.rows() > 0, "gmm fit needs data");
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  const int k = std::max(1, std::min<int>(components, static_cast<int>(n)));

  DiagonalGmm gmm;
  gmm.weights_ = Eigen::VectorXd::Constant(k, 1.0 / k);
  gmm.means_.resize(k, d);
  gmm.variances_.resize(k, d);

  // Farthest-point style seeding: first center random, the rest greedily
  // spread, with the rng only breaking the initial choice.
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(rng.uniform_index(n)));
  Eigen::VectorXd dist2 =
      (rows.rowwise() - rows.row(centers[0])).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index best;
    dist2.maxCoeff(&best);
    centers.push_back(best);
    dist2 = dist2.cwiseMin(
        (rows.rowwise() - rows.row(best)).rowwise().squaredNorm());
  }
  Eigen::RowVectorXd global_var =
      ((rows.rowwise() - rows.colwise().mean()).array().square().colwise().sum() /
       std::max<double>(1.0, static_cast<double>(n - 1)))
          .matrix();
  global_var = global_var.cwiseMax(var_floor);
  for (int c = 0; c < k; ++c) {
    gmm.means_.row(c) = rows.row(centers[static_cast<std::size_t>(c)]);
    gmm.variances_.row(c) = global_var;
  }

  gmm.em(rows, max_iter, tol, var_floor);
  return gmm;
}

void DiagonalGmm::refit(const Eigen::MatrixXd& rows, int max_iter, double tol,
                        double var_floor) {
  check_internal(weights_.size() > 0, "refit requires a fitted mixture");
  em(rows, max_iter, tol, var_floor);
}

void DiagonalGmm::em(const Eigen::MatrixXd& rows, int max_iter, double tol,
                     double var_floor) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  const int k = components();

  Eigen::MatrixXd log_resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // E step.
    for (int c = 0; c < k; ++c) {
      const auto mean = means_.row(c);
      const auto var = variances_.row(c);
      const double log_norm =
          -0.5 * (d * kLog2Pi + var.array().log().sum()) + std::log(weights_[c]);
      log_resp.col(c) =
          ((rows.rowwise() - mean).array().square().rowwise() / (2.0 * var.array()))
              .rowwise()
              .sum()
              .matrix() *
              -1.0 +
          Eigen::VectorXd::Constant(n, log_norm);
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = logsumexp_row(log_resp.row(i));
      ll += lse;
      log_resp.row(i) = (log_resp.row(i).array() - lse).exp();
    }
    // M step (log_resp now holds responsibilities).
    for (int c = 0; c < k; ++c) {
      const double nk = log_resp.col(c).sum();
      if (nk < 1e-10) continue;  // empty component keeps its parameters
      const Eigen::RowVectorXd mean =
          (log_resp.col(c).transpose() * rows) / nk;
      Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i) {
        var += log_resp(i, c) *
               (rows.row(i) - mean).array().square().matrix();
      }
      var /= nk;
      means_.row(c) = mean;
      variances_.row(c) = var.cwiseMax(var_floor);
      weights_[c] = nk / static_cast<double>(n);
    }
    weights_ /= weights_.sum();

    if (iter > 0 && std::abs(ll - prev_ll) <
                        tol * std::max(1.0, std::abs(prev_ll)))
      break;
    prev_ll = ll;
  }
}

double DiagonalGmm::log_density(const Eigen::Ref<const Eigen::VectorXd>& row) const {
  const int k = components();
  const Eigen::Index d = row.size();
  Eigen::RowVectorXd lp(k);
  for (int c = 0; c < k; ++c) {
    const auto mean = means_.row(c).transpose();
    const auto var = variances_.row(c).transpose();
    const double quad = ((row - mean).array().square() / var.array()).sum();
    lp[c] = std::log(weights_[c]) -
            0.5 * (d * kLog2Pi + var.array().log().sum() + quad);
  }
  return logsumexp_row(lp);
}

double DiagonalGmm::total_log_likelihood(const Eigen::MatrixXd& rows) const {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    ll += log_density(rows.row(i).transpose());
  return ll;
}

}  // namespace relfeat
