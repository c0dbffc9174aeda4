#pragma once

#include <Eigen/Dense>
#include <vector>

#include "relfeat/rng.hpp"

namespace relfeat {

/// Diagonal-covariance Gaussian mixture fit with EM. Supports warm starts
/// so a refit on a changed point set is monotone relative to the previous
/// parameters, which the segmentation's energy argument relies on.
class DiagonalGmm {
 public:
  DiagonalGmm() = default;

  /// Fit from scratch: distance-based initialization, then EM.
  static DiagonalGmm fit(const Eigen::MatrixXd& rows, int components, Rng& rng,
                         int max_iter = 25, double tol = 1e-6,
                         double var_floor = 1e-6);

  /// Continue EM from the current parameters on (possibly different) rows.
  void refit(const Eigen::MatrixXd& rows, int max_iter = 25, double tol = 1e-6,
             double var_floor = 1e-6);

  /// Log density of one row under the mixture.
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& row) const;

  double total_log_likelihood(const Eigen::MatrixXd& rows) const;

  int components() const { return static_cast<int>(weights_.size()); }

 private:
  Eigen::VectorXd weights_;    // mixture weights
  Eigen::MatrixXd means_;      // components x dims
  Eigen::MatrixXd variances_;  // components x dims

  void em(const Eigen::MatrixXd& rows, int max_iter, double tol, double var_floor);
};

}  // namespace relfeat
