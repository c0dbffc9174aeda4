// Test-only reference implementations, kept independent of the library
// code paths they are used to check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace oracles {

/// Classic goal-parameter DMP: y'' = a(b/tau^2 (g - y) - 1/tau y'),
/// integrated with the same RK4 scheme and step size as the library.
struct ClassicDmpTrace {
  std::vector<double> positions;
  std::vector<double> velocities;
};

inline ClassicDmpTrace integrate_classic_goal_dmp(double y0, double goal, double alpha,
                                                  double beta, double tau,
                                                  double duration, double dt) {
  ClassicDmpTrace trace;
  double y = y0, v = 0.0, t = 0.0;
  trace.positions.push_back(y);
  trace.velocities.push_back(v);
  auto accel = [&](double yy, double vv) {
    return alpha * (beta / (tau * tau) * (goal - yy) - vv / tau);
  };
  const int steps = static_cast<int>(std::ceil(duration / dt));
  for (int i = 0; i < steps; ++i) {
    const double h = std::min(dt, duration - t);
    const double k1y = v, k1v = accel(y, v);
    const double k2y = v + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v);
    const double k3y = v + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v);
    const double k4y = v + h * k3v, k4v = accel(y + h * k3y, v + h * k3v);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += h;
    trace.positions.push_back(y);
    trace.velocities.push_back(v);
  }
  return trace;
}

/// Exhaustive posterior over gamma for fixed sigma:
///   p(gamma | targets, phi) ∝ p(gamma) prod_k N(t_k; 0, phi' R phi + s_k^2 I).
/// Returns the marginal inclusion probability per feature.
inline Eigen::VectorXd enumerate_relevance_marginals(
    const Eigen::MatrixXd& phi, const Eigen::MatrixXd& targets,
    const Eigen::VectorXd& prior_p1, double spike_var, double slab_var,
    const Eigen::VectorXd& sigma2) {
  const int m = static_cast<int>(phi.rows());
  const int n = static_cast<int>(phi.cols());
  const int cols = static_cast<int>(targets.cols());
  const int combos = 1 << m;

  Eigen::VectorXd log_post(combos);
  for (int mask = 0; mask < combos; ++mask) {
    Eigen::VectorXd r(m);
    double log_prior = 0.0;
    for (int j = 0; j < m; ++j) {
      const bool on = (mask >> j) & 1;
      r[j] = on ? slab_var : spike_var;
      log_prior += std::log(on ? prior_p1[j] : 1.0 - prior_p1[j]);
    }
    double log_like = 0.0;
    for (int k = 0; k < cols; ++k) {
      Eigen::MatrixXd cov = phi.transpose() * r.asDiagonal() * phi;
      cov.diagonal().array() += sigma2[k];
      const Eigen::LLT<Eigen::MatrixXd> llt(cov);
      const double log_det =
          2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      const double quad = targets.col(k).dot(llt.solve(targets.col(k)));
      log_like += -0.5 * (n * std::log(2.0 * M_PI) + log_det + quad);
    }
    log_post[mask] = log_prior + log_like;
  }
  const double mx = log_post.maxCoeff();
  Eigen::VectorXd post = (log_post.array() - mx).exp();
  post /= post.sum();

  Eigen::VectorXd marginals = Eigen::VectorXd::Zero(m);
  for (int mask = 0; mask < combos; ++mask)
    for (int j = 0; j < m; ++j)
      if ((mask >> j) & 1) marginals[j] += post[mask];
  return marginals;
}

/// Closed-form Bhattacharyya coefficient for equal covariances.
inline double bhattacharyya_equal_cov(const Eigen::VectorXd& mean_diff,
                                      const Eigen::MatrixXd& cov) {
  const double quad = mean_diff.dot(cov.llt().solve(mean_diff));
  return std::exp(-0.125 * quad);
}

/// Connected components over a symmetric adjacency radius; the oracle for
/// two-blob segmentation.
inline std::vector<int> connected_components(const std::vector<Eigen::Vector3d>& points,
                                             double radius) {
  const int n = static_cast<int>(points.size());
  std::vector<int> label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    std::vector<int> stack = {i};
    label[i] = next;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (label[v] < 0 && (points[u] - points[v]).norm() <= radius) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace oracles
