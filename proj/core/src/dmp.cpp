#include "relfeat/dmp.hpp"

#include <cmath>

namespace relfeat {

namespace {

// Width, center layout of the Gaussian bases over the phase [0, 1].
// Adjacent bases intersect at activation 0.55.
struct BasisLayout {
  VectorXd centers;
  double inv_two_var;
};

BasisLayout layout_for(const DmpConfig& cfg) {
  const int k = cfg.basis_count;
  BasisLayout layout;
  layout.centers.resize(k);
  double spacing = 1.0;
  if (k == 1) {
    layout.centers[0] = 0.5;
  } else {
    spacing = 1.0 / static_cast<double>(k - 1);
    for (int i = 0; i < k; ++i) layout.centers[i] = i * spacing;
  }
  const double var = spacing * spacing / (8.0 * std::log(1.0 / 0.55));
  layout.inv_two_var = 1.0 / (2.0 * var);
  return layout;
}

}  // namespace

double canonical_state(double t, const DmpConfig& cfg) {
  return std::exp(-cfg.tau * t);
}

double phase_of(double x, const DmpConfig& cfg) {
  const double s = std::log(x) / std::log(cfg.x_cutoff);
  return std::clamp(s, 0.0, 1.0);
}

BasisActivations basis_activations(double x, const DmpConfig& cfg) {
  const double s = phase_of(x, cfg);
  const BasisLayout layout = layout_for(cfg);
  BasisActivations act;
  act.gaussian.resize(cfg.basis_count);
  for (int i = 0; i < cfg.basis_count; ++i) {
    const double d = s - layout.centers[i];
    act.gaussian[i] = std::exp(-d * d * layout.inv_two_var);
  }
  const double s2 = s * s;
  act.goal = cfg.goal_basis_constant
                 ? 1.0
                 : s2 * s * (10.0 + s * (-15.0 + 6.0 * s));
  return act;
}

double forcing(double x, const Eigen::Ref<const VectorXd>& weight_row,
               const DmpConfig& cfg) {
  check_internal(weight_row.size() == cfg.basis_count + 1,
                 "weight row length must be basis_count + 1");
  const BasisActivations act = basis_activations(x, cfg);
  const double psi_sum = act.gaussian.sum();
  double mixture = 0.0;
  if (psi_sum > 0.0) {
    mixture = act.gaussian.dot(weight_row.tail(cfg.basis_count)) * x / psi_sum;
  }
  return cfg.alpha_z * cfg.beta_z * (mixture + weight_row[0] * act.goal);
}

IntegrationResult integrate(double y0, const Eigen::Ref<const VectorXd>& features,
                            const ShapeWeights& weights, const DmpConfig& cfg,
                            double duration, double dt) {
  cfg.validate();
  if (dt <= 0.0) fail(ErrorCode::Config, "integration step must be positive");
  if (features.size() != weights.weights.rows())
    fail(ErrorCode::Dimension, "feature count does not match weight rows");

  const double inv_tau = 1.0 / cfg.tau;
  const double inv_tau2 = inv_tau * inv_tau;

  auto total_forcing = [&](double x) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < features.size(); ++j) {
      f += features[j] * forcing(x, weights.weights.row(j), cfg);
    }
    return f;
  };
  auto accel = [&](double y, double v, double x) {
    return cfg.alpha_z * (cfg.beta_z * inv_tau2 * (y0 - y) - inv_tau * v) +
           inv_tau2 * total_forcing(x);
  };

  const int steps = static_cast<int>(std::ceil(duration / dt));
  IntegrationResult result;
  result.times.reserve(steps + 1);
  result.positions.reserve(steps + 1);
  result.velocities.reserve(steps + 1);

  double y = y0;
  double v = 0.0;
  double t = 0.0;
  result.times.push_back(t);
  result.positions.push_back(y);
  result.velocities.push_back(v);

  for (int i = 0; i < steps; ++i) {
    const double h = std::min(dt, duration - t);
    const double x0 = canonical_state(t, cfg);
    const double xh = canonical_state(t + 0.5 * h, cfg);
    const double x1 = canonical_state(t + h, cfg);

    const double k1y = v;
    const double k1v = accel(y, v, x0);
    const double k2y = v + 0.5 * h * k1v;
    const double k2v = accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v, xh);
    const double k3y = v + 0.5 * h * k2v;
    const double k3v = accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v, xh);
    const double k4y = v + h * k3v;
    const double k4v = accel(y + h * k3y, v + h * k3v, x1);

    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += h;

    if (!std::isfinite(y) || !std::isfinite(v))
      fail(ErrorCode::Data, "dmp state diverged during integration");

    result.times.push_back(t);
    result.positions.push_back(y);
    result.velocities.push_back(v);
  }
  return result;
}

VectorXd extract_targets(const std::vector<double>& times,
                         const std::vector<double>& values, const DmpConfig& cfg) {
  cfg.validate();
  const std::size_t n = times.size();
  const int cols = cfg.basis_count + 1;
  if (n < static_cast<std::size_t>(5 * cols))
    fail(ErrorCode::Data, "too few samples to extract target shape parameters");
  if (values.size() != n) fail(ErrorCode::Dimension, "times/values length mismatch");

  const double dt = times[1] - times[0];
  const double y0 = values.front();

  // Finite differences: central 3-point stencils, one-sided second-order
  // at the ends.
  std::vector<double> vel(n), acc(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    vel[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    acc[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (dt * dt);
  }
  vel[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
  vel[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
  acc[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / (dt * dt);
  acc[n - 1] =
      (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) /
      (dt * dt);

  const double tau2 = cfg.tau * cfg.tau;
  MatrixXd design(n, cols);
  VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = canonical_state(times[i] - times[0], cfg);
    const BasisActivations act = basis_activations(x, cfg);
    const double psi_sum = act.gaussian.sum();
    design(i, 0) = cfg.alpha_z * cfg.beta_z * act.goal;
    for (int k = 0; k < cfg.basis_count; ++k) {
      design(i, k + 1) = psi_sum > 0.0
                             ? cfg.alpha_z * cfg.beta_z * act.gaussian[k] * x / psi_sum
                             : 0.0;
    }
    target[i] = tau2 * acc[i] -
                cfg.alpha_z * (cfg.beta_z * (y0 - values[i]) - cfg.tau * vel[i]);
  }

  MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += 1e-8;
  return gram.ldlt().solve(design.transpose() * target);
}

double predict_goal(double y0, const Eigen::Ref<const VectorXd>& features,
                    const ShapeWeights& weights) {
  if (features.size() != weights.weights.rows())
    fail(ErrorCode::Dimension, "feature count does not match weight rows");
  return y0 + features.dot(weights.weights.col(0));
}

void resample_track(const std::vector<double>& times, const std::vector<double>& values,
                    double duration, int n_samples, std::vector<double>& out_times,
                    std::vector<double>& out_values) {
  if (times.size() < 2 || times.size() != values.size())
    fail(ErrorCode::Data, "resample needs at least two matching samples");
  if (n_samples < 2) fail(ErrorCode::Config, "resample needs n_samples >= 2");
  const double span = times.back() - times.front();
  if (span <= 0.0) fail(ErrorCode::Data, "track has no temporal extent");

  out_times.resize(n_samples);
  out_values.resize(n_samples);
  const double scale = span / duration;
  std::size_t cursor = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double t_new = duration * i / (n_samples - 1);
    const double t_src = times.front() + t_new * scale;
    while (cursor + 2 < times.size() && times[cursor + 1] < t_src) ++cursor;
    const double t0 = times[cursor];
    const double t1 = times[cursor + 1];
    const double a = std::clamp((t_src - t0) / (t1 - t0), 0.0, 1.0);
    out_times[i] = t_new;
    out_values[i] = (1.0 - a) * values[cursor] + a * values[cursor + 1];
  }
}

}  // namespace relfeat
