#pragma once

#include <Eigen/Dense>
#include <vector>

#include "relfeat/error.hpp"

namespace relfeat {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Spring/damper gains, canonical decay rate, and basis layout of the
/// motor primitive. alpha_z = 4 beta_z gives the critically damped return.
struct DmpConfig {
  double alpha_z = 25.0;
  double beta_z = 6.25;
  double tau = 1.0;        // canonical decay rate, 1/s
  int basis_count = 5;     // K Gaussian bases; weights carry K+1 entries
  double x_cutoff = 0.01;  // canonical value at the nominal end of movement
  // When set, the goal basis is pinned to 1 for all x. This reduces the
  // system to the classic goal-parameter formulation.
  bool goal_basis_constant = false;

  void validate() const {
    if (alpha_z <= 0 || beta_z <= 0 || tau <= 0)
      fail(ErrorCode::Config, "dmp gains and tau must be positive");
    if (basis_count < 1) fail(ErrorCode::Config, "dmp needs at least one basis");
    if (!(x_cutoff > 0.0 && x_cutoff < 1.0))
      fail(ErrorCode::Config, "x_cutoff must lie in (0, 1)");
  }

  /// Decay rate such that x(duration) hits x_cutoff.
  static double tau_for_duration(double duration, double x_cutoff = 0.01) {
    return std::log(1.0 / x_cutoff) / duration;
  }
};

/// Per-feature weight rows; column 0 multiplies the goal basis and columns
/// 1..K the Gaussian bases.
struct ShapeWeights {
  MatrixXd weights;  // M x (K+1)

  int feature_count() const { return static_cast<int>(weights.rows()); }
};

/// Canonical timer state x(t) = exp(-tau t), starting at 1.
double canonical_state(double t, const DmpConfig& cfg);

/// Phase variable s in [0, 1]: log-time position of x between 1 and x_cutoff.
double phase_of(double x, const DmpConfig& cfg);

struct BasisActivations {
  VectorXd gaussian;  // psi_1..psi_K evaluated at the phase
  double goal;        // psi_0, minimum jerk from 0 to 1 over the phase
};

/// Evaluate all basis functions at canonical state x.
BasisActivations basis_activations(double x, const DmpConfig& cfg);

/// Forcing term for one feature's weight row (length K+1, goal entry first).
double forcing(double x, const Eigen::Ref<const VectorXd>& weight_row,
               const DmpConfig& cfg);

struct IntegrationResult {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> velocities;

  double final_position() const { return positions.back(); }
};

/// Integrate one skill component with RK4 from rest at y0. `features` and
/// the rows of W must agree in count.
IntegrationResult integrate(double y0, const Eigen::Ref<const VectorXd>& features,
                            const ShapeWeights& weights, const DmpConfig& cfg,
                            double duration, double dt);

/// Target shape parameters of a demonstrated component track: the weights
/// the primitive would need with a single constant feature to reproduce
/// the track. Sampling must be uniform in time.
VectorXd extract_targets(const std::vector<double>& times,
                         const std::vector<double>& values, const DmpConfig& cfg);

/// Closed-form end point of the movement: y0 plus the feature-weighted
/// goal column.
double predict_goal(double y0, const Eigen::Ref<const VectorXd>& features,
                    const ShapeWeights& weights);

/// Linearly resample a track onto n uniform samples over [0, duration].
/// Input times are first rescaled to the requested duration.
void resample_track(const std::vector<double>& times, const std::vector<double>& values,
                    double duration, int n_samples, std::vector<double>& out_times,
                    std::vector<double>& out_values);

}  // namespace relfeat
