#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace relfeat {

/// Spectral clustering on a symmetric affinity matrix: normalized
/// Laplacian embedding followed by k-means with restarts. Deterministic
/// given the seed.
std::vector<int> spectral_cluster(const Eigen::MatrixXd& affinity, int clusters,
                                  std::uint64_t seed, int kmeans_restarts = 10);

/// Plain k-means on row vectors; returns labels. Used by the spectral
/// embedding and exposed for tests.
std::vector<int> kmeans_rows(const Eigen::MatrixXd& rows, int clusters,
                             std::uint64_t seed, int restarts = 10,
                             int max_iter = 100);

}  // namespace relfeat
