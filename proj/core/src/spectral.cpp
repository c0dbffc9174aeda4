#include "relfeat/spectral.hpp"

#include <limits>

#include "relfeat/error.hpp"
#include "relfeat/rng.hpp"

namespace relfeat {

namespace {

double assign_labels(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& centers,
                     std::vector<int>& labels) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (rows.row(i) - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best_c;
    inertia += best;
  }
  return inertia;
}

}  // namespace

std::vector<int> kmeans_rows(const Eigen::MatrixXd& rows, int clusters,
                             std::uint64_t seed, int restarts, int max_iter) {
  const Eigen::Index n = rows.rows();
  check_internal(n > 0 && clusters >= 1, "kmeans needs data and clusters >= 1");
  if (clusters >= n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return labels;
  }

  std::vector<int> best_labels(static_cast<std::size_t>(n), 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(derive_seed(seed, "kmeans-restart", static_cast<std::uint64_t>(restart)));

    // k-means++ seeding.
    Eigen::MatrixXd centers(clusters, rows.cols());
    centers.row(0) = rows.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
    Eigen::VectorXd dist2 = (rows.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < clusters; ++c) {
      const double total = dist2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double r = rng.uniform() * total;
        for (Eigen::Index i = 0; i < n; ++i) {
          r -= dist2[i];
          if (r <= 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.uniform_index(n));
      }
      centers.row(c) = rows.row(pick);
      dist2 = dist2.cwiseMin((rows.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
      std::vector<int> prev = labels;
      inertia = assign_labels(rows, centers, labels);
      if (labels == prev) break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(clusters, rows.cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(clusters);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
        counts[labels[static_cast<std::size_t>(i)]] += 1.0;
      }
      for (int c = 0; c < clusters; ++c)
        if (counts[c] > 0.0) centers.row(c) = sums.row(c) / counts[c];
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

std::vector<int> spectral_cluster(const Eigen::MatrixXd& affinity, int clusters,
                                  std::uint64_t seed, int kmeans_restarts) {
  const Eigen::Index n = affinity.rows();
  check_internal(affinity.cols() == n, "affinity must be square");
  if (clusters <= 1 || n <= 1) return std::vector<int>(static_cast<std::size_t>(n), 0);
  if (clusters >= n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return labels;
  }

  // Normalized affinity D^-1/2 W D^-1/2; its top eigenvectors span the
  // same space as the bottom of the normalized Laplacian.
  Eigen::VectorXd degree = affinity.rowwise().sum().cwiseMax(1e-12);
  Eigen::VectorXd dinv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd normalized =
      dinv_sqrt.asDiagonal() * affinity * dinv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
  Eigen::MatrixXd embedding = eig.eigenvectors().rightCols(clusters);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 1e-12) embedding.row(i) /= norm;
  }
  return kmeans_rows(embedding, clusters, derive_seed(seed, "spectral-kmeans"),
                     kmeans_restarts);
}

}  // namespace relfeat
