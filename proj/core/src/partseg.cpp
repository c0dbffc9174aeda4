#include "relfeat/partseg.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "relfeat/maxflow.hpp"
#include "relfeat/rng.hpp"
#include "relfeat/spectral.hpp"

namespace relfeat {

namespace {

constexpr int kDescriptorDims = 10;  // position, normal, curvature, spectral

Eigen::VectorXd descriptor_of(const OrientedPoint& p) {
  Eigen::VectorXd row(kDescriptorDims);
  row << p.position, p.normal, p.curvature, p.spectral;
  return row;
}

std::vector<std::pair<int, int>> knn_edges(const std::vector<Vec3>& positions, int k) {
  const int n = static_cast<int>(positions.size());
  std::set<std::pair<int, int>> edges;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + i);
    const int kk = std::min(k, n - 1);
    std::nth_element(order.begin(), order.begin() + kk, order.end(),
                     [&](int a, int b) {
                       return (positions[a] - positions[i]).squaredNorm() <
                              (positions[b] - positions[i]).squaredNorm();
                     });
    for (int j = 0; j < kk; ++j) {
      const int a = std::min(i, order[j]);
      const int b = std::max(i, order[j]);
      edges.insert({a, b});
    }
    order.insert(order.begin() + i, i);
  }
  return {edges.begin(), edges.end()};
}

}  // namespace

PartGaussian summarize_part(const PointSet& object,
                            const std::vector<std::size_t>& members) {
  check_internal(!members.empty(), "part summary needs members");
  PartGaussian g;
  for (std::size_t i : members) {
    Eigen::Matrix<double, 6, 1> row;
    row << object.points[i].position, object.points[i].normal;
    g.mean += row;
  }
  g.mean /= static_cast<double>(members.size());
  for (std::size_t i : members) {
    Eigen::Matrix<double, 6, 1> row;
    row << object.points[i].position, object.points[i].normal;
    const Eigen::Matrix<double, 6, 1> d = row - g.mean;
    g.cov += d * d.transpose();
  }
  g.cov /= static_cast<double>(members.size());
  return g;
}

std::vector<std::size_t> detect_interacting_points(const PointSet& a, const PointSet& b,
                                                   std::size_t frame,
                                                   const InteractionConfig& cfg) {
  cfg.validate();
  if (frame >= a.pose_sequence.size() || frame >= b.pose_sequence.size())
    fail(ErrorCode::Dimension, "object has no pose at the requested frame");

  const double thr2 = cfg.distance_threshold * cfg.distance_threshold;

  std::vector<Vec3> bp(b.points.size()), bn(b.points.size());
  for (std::size_t j = 0; j < b.points.size(); ++j) {
    bp[j] = b.world_position(j, frame);
    bn[j] = b.world_normal(j, frame);
  }

  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (!a.points[i].valid) continue;
    const Vec3 p = a.world_position(i, frame);
    const Vec3 n = a.world_normal(i, frame);
    for (std::size_t j = 0; j < b.points.size(); ++j) {
      if (!b.points[j].valid) continue;
      if ((p - bp[j]).squaredNorm() <= thr2 && n.dot(bn[j]) < cfg.normal_dot_threshold) {
        hits.push_back(i);
        break;
      }
    }
  }
  return hits;
}

double segmentation_energy(const Eigen::MatrixXd& descriptor_rows,
                           const std::vector<std::pair<int, int>>& edges,
                           const std::vector<bool>& foreground,
                           const DiagonalGmm& fg_model, const DiagonalGmm& bg_model,
                           double pairwise_coefficient) {
  double energy = 0.0;
  for (Eigen::Index i = 0; i < descriptor_rows.rows(); ++i) {
    const auto row = descriptor_rows.row(i).transpose();
    energy -= foreground[static_cast<std::size_t>(i)] ? fg_model.log_density(row)
                                                      : bg_model.log_density(row);
  }
  for (const auto& [u, v] : edges) {
    if (foreground[static_cast<std::size_t>(u)] != foreground[static_cast<std::size_t>(v)])
      energy += pairwise_coefficient;
  }
  return energy;
}

GrabCutResult grabcut_segment(const PointSet& object, std::size_t frame,
                              const std::vector<std::size_t>& seed,
                              const SegmentationConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  if (seed.empty()) fail(ErrorCode::Data, "grabcut needs a nonempty seed");

  GrabCutResult result;
  result.estimate.object_id = object.object_id;
  result.estimate.frame_index = frame;

  // Work over the valid points only; invalid descriptors are excluded.
  std::vector<std::size_t>& valid = result.valid_indices;
  std::vector<int> compact_of(object.points.size(), -1);
  for (std::size_t i = 0; i < object.points.size(); ++i) {
    if (object.points[i].valid) {
      compact_of[i] = static_cast<int>(valid.size());
      valid.push_back(i);
    }
  }
  const int n = static_cast<int>(valid.size());

  std::vector<bool> is_seed(n, false);
  int seed_count = 0;
  for (std::size_t s : seed) {
    if (s >= object.points.size()) fail(ErrorCode::Dimension, "seed index out of range");
    if (compact_of[s] >= 0 && !is_seed[compact_of[s]]) {
      is_seed[compact_of[s]] = true;
      ++seed_count;
    }
  }
  if (seed_count == 0) fail(ErrorCode::Data, "all seed points are invalid");
  if (seed_count >= n) {
    // Seeds cover every usable point; nothing to separate.
    result.degenerate = true;
    result.estimate.member_indices = valid;
    result.estimate.summary = summarize_part(object, result.estimate.member_indices);
    return result;
  }

  result.descriptor_rows.resize(n, kDescriptorDims);
  std::vector<Vec3> positions(n);
  for (int i = 0; i < n; ++i) {
    result.descriptor_rows.row(i) = descriptor_of(object.points[valid[i]]).transpose();
    positions[i] = object.points[valid[i]].position;
  }
  result.edges = knn_edges(positions, cfg.knn);

  std::vector<bool>& fg = result.foreground;
  fg.assign(is_seed.begin(), is_seed.end());

  Rng rng(derive_seed(rng_seed, "grabcut-gmm"));
  auto rows_of = [&](bool want_fg) {
    int count = 0;
    for (int i = 0; i < n; ++i) count += (fg[i] == want_fg);
    Eigen::MatrixXd rows(count, kDescriptorDims);
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (fg[i] == want_fg) rows.row(r++) = result.descriptor_rows.row(i);
    return rows;
  };

  result.fg_model = DiagonalGmm::fit(rows_of(true), cfg.gmm_components, rng);
  result.bg_model = DiagonalGmm::fit(rows_of(false), cfg.gmm_components, rng);

  const double kHardLink = 1e12;
  bool degenerate = false;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (iter > 0) {
      result.fg_model.refit(rows_of(true));
      result.bg_model.refit(rows_of(false));
    }

    MaxFlowGraph graph(n);
    for (int i = 0; i < n; ++i) {
      const auto row = result.descriptor_rows.row(i).transpose();
      const double u_fg = -result.fg_model.log_density(row);
      const double u_bg = -result.bg_model.log_density(row);
      const double shift = std::min(u_fg, u_bg);
      // Cutting the source link puts the point in the background, so the
      // source link carries the background cost. Seeds are uncuttable.
      graph.add_terminal(i, is_seed[i] ? kHardLink : u_bg - shift, u_fg - shift);
    }
    for (const auto& [u, v] : result.edges)
      graph.add_edge(u, v, cfg.pairwise_coefficient, cfg.pairwise_coefficient);

    graph.solve();
    std::vector<bool> new_fg(n);
    int fg_count = 0;
    for (int i = 0; i < n; ++i) {
      new_fg[i] = graph.on_source_side(i);
      fg_count += new_fg[i];
    }

    if (fg_count == n) {
      degenerate = true;
      break;
    }

    const bool changed = new_fg != fg;
    fg = std::move(new_fg);
    result.energy_history.push_back(
        segmentation_energy(result.descriptor_rows, result.edges, fg,
                            result.fg_model, result.bg_model, cfg.pairwise_coefficient));
    check_internal(result.energy_history.size() < 2 ||
                       result.energy_history.back() <=
                           result.energy_history[result.energy_history.size() - 2] +
                               1e-6 * (1.0 + std::abs(result.energy_history.back())),
                   "segmentation energy increased across an iteration");
    if (!changed) break;
  }

  if (degenerate) {
    result.degenerate = true;
    result.estimate.member_indices.clear();
    for (int i = 0; i < n; ++i)
      if (is_seed[i]) result.estimate.member_indices.push_back(valid[i]);
  } else {
    for (int i = 0; i < n; ++i)
      if (fg[i]) result.estimate.member_indices.push_back(valid[i]);
  }
  result.estimate.summary = summarize_part(object, result.estimate.member_indices);
  return result;
}

double bhattacharyya_kernel(const PartGaussian& p, const PartGaussian& q,
                            const KernelConfig& cfg) {
  cfg.validate();
  Eigen::Matrix<double, 6, 1> reg;
  reg << cfg.position_cov, cfg.position_cov, cfg.position_cov, cfg.normal_cov,
      cfg.normal_cov, cfg.normal_cov;

  Eigen::Matrix<double, 6, 6> cov_p = p.cov;
  Eigen::Matrix<double, 6, 6> cov_q = q.cov;
  cov_p.diagonal() += reg;
  cov_q.diagonal() += reg;
  const Eigen::Matrix<double, 6, 6> cov_avg = 0.5 * (cov_p + cov_q);

  Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt_avg(cov_avg);
  check_internal(llt_avg.info() == Eigen::Success,
                 "regularized part covariance must be positive definite");
  const Eigen::Matrix<double, 6, 1> diff = p.mean - q.mean;
  const double quad = diff.dot(llt_avg.solve(diff));

  auto log_det = [](const Eigen::Matrix<double, 6, 6>& m) {
    Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(m);
    check_internal(llt.info() == Eigen::Success, "covariance not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  const double log_det_avg = log_det(cov_avg);
  const double distance =
      0.125 * quad + 0.5 * (log_det_avg - 0.5 * (log_det(cov_p) + log_det(cov_q)));
  return std::exp(-distance);
}

double bhattacharyya_kernel(const PartEstimate& p, const PartEstimate& q,
                            const KernelConfig& cfg) {
  if (p.object_id != q.object_id)
    fail(ErrorCode::Data, "kernel compares parts of the same object only");
  return bhattacharyya_kernel(p.summary, q.summary, cfg);
}

std::vector<PartCluster> cluster_part_estimates(const PointSet& object,
                                                const std::vector<PartEstimate>& estimates,
                                                const KernelConfig& cfg,
                                                std::uint64_t seed) {
  if (estimates.empty()) fail(ErrorCode::Data, "no part estimates to cluster");
  const int n = static_cast<int>(estimates.size());
  for (const PartEstimate& e : estimates)
    if (e.object_id != object.object_id)
      fail(ErrorCode::Data, "estimate does not belong to this object");

  Eigen::MatrixXd kernel(n, n);
  for (int i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      kernel(i, j) = kernel(j, i) =
          bhattacharyya_kernel(estimates[i].summary, estimates[j].summary, cfg);
    }
  }

  const int max_clusters = std::min(8, n);
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> best_labels(n, 0);
  int best_count = 1;
  for (int c = 1; c <= max_clusters; ++c) {
    const std::vector<int> labels =
        spectral_cluster(kernel, c, derive_seed(seed, "part-clustering", c));
    double intra = 0.0, inter = 0.0;
    int intra_n = 0, inter_n = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (labels[i] == labels[j]) {
          intra += kernel(i, j);
          ++intra_n;
        } else {
          inter += kernel(i, j);
          ++inter_n;
        }
      }
    }
    const double score = (intra_n ? intra / intra_n : 0.0) -
                         (inter_n ? inter / inter_n : 0.0);
    if (score > best_score + 1e-12) {
      best_score = score;
      best_labels = labels;
      best_count = c;
    }
  }

  // Majority vote per cluster; a point joins the cluster where its vote
  // fraction is highest so the final parts stay disjoint.
  std::vector<std::map<std::size_t, int>> votes(best_count);
  std::vector<int> cluster_sizes(best_count, 0);
  for (int i = 0; i < n; ++i) {
    ++cluster_sizes[best_labels[i]];
    for (std::size_t idx : estimates[i].member_indices) ++votes[best_labels[i]][idx];
  }

  std::map<std::size_t, std::pair<int, double>> winner;  // point -> (cluster, fraction)
  for (int c = 0; c < best_count; ++c) {
    for (const auto& [idx, count] : votes[c]) {
      if (2 * count <= cluster_sizes[c]) continue;  // strict majority required
      const double fraction = static_cast<double>(count) / cluster_sizes[c];
      auto it = winner.find(idx);
      if (it == winner.end() || fraction > it->second.second)
        winner[idx] = {c, fraction};
    }
  }

  std::vector<std::vector<std::size_t>> members(best_count);
  for (const auto& [idx, win] : winner) members[win.first].push_back(idx);

  std::vector<PartCluster> out;
  for (int c = 0; c < best_count; ++c) {
    if (members[c].empty()) continue;
    PartCluster pc;
    pc.part = make_part(object, members[c]);
    pc.summary = summarize_part(object, pc.part.member_indices);
    out.push_back(std::move(pc));
  }
  return out;
}

MatchResult match_parts_across_demos(const std::vector<std::vector<PartCluster>>& per_demo,
                                     const KernelConfig& cfg) {
  if (per_demo.empty()) fail(ErrorCode::Data, "no demonstrations to match");

  std::map<std::size_t, int> count_freq;
  for (const auto& parts : per_demo) ++count_freq[parts.size()];
  std::size_t mode = 0;
  int best_freq = -1;
  for (const auto& [count, freq] : count_freq) {
    if (freq > best_freq) {
      best_freq = freq;
      mode = count;
    }
  }

  MatchResult result;
  bool found = false;
  for (std::size_t d = 0; d < per_demo.size(); ++d) {
    if (per_demo[d].size() == mode) {
      result.prototype_index = d;
      found = true;
      break;
    }
  }
  check_internal(found, "the modal part count is attained by some demonstration");

  const std::vector<PartCluster>& proto = per_demo[result.prototype_index];
  result.aligned.resize(per_demo.size());

  for (std::size_t d = 0; d < per_demo.size(); ++d) {
    const std::vector<PartCluster>& parts = per_demo[d];
    std::vector<PartCluster>& aligned = result.aligned[d];
    aligned.resize(mode);
    if (d == result.prototype_index) {
      aligned = proto;
      continue;
    }

    Eigen::MatrixXd sim(mode, parts.size());
    for (std::size_t s = 0; s < mode; ++s)
      for (std::size_t p = 0; p < parts.size(); ++p)
        sim(s, p) = bhattacharyya_kernel(proto[s].summary, parts[p].summary, cfg);

    std::vector<bool> slot_done(mode, false), part_used(parts.size(), false);
    const std::size_t assignments = std::min(mode, parts.size());
    for (std::size_t a = 0; a < assignments; ++a) {
      double best = -1.0;
      std::size_t bs = 0, bp = 0;
      for (std::size_t s = 0; s < mode; ++s) {
        if (slot_done[s]) continue;
        for (std::size_t p = 0; p < parts.size(); ++p) {
          if (part_used[p]) continue;
          if (sim(s, p) > best) {
            best = sim(s, p);
            bs = s;
            bp = p;
          }
        }
      }
      aligned[bs] = parts[bp];
      slot_done[bs] = true;
      part_used[bp] = true;
    }

    // Missing parts: reuse the most similar part of this demo, or fall
    // back to the prototype's own part, and flag the substitution.
    for (std::size_t s = 0; s < mode; ++s) {
      if (slot_done[s]) continue;
      if (!parts.empty()) {
        std::size_t bp = 0;
        double best = -1.0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
          if (sim(s, p) > best) {
            best = sim(s, p);
            bp = p;
          }
        }
        aligned[s] = parts[bp];
      } else {
        aligned[s] = proto[s];
      }
      aligned[s].fill_flagged = true;
    }
  }
  return result;
}

std::vector<std::size_t> subsample_frames(const std::vector<double>& pose_times,
                                          double hz) {
  if (pose_times.empty()) fail(ErrorCode::Data, "no pose times to subsample");
  std::vector<std::size_t> frames;
  const double period = 1.0 / hz;
  double next_tick = pose_times.front();
  for (std::size_t i = 0; i < pose_times.size(); ++i) {
    if (pose_times[i] + 1e-9 >= next_tick) {
      frames.push_back(i);
      next_tick = pose_times[i] + period;
    }
  }
  return frames;
}

std::vector<std::vector<PartCluster>> extract_parts(
    const std::vector<PointSet>& objects, const InteractionConfig& icfg,
    const SegmentationConfig& scfg, const KernelConfig& kcfg, std::uint64_t seed) {
  icfg.validate();
  scfg.validate();
  kcfg.validate();

  std::vector<std::vector<PartEstimate>> estimates(objects.size());
  for (std::size_t a = 0; a < objects.size(); ++a) {
    const auto frames = subsample_frames(objects[a].pose_times, icfg.frame_subsample_hz);
    for (std::size_t b = 0; b < objects.size(); ++b) {
      if (a == b) continue;
      for (std::size_t f : frames) {
        if (f >= objects[b].pose_sequence.size()) continue;
        const auto seeds = detect_interacting_points(objects[a], objects[b], f, icfg);
        if (seeds.empty()) continue;
        const auto cut = grabcut_segment(
            objects[a], f, seeds, scfg,
            derive_seed(seed, "grabcut", (a * objects.size() + b) * 104729 + f));
        estimates[a].push_back(cut.estimate);
      }
    }
  }

  std::vector<std::vector<PartCluster>> parts(objects.size());
  for (std::size_t a = 0; a < objects.size(); ++a) {
    if (estimates[a].empty()) continue;
    parts[a] = cluster_part_estimates(objects[a], estimates[a], kcfg,
                                      derive_seed(seed, "cluster", a));
  }
  return parts;
}

}  // namespace relfeat
