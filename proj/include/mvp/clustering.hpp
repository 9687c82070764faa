// Copyright 2026 The MVP Grounding Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mvp/error.hpp"
#include "mvp/geometry.hpp"

namespace mvp {

struct Prediction {
  Point point_full;
  Point point_view;
  int view_id = 0;
  std::string raw_text;
};

template <typename Scalar>
struct BasicCluster {
  std::vector<int> members;
  Eigen::Matrix<Scalar, 2, 1> centroid;
};

/// One absorption step: point `index` joined `cluster` while its centroid was
/// `centroid_before`, at Euclidean distance `distance` from it.
template <typename Scalar>
struct BasicAbsorption {
  int cluster = 0;
  int index = 0;
  Eigen::Matrix<Scalar, 2, 1> centroid_before;
  Scalar distance = 0;
};

template <typename Scalar>
struct BasicClusterSet {
  std::vector<BasicCluster<Scalar>> clusters;
  std::vector<int> input_order;
  std::vector<BasicAbsorption<Scalar>> trace;

  /// Cluster index owning each point.
  std::vector<int> labels() const {
    std::vector<int> out(input_order.size(), -1);
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (int i : clusters[c].members) out[i] = static_cast<int>(c);
    return out;
  }
};

using Cluster = BasicCluster<double>;
using ClusterSet = BasicClusterSet<double>;

/// Greedy threshold clustering of a 2 x n point matrix in column order.
///
/// The first unassigned point seeds a cluster. Unassigned points are swept in
/// order; a point within `tau` of the current centroid joins and the centroid
/// is recomputed immediately. Sweeps repeat until one absorbs nothing, then
/// the next cluster is opened.
template <typename Derived>
BasicClusterSet<typename Derived::Scalar> cluster_points(const Eigen::MatrixBase<Derived>& pts,
                                                         typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  static_assert(Derived::RowsAtCompileTime == 2 || Derived::RowsAtCompileTime == Eigen::Dynamic);
  const int n = static_cast<int>(pts.cols());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nothing to cluster");
  if (pts.rows() != 2) throw Error(ErrorCode::InvalidArgument, "points must be 2 x n");
  if (!(tau > 0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");

  BasicClusterSet<Scalar> out;
  out.input_order.resize(n);
  for (int i = 0; i < n; ++i) out.input_order[i] = i;

  std::vector<int> unassigned(out.input_order);
  while (!unassigned.empty()) {
    BasicCluster<Scalar> cluster;
    cluster.members.push_back(unassigned.front());
    unassigned.erase(unassigned.begin());
    Vec2 sum = pts.col(cluster.members.front());
    const int cluster_id = static_cast<int>(out.clusters.size());

    bool grew = true;
    while (grew) {
      grew = false;
      for (auto it = unassigned.begin(); it != unassigned.end();) {
        const Vec2 centroid = sum / Scalar(cluster.members.size());
        const Scalar dist = (pts.col(*it) - centroid).norm();
        if (dist <= tau) {
          out.trace.push_back({cluster_id, *it, centroid, dist});
          cluster.members.push_back(*it);
          sum += pts.col(*it);
          it = unassigned.erase(it);
          grew = true;
        } else {
          ++it;
        }
      }
    }
    cluster.centroid = sum / Scalar(cluster.members.size());
    out.clusters.push_back(std::move(cluster));
  }
  return out;
}

/// Index of the winning cluster: largest, then highest summed view rank, then
/// the one holding `original_index` (pass -1 for none), then earliest seed.
template <typename Scalar>
int select_cluster(const BasicClusterSet<Scalar>& cs, std::span<const int> ranks,
                   int original_index) {
  auto rank_sum = [&](const BasicCluster<Scalar>& c) {
    long total = 0;
    for (int i : c.members) total += ranks[i];
    return total;
  };
  auto has_original = [&](const BasicCluster<Scalar>& c) {
    for (int i : c.members)
      if (i == original_index) return true;
    return false;
  };
  int best = 0;
  for (int c = 1; c < static_cast<int>(cs.clusters.size()); ++c) {
    const auto& a = cs.clusters[c];
    const auto& b = cs.clusters[best];
    if (a.members.size() != b.members.size()) {
      if (a.members.size() > b.members.size()) best = c;
      continue;
    }
    if (rank_sum(a) != rank_sum(b)) {
      if (rank_sum(a) > rank_sum(b)) best = c;
      continue;
    }
    if (has_original(a) && !has_original(b)) best = c;
  }
  return best;
}

/// Stacks full-frame prediction points as a 2 x n matrix.
Eigen::Matrix2Xd full_points(std::span<const Prediction> preds);

ClusterSet cluster_predictions(std::span<const Prediction> preds, double tau);

/// Final point: centroid of the cluster picked by select_cluster, with ranks
/// looked up from the views by prediction view id (the original view has
/// rank 0).
Point decide(const ClusterSet& cs, std::span<const Prediction> preds, std::span<const View> views);

Point aggregate_average(std::span<const Prediction> preds);

/// Uniform pick under a SplitMix64-seeded mt19937_64 stream.
Point aggregate_random(std::span<const Prediction> preds, std::uint64_t seed);

}  // namespace mvp
