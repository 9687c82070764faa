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

#include "mvp/clustering.hpp"

#include "mvp/rng.hpp"

namespace mvp {

Eigen::Matrix2Xd full_points(std::span<const Prediction> preds) {
  Eigen::Matrix2Xd pts(2, preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) pts.col(i) = preds[i].point_full.xy;
  return pts;
}

ClusterSet cluster_predictions(std::span<const Prediction> preds, double tau) {
  return cluster_points(full_points(preds), tau);
}

Point decide(const ClusterSet& cs, std::span<const Prediction> preds, std::span<const View> views) {
  if (cs.input_order.size() != preds.size()) {
    throw Error(ErrorCode::InvalidArgument, "cluster set does not match predictions");
  }
  std::vector<int> ranks(preds.size(), 0);
  int original = -1;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (const View& v : views) {
      if (v.id != preds[i].view_id) continue;
      if (v.source == ViewSource::Original) {
        original = static_cast<int>(i);
      } else {
        ranks[i] = v.rank;
      }
    }
  }
  const auto& winner = cs.clusters[select_cluster(cs, std::span<const int>(ranks), original)];
  return Point::full(winner.centroid.x(), winner.centroid.y());
}

Point aggregate_average(std::span<const Prediction> preds) {
  if (preds.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to average");
  const Eigen::Vector2d mean = full_points(preds).rowwise().mean();
  return Point::full(mean.x(), mean.y());
}

Point aggregate_random(std::span<const Prediction> preds, std::uint64_t seed) {
  if (preds.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to choose from");
  KeyedRng rng({seed, 0x52414e44ULL});
  return preds[rng.uniform_index(preds.size())].point_full;
}

}  // namespace mvp
