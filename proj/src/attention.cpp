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

#include "mvp/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mvp {

AttentionScores mean_heads(const RawAttentionRows& raw) {
  if (raw.heads() == 0) throw Error(ErrorCode::InvalidArgument, "attention has no heads");
  if (raw.tokens() != raw.grid.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "attention row length " + std::to_string(raw.tokens()) +
                    " does not match grid of " + std::to_string(raw.grid.size()) + " tokens");
  }

  Eigen::MatrixXd probs(raw.heads(), raw.tokens());
  if (raw.kind == AttentionKind::Logits) {
    for (int h = 0; h < raw.heads(); ++h) probs.row(h) = softmax_row(raw.values.row(h)).transpose();
  } else {
    for (int h = 0; h < raw.heads(); ++h) {
      const auto row = raw.values.row(h);
      if (!row.allFinite() || (row.array() < 0).any() || std::abs(row.sum() - 1.0) > 1e-4) {
        throw Error(ErrorCode::InvalidArgument,
                    "head " + std::to_string(h) + " is not a probability row");
      }
    }
    probs = raw.values;
  }

  AttentionScores out;
  out.grid = raw.grid;
  out.scores = probs.colwise().mean().transpose();
  return out;
}

std::vector<int> top_k_tokens(const AttentionScores& scores, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const int n = static_cast<int>(scores.scores.size());
  const int take = std::min(k, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const auto by_score = [&](int a, int b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), by_score);
  idx.resize(take);
  return idx;
}

const char* to_string(AttentionKind kind) {
  return kind == AttentionKind::Logits ? "logits" : "probabilities";
}

AttentionKind attention_kind_from_string(const std::string& s) {
  if (s == "logits") return AttentionKind::Logits;
  if (s == "probabilities") return AttentionKind::Probabilities;
  throw Error(ErrorCode::Protocol, "unknown attention kind '" + s + "'");
}

}  // namespace mvp
