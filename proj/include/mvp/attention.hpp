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

#include <vector>

#include <Eigen/Core>

#include "mvp/error.hpp"
#include "mvp/geometry.hpp"

namespace mvp {

enum class AttentionKind { Logits, Probabilities };

/// Per-head attention rows of one query token against the visual tokens,
/// stored heads x tokens.
struct RawAttentionRows {
  PatchGrid grid;
  int model_dim = 0;
  AttentionKind kind = AttentionKind::Probabilities;
  Eigen::MatrixXd values;

  int heads() const { return static_cast<int>(values.rows()); }
  int tokens() const { return static_cast<int>(values.cols()); }
};

struct AttentionScores {
  PatchGrid grid;
  Eigen::VectorXd scores;
};

/// Numerically stable softmax of one row (max-subtracted).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax_row(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  if (logits.size() == 0) throw Error(ErrorCode::InvalidArgument, "softmax of an empty row");
  if (!logits.allFinite()) throw Error(ErrorCode::InvalidArgument, "softmax input is not finite");
  const auto flat = logits.reshaped();
  const Scalar peak = flat.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = (flat.array() - peak).exp().matrix();
  out /= out.sum();
  return out;
}

AttentionScores mean_heads(const RawAttentionRows& raw);

/// Indices of the k highest scores, descending; equal scores keep ascending
/// token order.
std::vector<int> top_k_tokens(const AttentionScores& scores, int k);

const char* to_string(AttentionKind kind);
AttentionKind attention_kind_from_string(const std::string& s);

}  // namespace mvp
