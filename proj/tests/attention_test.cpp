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

#include <cmath>

#include "doctest.h"
#include "mvp/attention.hpp"
#include "mvp/rng.hpp"

using namespace mvp;

TEST_CASE("softmax_row examples") {
  const Eigen::VectorXd uniform = softmax_row(Eigen::Vector3d(0, 0, 0));
  for (int i = 0; i < 3; ++i) CHECK(uniform[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const Eigen::VectorXd half = softmax_row(Eigen::Vector3d(std::log(2.0), 0, 0));
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(half[2] == doctest::Approx(0.25).epsilon(1e-12));

  const Eigen::VectorXd big = softmax_row(Eigen::Vector2d(1000, 0));
  CHECK(std::abs(big[0] - 1.0) <= 1e-9);
  CHECK(std::abs(big[1]) <= 1e-9);
  CHECK(big.allFinite());
}

TEST_CASE("softmax_row errors") {
  CHECK_THROWS_AS(softmax_row(Eigen::VectorXd()), Error);
  CHECK_THROWS_AS(softmax_row(Eigen::Vector2d(0, INFINITY)), Error);
}

TEST_CASE("softmax_row is shift invariant, normalized and order preserving") {
  KeyedRng rng({11});
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + int(rng.uniform_index(50));
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 40.0 * (rng.uniform01() - 0.5);
    const double c = 500.0 * (rng.uniform01() - 0.5);
    const Eigen::VectorXd a = softmax_row(v);
    const Eigen::VectorXd b = softmax_row((v.array() + c).matrix());
    CHECK(std::abs(a.sum() - 1.0) <= 1e-9);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    for (int i = 0; i + 1 < n; ++i) {
      if (v[i] < v[i + 1]) CHECK(a[i] <= a[i + 1]);
    }
  }
}

TEST_CASE("mean_heads averages probability rows") {
  RawAttentionRows raw;
  raw.grid = {1, 3, 28, 28};
  raw.values.resize(2, 3);
  raw.values << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25;
  const AttentionScores s = mean_heads(raw);
  CHECK(s.scores[0] == doctest::Approx(0.375));
  CHECK(s.scores[1] == doctest::Approx(0.375));
  CHECK(s.scores[2] == doctest::Approx(0.25));
  CHECK(s.grid == raw.grid);

  RawAttentionRows one = raw;
  one.values = raw.values.topRows(1);
  CHECK(mean_heads(one).scores == Eigen::VectorXd(raw.values.row(0).transpose()));

  RawAttentionRows sym;
  sym.grid = {2, 2, 10, 10};
  sym.values = Eigen::MatrixXd::Constant(3, 4, 0.25);
  CHECK((mean_heads(sym).scores.array() == 0.25).all());
}

TEST_CASE("mean_heads softmaxes logits first") {
  RawAttentionRows raw;
  raw.grid = {1, 3, 28, 28};
  raw.kind = AttentionKind::Logits;
  raw.values.resize(2, 3);
  raw.values << std::log(2.0), 0, 0, 0, std::log(2.0), 0;
  const AttentionScores s = mean_heads(raw);
  CHECK(s.scores[0] == doctest::Approx(0.375));
  CHECK(s.scores[1] == doctest::Approx(0.375));
  CHECK(s.scores[2] == doctest::Approx(0.25));
  CHECK(std::abs(s.scores.sum() - 1.0) <= 1e-6);
}

TEST_CASE("mean_heads errors") {
  RawAttentionRows raw;
  raw.grid = {1, 3, 28, 28};
  CHECK_THROWS_AS(mean_heads(raw), Error);  // no heads
  raw.values = Eigen::MatrixXd::Constant(1, 4, 0.25);
  CHECK_THROWS_AS(mean_heads(raw), Error);  // grid mismatch
  raw.values = Eigen::MatrixXd::Constant(1, 3, 0.5);
  CHECK_THROWS_AS(mean_heads(raw), Error);  // rows do not sum to 1
}

TEST_CASE("top_k_tokens") {
  AttentionScores s;
  s.grid = {1, 4, 1, 1};
  s.scores = Eigen::Vector4d(0.1, 0.4, 0.2, 0.3);
  CHECK(top_k_tokens(s, 2) == std::vector<int>{1, 3});
  CHECK(top_k_tokens(s, 100) == std::vector<int>{1, 3, 2, 0});

  AttentionScores tie;
  tie.grid = {1, 3, 1, 1};
  tie.scores = Eigen::Vector3d(0.3, 0.3, 0.4);
  CHECK(top_k_tokens(tie, 2) == std::vector<int>{2, 0});
  CHECK(top_k_tokens(tie, 3) == std::vector<int>{2, 0, 1});
  CHECK(top_k_tokens(tie, 2) == top_k_tokens(tie, 2));

  CHECK_THROWS_AS(top_k_tokens(s, 0), Error);
}
