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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvp/backend/backend.hpp"
#include "mvp/clustering.hpp"
#include "mvp/config.hpp"

namespace mvp {

/// A screenshot to ground against. Pixels are optional: backends that do not
/// need them (the mock) run on dimensions and a content key alone.
struct Screenshot {
  ImageDims dims;
  std::shared_ptr<const Image> pixels;
  std::uint64_t content_key = 0;

  static Screenshot from_image(Image img);
  static Screenshot from_png(const std::filesystem::path& path);
  static Screenshot synthetic(ImageDims dims, std::uint64_t content_key);
};

struct StageTimings {
  double attention_ms = 0;
  double proposal_ms = 0;
  double grounding_ms = 0;
  double clustering_ms = 0;
};

struct ViewFailure {
  int view_id = 0;
  ErrorCode code = ErrorCode::Transport;
  std::string message;
};

struct MvpResult {
  Point final;
  /// Surviving predictions in canonical order: original, then views by rank.
  std::vector<Prediction> predictions;
  /// All issued views; index 0 is the original.
  std::vector<View> views;
  ClusterSet clusters;
  StageTimings timings;
  std::vector<ViewFailure> failures;
  /// Set when attention was unavailable and border padding was used instead.
  bool attention_fallback = false;
};

/// Content key of a view: the screenshot key mixed with the view geometry.
std::uint64_t view_content_key(const Screenshot& shot, const View& view);

/// Runs one view through the backend and maps the result to the full frame.
Prediction ground_view(const Screenshot& shot, const std::string& instruction,
                       std::optional<Rect> gt, const GroundingBackend& backend,
                       const MvpConfig& cfg, const View& view, std::uint64_t call_idx);

/// Chooses views for a screenshot: attention crops, or border padding below
/// the low-res threshold or when attention is unavailable.
std::vector<View> select_views(const Screenshot& shot, const std::string& instruction,
                               std::optional<Rect> gt, const GroundingBackend& backend,
                               const MvpConfig& cfg, std::uint64_t call_idx,
                               bool* attention_fallback = nullptr,
                               StageTimings* timings = nullptr);

/// End-to-end multi-view prediction for one screenshot. Backend calls fan out
/// concurrently (bounded by cfg.max_inflight); results are put back in
/// canonical order before aggregation. Throws AllBackendCallsFailed when no
/// view produced a prediction.
MvpResult run_mvp(const Screenshot& shot, const std::string& instruction, std::optional<Rect> gt,
                  const GroundingBackend& backend, const MvpConfig& cfg,
                  std::uint64_t call_idx = 0);

nlohmann::ordered_json to_json(const View& v);
nlohmann::ordered_json to_json(const MvpResult& r);

/// Runs fn(i) for i in [0, n) on up to `limit` threads.
void parallel_for(std::size_t n, std::size_t limit, const std::function<void(std::size_t)>& fn);

}  // namespace mvp
