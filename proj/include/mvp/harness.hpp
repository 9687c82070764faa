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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvp/backend/backend.hpp"
#include "mvp/config.hpp"
#include "mvp/pipeline.hpp"

namespace mvp {

struct GroundingSample {
  std::string id;
  std::filesystem::path image_path;
  std::string instruction;
  Rect gt_bbox;
  std::map<std::string, std::string> tags;
  ImageDims dims;
};

struct DatasetReject {
  int line = 0;
  std::string reason;
};

struct Dataset {
  std::vector<GroundingSample> samples;
  std::vector<DatasetReject> rejects;
};

/// JSONL, one object per line:
///   {"id", "image", "instruction", "bbox": [x, y, w, h], "tags": {...},
///    "width", "height"}
/// Image paths are relative to the dataset file. width/height are optional
/// when the image is a readable PNG. Bad lines land in `rejects`.
Dataset load_dataset(const std::filesystem::path& path);

/// ScreenSpot-Pro style annotation array (img_filename, bbox as x1,y1,x2,y2,
/// img_size, instruction, plus application/platform/ui_type/group tags).
Dataset load_screenspot_pro(const std::filesystem::path& annotation_json,
                            const std::filesystem::path& image_root);

void save_dataset(std::span<const GroundingSample> samples, const std::filesystem::path& path);

struct SyntheticSpec {
  int n = 500;
  ImageDims dims{3840, 2160};
  /// Target side lengths are drawn uniformly from [min_target, max_target].
  int min_target = 8;
  int max_target = 8;
  std::uint64_t seed = 0;
};

/// Samples with random target boxes and no image files, for mock backends.
std::vector<GroundingSample> synthetic_dataset(const SyntheticSpec& spec);

enum class EvalMode { MVP, Single, AvgAblation, RandomAblation, NoResizeAblation, BorderPadAblation };

const char* to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& s);

/// The pipeline configuration a mode runs with.
MvpConfig config_for_mode(MvpConfig cfg, EvalMode mode);

struct SampleRecord {
  std::string id;
  std::optional<Point> final;
  bool hit = false;
  /// Proposed views, not counting the original.
  int n_views = 0;
  std::vector<int> cluster_sizes;
  /// Per canonical prediction slot (original, then views): 1 hit, 0 miss,
  /// -1 failed call.
  std::vector<int> slot_hits;
  /// Whether any proposed view fully contains the target; unset without views.
  std::optional<bool> contains_gt;
  std::map<std::string, std::string> tags;
  std::vector<std::string> failures;
};

struct PassAtN {
  int n = 0;
  double rate = 0;
};

struct GroupAccuracy {
  std::string group;
  int n = 0;
  int hits = 0;
  double accuracy = 0;
};

struct EvalReport {
  std::string mode;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;
  std::vector<SampleRecord> records;

  // Aggregates, derived from records by recompute_aggregates().
  GroupAccuracy overall;
  std::vector<GroupAccuracy> per_tag;
  std::optional<double> containing_ratio;
  std::vector<int> pass_at_n_requested;
  std::vector<PassAtN> pass_at_n;
};

void recompute_aggregates(EvalReport& report);

struct HarnessOptions {
  int workers = 4;
  /// Snapshot of the backend settings, embedded in reports.
  nlohmann::ordered_json backend = nlohmann::ordered_json::object();
};

/// Loads pixels when the backend needs them, otherwise a synthetic
/// screenshot keyed on the sample id.
Screenshot load_screenshot(const GroundingSample& sample, const GroundingBackend& backend);
std::uint64_t sample_call_idx(const GroundingSample& sample);

EvalReport evaluate(std::span<const GroundingSample> samples, const GroundingBackend& backend,
                    const MvpConfig& cfg, EvalMode mode, const HarnessOptions& opts = {});

/// pass@N for each requested N from a single run with m = max(N) - 1.
EvalReport pass_at_n(std::span<const GroundingSample> samples, const GroundingBackend& backend,
                     const MvpConfig& cfg, std::vector<int> n_values,
                     const HarnessOptions& opts = {});

struct PerturbationOptions {
  int border_px = 28;
  /// Upper edges on image height; one extra open bin above the last edge.
  std::vector<double> resolution_edges{1080, 1440, 2160};
  /// Upper edges on target area in px^2.
  std::vector<double> area_edges{400, 1600, 6400};
};

struct PerturbationRecord {
  std::string id;
  Point original;
  Point perturbed;
  double distance = 0;
  bool hit_original = false;
  bool hit_perturbed = false;
  int image_height = 0;
  std::int64_t gt_area = 0;
};

struct DistanceBin {
  std::string label;
  int count = 0;
  double mean_distance = 0;
};

struct PerturbationReport {
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;
  std::vector<PerturbationRecord> records;
  std::vector<std::pair<std::string, std::string>> failures;

  double mean_shift = 0;
  int correct_to_correct = 0;
  int correct_to_wrong = 0;
  int wrong_to_correct = 0;
  int wrong_to_wrong = 0;
  /// Fraction of originally correct predictions that became wrong.
  double correct_to_wrong_rate = 0;
  /// Fraction of originally wrong predictions that became correct.
  double wrong_to_correct_rate = 0;
  std::vector<DistanceBin> resolution_bins;
  std::vector<DistanceBin> area_bins;
};

/// Single-image inference on each screenshot and on the same screenshot with
/// a border on all four sides, comparing the two full-frame predictions.
PerturbationReport perturbation_study(std::span<const GroundingSample> samples,
                                      const GroundingBackend& backend, const MvpConfig& cfg,
                                      const PerturbationOptions& popts = {},
                                      const HarnessOptions& opts = {});

enum class ReportFormat { Json, Csv };

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::ordered_json& j);
std::string to_csv(const EvalReport& report);
nlohmann::ordered_json to_json(const PerturbationReport& report);
std::string to_csv(const PerturbationReport& report);

void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format);
void emit_report(const PerturbationReport& report, const std::filesystem::path& path,
                 ReportFormat format);
/// ".csv" selects CSV, anything else JSON.
ReportFormat format_for_path(const std::filesystem::path& path);

}  // namespace mvp
