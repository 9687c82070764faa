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
#include <string>

#include "json.hpp"

namespace mvp {

enum class QueryMode { Comma, Instruction, ImStart, ImEnd };

/// How the final point is chosen from the multi-view predictions.
enum class Aggregation { Cluster, Average, Random };

/// Auto follows the resolution rule (attention crops at or above the
/// low-res threshold, border padding below it).
enum class ViewStrategy { Auto, Attention, BorderPad };

struct MvpConfig {
  int view_w = 1280;
  int view_h = 720;
  int k = 100;
  int m = 4;
  double alpha = 2.0;
  double tau = 14.0;
  int attn_layer = 20;
  QueryMode query_mode = QueryMode::Comma;
  int lowres_threshold = 720;
  int border_px = 28;

  int max_inflight = 8;
  Aggregation aggregation = Aggregation::Cluster;
  ViewStrategy view_strategy = ViewStrategy::Auto;
  std::uint64_t seed = 0;
  nlohmann::json decode_params = {{"temperature", 0.0}};

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;
};

const char* to_string(QueryMode q);
const char* to_string(Aggregation a);
const char* to_string(ViewStrategy v);
QueryMode query_mode_from_string(const std::string& s);
Aggregation aggregation_from_string(const std::string& s);
ViewStrategy view_strategy_from_string(const std::string& s);

nlohmann::ordered_json to_json(const MvpConfig& cfg);
/// Missing keys keep their defaults; unknown keys are ignored.
MvpConfig config_from_json(const nlohmann::json& j, MvpConfig base = {});

}  // namespace mvp
