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

#include "mvp/config.hpp"

#include "mvp/error.hpp"

namespace mvp {

void MvpConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  require(view_w >= 1 && view_h >= 1, "view size must be positive");
  require(m >= 0, "m must be non-negative");
  require(k >= 1, "k must be at least 1");
  require(tau > 0, "tau must be positive");
  require(alpha >= 1, "alpha must be at least 1");
  require(attn_layer >= 0, "attention layer must be non-negative");
  require(border_px >= 0, "border must be non-negative");
  require(max_inflight >= 1, "max_inflight must be at least 1");
}

const char* to_string(QueryMode q) {
  switch (q) {
    case QueryMode::Comma: return "comma";
    case QueryMode::Instruction: return "instruction";
    case QueryMode::ImStart: return "im_start";
    case QueryMode::ImEnd: return "im_end";
  }
  return "comma";
}

const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Cluster: return "cluster";
    case Aggregation::Average: return "average";
    case Aggregation::Random: return "random";
  }
  return "cluster";
}

const char* to_string(ViewStrategy v) {
  switch (v) {
    case ViewStrategy::Auto: return "auto";
    case ViewStrategy::Attention: return "attention";
    case ViewStrategy::BorderPad: return "border_pad";
  }
  return "auto";
}

QueryMode query_mode_from_string(const std::string& s) {
  for (auto q : {QueryMode::Comma, QueryMode::Instruction, QueryMode::ImStart, QueryMode::ImEnd})
    if (s == to_string(q)) return q;
  throw Error(ErrorCode::InvalidArgument, "unknown query mode '" + s + "'");
}

Aggregation aggregation_from_string(const std::string& s) {
  for (auto a : {Aggregation::Cluster, Aggregation::Average, Aggregation::Random})
    if (s == to_string(a)) return a;
  throw Error(ErrorCode::InvalidArgument, "unknown aggregation '" + s + "'");
}

ViewStrategy view_strategy_from_string(const std::string& s) {
  for (auto v : {ViewStrategy::Auto, ViewStrategy::Attention, ViewStrategy::BorderPad})
    if (s == to_string(v)) return v;
  throw Error(ErrorCode::InvalidArgument, "unknown view strategy '" + s + "'");
}

nlohmann::ordered_json to_json(const MvpConfig& cfg) {
  nlohmann::ordered_json j;
  j["view_w"] = cfg.view_w;
  j["view_h"] = cfg.view_h;
  j["k"] = cfg.k;
  j["m"] = cfg.m;
  j["alpha"] = cfg.alpha;
  j["tau"] = cfg.tau;
  j["attn_layer"] = cfg.attn_layer;
  j["query_mode"] = to_string(cfg.query_mode);
  j["lowres_threshold"] = cfg.lowres_threshold;
  j["border_px"] = cfg.border_px;
  j["max_inflight"] = cfg.max_inflight;
  j["aggregation"] = to_string(cfg.aggregation);
  j["view_strategy"] = to_string(cfg.view_strategy);
  j["seed"] = cfg.seed;
  j["decode_params"] = cfg.decode_params;
  return j;
}

MvpConfig config_from_json(const nlohmann::json& j, MvpConfig cfg) {
  try {
    cfg.view_w = j.value("view_w", cfg.view_w);
    cfg.view_h = j.value("view_h", cfg.view_h);
    cfg.k = j.value("k", cfg.k);
    cfg.m = j.value("m", cfg.m);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.tau = j.value("tau", cfg.tau);
    cfg.attn_layer = j.value("attn_layer", cfg.attn_layer);
    if (j.contains("query_mode")) cfg.query_mode = query_mode_from_string(j.at("query_mode"));
    cfg.lowres_threshold = j.value("lowres_threshold", cfg.lowres_threshold);
    cfg.border_px = j.value("border_px", cfg.border_px);
    cfg.max_inflight = j.value("max_inflight", cfg.max_inflight);
    if (j.contains("aggregation")) cfg.aggregation = aggregation_from_string(j.at("aggregation"));
    if (j.contains("view_strategy"))
      cfg.view_strategy = view_strategy_from_string(j.at("view_strategy"));
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("decode_params")) cfg.decode_params = j.at("decode_params");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
  }
  return cfg;
}

}  // namespace mvp
