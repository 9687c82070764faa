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

#include "mvp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "mvp/rng.hpp"
#include "mvp/view_proposal.hpp"

namespace mvp {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Screenshot Screenshot::from_image(Image img) {
  Screenshot s;
  s.dims = img.dims;
  s.content_key = fingerprint(img);
  s.pixels = std::make_shared<const Image>(std::move(img));
  return s;
}

Screenshot Screenshot::from_png(const std::filesystem::path& path) {
  return from_image(load_png(path));
}

Screenshot Screenshot::synthetic(ImageDims dims, std::uint64_t content_key) {
  Screenshot s;
  s.dims = dims;
  s.content_key = content_key;
  return s;
}

std::uint64_t view_content_key(const Screenshot& shot, const View& view) {
  return mix_key({shot.content_key, std::uint64_t(view.rect.x), std::uint64_t(view.rect.y),
                  std::uint64_t(view.rect.w), std::uint64_t(view.rect.h),
                  std::uint64_t(std::llround(view.alpha * 1e6)), std::uint64_t(view.pad.left),
                  std::uint64_t(view.pad.top), std::uint64_t(view.pad.right),
                  std::uint64_t(view.pad.bottom)});
}

void parallel_for(std::size_t n, std::size_t limit, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(n, std::max<std::size_t>(1, limit));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Prediction ground_view(const Screenshot& shot, const std::string& instruction,
                       std::optional<Rect> gt, const GroundingBackend& backend,
                       const MvpConfig& cfg, const View& view, std::uint64_t call_idx) {
  GroundingRequest req;
  req.instruction = instruction;
  req.decode_params = cfg.decode_params;
  req.context = {view, shot.dims, gt, call_idx, view_content_key(shot, view)};
  if (backend.needs_pixels()) {
    if (!shot.pixels) throw Error(ErrorCode::InvalidArgument, "backend needs screenshot pixels");
    req.image = view.source == ViewSource::Original
                    ? shot.pixels
                    : std::make_shared<const Image>(materialize_view(*shot.pixels, view));
  }
  GroundingReply reply = backend.ground(req);
  Prediction pred;
  pred.view_id = view.id;
  pred.point_view = reply.parsed;
  pred.point_full = view_to_full(reply.parsed, view);
  pred.raw_text = std::move(reply.raw_text);
  if (!pred.point_full.xy.allFinite()) {
    throw Error(ErrorCode::NoCoordinateFound, "non-finite coordinate");
  }
  return pred;
}

std::vector<View> select_views(const Screenshot& shot, const std::string& instruction,
                               std::optional<Rect> gt, const GroundingBackend& backend,
                               const MvpConfig& cfg, std::uint64_t call_idx,
                               bool* attention_fallback, StageTimings* timings) {
  if (attention_fallback) *attention_fallback = false;
  if (cfg.m == 0) return {};

  auto padded = [&] {
    auto views = border_pad_views(shot.dims, cfg);
    views.resize(std::min<std::size_t>(views.size(), std::size_t(cfg.m)));
    return views;
  };
  const bool lowres = shot.dims.min_side() < cfg.lowres_threshold;
  if (cfg.view_strategy == ViewStrategy::BorderPad ||
      (cfg.view_strategy == ViewStrategy::Auto && lowres)) {
    return padded();
  }

  AttentionRequest req;
  req.instruction = instruction;
  req.layer = cfg.attn_layer;
  req.query_mode = cfg.query_mode;
  req.context = {original_view(shot.dims), shot.dims, gt, call_idx, shot.content_key};
  if (backend.needs_pixels()) {
    if (!shot.pixels) throw Error(ErrorCode::InvalidArgument, "backend needs screenshot pixels");
    req.image = shot.pixels;
  }

  const auto t0 = Clock::now();
  RawAttentionRows raw;
  try {
    raw = backend.attention(req);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AttentionUnavailable) throw;
    if (attention_fallback) *attention_fallback = true;
    return padded();
  }
  const auto t1 = Clock::now();
  auto views = propose_views(mean_heads(raw), shot.dims, cfg);
  if (timings) {
    timings->attention_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    timings->proposal_ms = ms_since(t1);
  }
  return views;
}

MvpResult run_mvp(const Screenshot& shot, const std::string& instruction, std::optional<Rect> gt,
                  const GroundingBackend& backend, const MvpConfig& cfg, std::uint64_t call_idx) {
  cfg.validate();
  if (instruction.empty()) throw Error(ErrorCode::InvalidArgument, "empty instruction");
  if (shot.dims.width < 1 || shot.dims.height < 1) {
    throw Error(ErrorCode::InvalidArgument, "screenshot has no pixels");
  }

  MvpResult result;
  result.views.push_back(original_view(shot.dims));
  for (View& v : select_views(shot, instruction, gt, backend, cfg, call_idx,
                              &result.attention_fallback, &result.timings)) {
    result.views.push_back(v);
  }

  const auto t_ground = Clock::now();
  const std::size_t n = result.views.size();
  std::vector<std::optional<Prediction>> slots(n);
  std::vector<std::optional<ViewFailure>> errors(n);
  parallel_for(n, std::size_t(cfg.max_inflight), [&](std::size_t i) {
    const View& view = result.views[i];
    try {
      slots[i] = ground_view(shot, instruction, gt, backend, cfg, view, call_idx);
    } catch (const Error& e) {
      errors[i] = ViewFailure{view.id, e.code(), e.what()};
    }
  });
  result.timings.grounding_ms = ms_since(t_ground);

  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) result.predictions.push_back(std::move(*slots[i]));
    if (errors[i]) result.failures.push_back(std::move(*errors[i]));
  }
  if (result.predictions.empty()) {
    throw Error(ErrorCode::AllBackendCallsFailed,
                "all " + std::to_string(n) + " backend calls failed; first: " +
                    result.failures.front().message);
  }

  const auto t_cluster = Clock::now();
  result.clusters = cluster_predictions(result.predictions, cfg.tau);
  switch (cfg.aggregation) {
    case Aggregation::Cluster:
      result.final = decide(result.clusters, result.predictions, result.views);
      break;
    case Aggregation::Average:
      result.final = aggregate_average(result.predictions);
      break;
    case Aggregation::Random:
      result.final = aggregate_random(result.predictions, mix_key({cfg.seed, call_idx}));
      break;
  }
  result.timings.clustering_ms = ms_since(t_cluster);
  return result;
}

nlohmann::ordered_json to_json(const View& v) {
  nlohmann::ordered_json j;
  j["id"] = v.id;
  j["rect"] = {v.rect.x, v.rect.y, v.rect.w, v.rect.h};
  j["alpha"] = v.alpha;
  j["rank"] = v.rank;
  j["source"] = to_string(v.source);
  j["side"] = to_string(v.side);
  j["pad"] = {v.pad.left, v.pad.top, v.pad.right, v.pad.bottom};
  j["seed_token"] = v.seed_token;
  return j;
}

nlohmann::ordered_json to_json(const MvpResult& r) {
  nlohmann::ordered_json j;
  j["final"] = {r.final.x(), r.final.y()};
  j["attention_fallback"] = r.attention_fallback;
  j["views"] = nlohmann::ordered_json::array();
  for (const View& v : r.views) j["views"].push_back(to_json(v));
  j["predictions"] = nlohmann::ordered_json::array();
  for (const Prediction& p : r.predictions) {
    nlohmann::ordered_json pj;
    pj["view_id"] = p.view_id;
    pj["view_point"] = {p.point_view.x(), p.point_view.y()};
    pj["full_point"] = {p.point_full.x(), p.point_full.y()};
    pj["raw_text"] = p.raw_text;
    j["predictions"].push_back(pj);
  }
  j["clusters"] = nlohmann::ordered_json::array();
  for (const Cluster& c : r.clusters.clusters) {
    j["clusters"].push_back({{"members", c.members}, {"centroid", {c.centroid.x(), c.centroid.y()}}});
  }
  j["failures"] = nlohmann::ordered_json::array();
  for (const ViewFailure& f : r.failures) {
    j["failures"].push_back({{"view_id", f.view_id}, {"code", to_string(f.code)}, {"message", f.message}});
  }
  j["timings_ms"] = {{"attention", r.timings.attention_ms},
                     {"proposal", r.timings.proposal_ms},
                     {"grounding", r.timings.grounding_ms},
                     {"clustering", r.timings.clustering_ms}};
  return j;
}

}  // namespace mvp
