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

#include "mvp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mvp/rng.hpp"
#include "mvp/view_proposal.hpp"

namespace mvp {
namespace {

std::string tag_value(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

Rect rect_from_edges(double x0, double y0, double x1, double y1) {
  const int x = static_cast<int>(std::floor(x0));
  const int y = static_cast<int>(std::floor(y0));
  return {x, y, static_cast<int>(std::ceil(x1)) - x, static_cast<int>(std::ceil(y1)) - y};
}

// Returns an empty string when the sample is valid.
std::string validate_sample(const GroundingSample& s) {
  if (s.id.empty()) return "missing id";
  if (s.instruction.empty()) return "empty instruction";
  if (s.dims.width < 1 || s.dims.height < 1) return "image has no pixels";
  if (s.gt_bbox.w < 1 || s.gt_bbox.h < 1) return "bbox must have positive size";
  if (!Rect{0, 0, s.dims.width, s.dims.height}.contains(s.gt_bbox)) return "bbox outside image";
  return {};
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read dataset " + path.string());
  const auto root = path.parent_path();

  Dataset ds;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto reject = [&](std::string reason) { ds.rejects.push_back({line_no, std::move(reason)}); };
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      reject("not a JSON object");
      continue;
    }
    try {
      GroundingSample s;
      s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      s.image_path = j.at("image").get<std::string>();
      if (s.image_path.is_relative()) s.image_path = root / s.image_path;
      s.instruction = j.at("instruction").get<std::string>();
      const auto& bbox = j.at("bbox");
      if (!bbox.is_array() || bbox.size() != 4) {
        reject("bbox must be [x, y, w, h]");
        continue;
      }
      const double bx = bbox[0].get<double>(), by = bbox[1].get<double>();
      s.gt_bbox = rect_from_edges(bx, by, bx + bbox[2].get<double>(), by + bbox[3].get<double>());
      if (j.contains("tags")) {
        for (const auto& [k, v] : j.at("tags").items()) s.tags[k] = tag_value(v);
      }
      if (j.contains("width") && j.contains("height")) {
        s.dims = {j.at("width").get<int>(), j.at("height").get<int>()};
      } else {
        s.dims = read_png_dims(s.image_path);
      }
      if (auto why = validate_sample(s); !why.empty()) {
        reject(why);
        continue;
      }
      if (!seen.insert(s.id).second) {
        reject("duplicate id " + s.id);
        continue;
      }
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      reject(std::string("bad field: ") + e.what());
    } catch (const Error& e) {
      reject(e.what());
    }
  }
  if (ds.samples.empty()) {
    throw Error(ErrorCode::Dataset, "no valid samples in " + path.string() + " (" +
                                        std::to_string(ds.rejects.size()) + " rejected lines)");
  }
  return ds;
}

Dataset load_screenspot_pro(const std::filesystem::path& annotation_json,
                            const std::filesystem::path& image_root) {
  std::ifstream in(annotation_json);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + annotation_json.string());
  const auto arr = nlohmann::json::parse(in, nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    throw Error(ErrorCode::Dataset, annotation_json.string() + " is not a JSON array");
  }
  Dataset ds;
  int idx = 0;
  for (const auto& a : arr) {
    ++idx;
    try {
      GroundingSample s;
      s.id = a.contains("id") ? tag_value(a.at("id")) : std::to_string(idx);
      s.image_path = image_root / a.at("img_filename").get<std::string>();
      s.instruction = a.at("instruction").get<std::string>();
      const auto& b = a.at("bbox");
      s.gt_bbox = rect_from_edges(b.at(0).get<double>(), b.at(1).get<double>(),
                                  b.at(2).get<double>(), b.at(3).get<double>());
      if (a.contains("img_size")) {
        s.dims = {a.at("img_size").at(0).get<int>(), a.at("img_size").at(1).get<int>()};
      } else {
        s.dims = read_png_dims(s.image_path);
      }
      for (const char* key : {"application", "platform", "ui_type", "group"}) {
        if (a.contains(key)) s.tags[key] = tag_value(a.at(key));
      }
      if (auto why = validate_sample(s); !why.empty()) {
        ds.rejects.push_back({idx, why});
        continue;
      }
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      ds.rejects.push_back({idx, std::string("bad field: ") + e.what()});
    } catch (const Error& e) {
      ds.rejects.push_back({idx, e.what()});
    }
  }
  if (ds.samples.empty()) throw Error(ErrorCode::Dataset, "no valid samples");
  return ds;
}

void save_dataset(std::span<const GroundingSample> samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["image"] = s.image_path.string();
    j["instruction"] = s.instruction;
    j["bbox"] = {s.gt_bbox.x, s.gt_bbox.y, s.gt_bbox.w, s.gt_bbox.h};
    j["tags"] = s.tags;
    j["width"] = s.dims.width;
    j["height"] = s.dims.height;
    out << j.dump() << '\n';
  }
}

std::vector<GroundingSample> synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  if (spec.min_target < 1 || spec.max_target < spec.min_target ||
      spec.max_target > std::min(spec.dims.width, spec.dims.height)) {
    throw Error(ErrorCode::InvalidArgument, "target size range does not fit the image");
  }
  std::vector<GroundingSample> out;
  out.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    KeyedRng rng({spec.seed, 0x53594e54, std::uint64_t(i)});
    const auto side = [&] {
      return spec.min_target + int(rng.uniform_index(spec.max_target - spec.min_target + 1));
    };
    GroundingSample s;
    s.id = "syn-" + std::to_string(i);
    s.image_path = s.id + ".png";
    s.instruction = "click target " + std::to_string(i);
    s.dims = spec.dims;
    s.gt_bbox.w = side();
    s.gt_bbox.h = side();
    s.gt_bbox.x = int(rng.uniform_index(spec.dims.width - s.gt_bbox.w + 1));
    s.gt_bbox.y = int(rng.uniform_index(spec.dims.height - s.gt_bbox.h + 1));
    s.tags["size"] = s.gt_bbox.area() < 1024 ? "small" : "large";
    out.push_back(std::move(s));
  }
  return out;
}

const char* to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::MVP: return "mvp";
    case EvalMode::Single: return "single";
    case EvalMode::AvgAblation: return "average";
    case EvalMode::RandomAblation: return "random";
    case EvalMode::NoResizeAblation: return "no_resize";
    case EvalMode::BorderPadAblation: return "border_pad";
  }
  return "mvp";
}

EvalMode eval_mode_from_string(const std::string& s) {
  for (auto m : {EvalMode::MVP, EvalMode::Single, EvalMode::AvgAblation, EvalMode::RandomAblation,
                 EvalMode::NoResizeAblation, EvalMode::BorderPadAblation}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
}

MvpConfig config_for_mode(MvpConfig cfg, EvalMode mode) {
  switch (mode) {
    case EvalMode::MVP: break;
    case EvalMode::Single: cfg.m = 0; break;
    case EvalMode::AvgAblation: cfg.aggregation = Aggregation::Average; break;
    case EvalMode::RandomAblation: cfg.aggregation = Aggregation::Random; break;
    case EvalMode::NoResizeAblation: cfg.alpha = 1.0; break;
    case EvalMode::BorderPadAblation: cfg.view_strategy = ViewStrategy::BorderPad; break;
  }
  return cfg;
}

std::uint64_t sample_call_idx(const GroundingSample& sample) { return fnv1a64(sample.id); }

Screenshot load_screenshot(const GroundingSample& sample, const GroundingBackend& backend) {
  if (backend.needs_pixels()) {
    Screenshot shot = Screenshot::from_png(sample.image_path);
    if (shot.dims != sample.dims) {
      throw Error(ErrorCode::Dataset, sample.image_path.string() + " does not match its annotation size");
    }
    return shot;
  }
  return Screenshot::synthetic(sample.dims, sample_call_idx(sample));
}

namespace {

SampleRecord run_sample(const GroundingSample& s, const GroundingBackend& backend,
                        const MvpConfig& cfg) {
  SampleRecord rec;
  rec.id = s.id;
  rec.tags = s.tags;
  try {
    const Screenshot shot = load_screenshot(s, backend);
    const MvpResult res = run_mvp(shot, s.instruction, s.gt_bbox, backend, cfg, sample_call_idx(s));
    rec.final = res.final;
    rec.hit = point_in_rect(res.final, s.gt_bbox);
    rec.n_views = static_cast<int>(res.views.size()) - 1;
    for (const auto& c : res.clusters.clusters) rec.cluster_sizes.push_back(int(c.members.size()));
    for (const View& v : res.views) {
      auto it = std::find_if(res.predictions.begin(), res.predictions.end(),
                             [&](const Prediction& p) { return p.view_id == v.id; });
      rec.slot_hits.push_back(it == res.predictions.end() ? -1
                                                          : point_in_rect(it->point_full, s.gt_bbox));
    }
    if (rec.n_views > 0) {
      rec.contains_gt =
          containing_ratio(std::span<const View>(res.views).subspan(1), s.gt_bbox) == 1.0;
    }
    for (const auto& f : res.failures) {
      rec.failures.push_back("view " + std::to_string(f.view_id) + ": " + f.message);
    }
    if (res.attention_fallback) rec.failures.push_back("attention unavailable; used border padding");
  } catch (const Error& e) {
    rec.hit = false;
    rec.failures.push_back(e.what());
  }
  return rec;
}

nlohmann::ordered_json snapshot(const MvpConfig& cfg, const HarnessOptions& opts) {
  nlohmann::ordered_json j;
  j["pipeline"] = to_json(cfg);
  j["backend"] = opts.backend;
  return j;
}

}  // namespace

void recompute_aggregates(EvalReport& report) {
  report.overall = {"overall", 0, 0, 0};
  std::map<std::string, GroupAccuracy> groups;
  int contain_n = 0, contain_hits = 0;
  for (const auto& r : report.records) {
    ++report.overall.n;
    report.overall.hits += r.hit;
    for (const auto& [k, v] : r.tags) {
      auto& g = groups[k + "=" + v];
      g.group = k + "=" + v;
      ++g.n;
      g.hits += r.hit;
    }
    if (r.contains_gt) {
      ++contain_n;
      contain_hits += *r.contains_gt;
    }
  }
  auto finish = [](GroupAccuracy& g) { g.accuracy = g.n ? double(g.hits) / g.n : 0.0; };
  finish(report.overall);
  report.per_tag.clear();
  for (auto& [name, g] : groups) {
    finish(g);
    report.per_tag.push_back(g);
  }
  report.containing_ratio.reset();
  if (contain_n > 0) report.containing_ratio = double(contain_hits) / contain_n;

  report.pass_at_n.clear();
  for (int n : report.pass_at_n_requested) {
    int passed = 0;
    for (const auto& r : report.records) {
      const std::size_t upto = std::min<std::size_t>(std::size_t(n), r.slot_hits.size());
      passed += std::any_of(r.slot_hits.begin(), r.slot_hits.begin() + upto,
                            [](int h) { return h == 1; });
    }
    report.pass_at_n.push_back(
        {n, report.records.empty() ? 0.0 : double(passed) / double(report.records.size())});
  }
}

EvalReport evaluate(std::span<const GroundingSample> samples, const GroundingBackend& backend,
                    const MvpConfig& cfg, EvalMode mode, const HarnessOptions& opts) {
  const MvpConfig run_cfg = config_for_mode(cfg, mode);
  run_cfg.validate();
  EvalReport report;
  report.mode = to_string(mode);
  report.seed = cfg.seed;
  report.config = snapshot(run_cfg, opts);
  report.records.resize(samples.size());
  parallel_for(samples.size(), std::size_t(std::max(1, opts.workers)), [&](std::size_t i) {
    report.records[i] = run_sample(samples[i], backend, run_cfg);
  });
  recompute_aggregates(report);
  return report;
}

EvalReport pass_at_n(std::span<const GroundingSample> samples, const GroundingBackend& backend,
                     const MvpConfig& cfg, std::vector<int> n_values, const HarnessOptions& opts) {
  if (n_values.empty()) throw Error(ErrorCode::InvalidArgument, "no N values");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  if (n_values.front() < 1) throw Error(ErrorCode::InvalidArgument, "N values must be positive");
  MvpConfig run_cfg = cfg;
  run_cfg.m = n_values.back() - 1;
  run_cfg.k = std::max(run_cfg.k, run_cfg.m);
  EvalReport report = evaluate(samples, backend, run_cfg, EvalMode::MVP, opts);
  report.mode = "passn";
  report.pass_at_n_requested = std::move(n_values);
  recompute_aggregates(report);
  return report;
}

namespace {

std::vector<DistanceBin> bin_distances(const std::vector<PerturbationRecord>& records,
                                       const std::vector<double>& edges,
                                       double (*key)(const PerturbationRecord&)) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  std::vector<DistanceBin> bins;
  for (double e : edges) bins.push_back({"<=" + fmt(e), 0, 0});
  bins.push_back({edges.empty() ? "all" : ">" + fmt(edges.back()), 0, 0});
  for (const auto& r : records) {
    const double k = key(r);
    std::size_t b = 0;
    while (b < edges.size() && k > edges[b]) ++b;
    bins[b].count += 1;
    bins[b].mean_distance += r.distance;
  }
  for (auto& b : bins)
    if (b.count) b.mean_distance /= b.count;
  return bins;
}

}  // namespace

PerturbationReport perturbation_study(std::span<const GroundingSample> samples,
                                      const GroundingBackend& backend, const MvpConfig& cfg,
                                      const PerturbationOptions& popts,
                                      const HarnessOptions& opts) {
  if (!std::is_sorted(popts.resolution_edges.begin(), popts.resolution_edges.end()) ||
      !std::is_sorted(popts.area_edges.begin(), popts.area_edges.end())) {
    throw Error(ErrorCode::InvalidArgument, "bin edges must be ascending");
  }
  PerturbationReport report;
  report.seed = cfg.seed;
  report.config = snapshot(cfg, opts);
  report.config["border_px"] = popts.border_px;
  report.config["resolution_edges"] = popts.resolution_edges;
  report.config["area_edges"] = popts.area_edges;

  std::vector<std::optional<PerturbationRecord>> slots(samples.size());
  std::vector<std::string> errors(samples.size());
  parallel_for(samples.size(), std::size_t(std::max(1, opts.workers)), [&](std::size_t i) {
    const GroundingSample& s = samples[i];
    try {
      const Screenshot shot = load_screenshot(s, backend);
      const View plain = original_view(s.dims);
      View bordered = plain;
      bordered.source = ViewSource::BorderPad;
      bordered.side = PadSide::All;
      const int b = popts.border_px;
      bordered.pad = {b, b, b, b};
      const auto idx = sample_call_idx(s);
      const Prediction a = ground_view(shot, s.instruction, s.gt_bbox, backend, cfg, plain, idx);
      const Prediction p = ground_view(shot, s.instruction, s.gt_bbox, backend, cfg, bordered, idx);
      PerturbationRecord r;
      r.id = s.id;
      r.original = a.point_full;
      r.perturbed = p.point_full;
      r.distance = (a.point_full.xy - p.point_full.xy).norm();
      r.hit_original = point_in_rect(a.point_full, s.gt_bbox);
      r.hit_perturbed = point_in_rect(p.point_full, s.gt_bbox);
      r.image_height = s.dims.height;
      r.gt_area = s.gt_bbox.area();
      slots[i] = r;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  double total = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!slots[i]) {
      report.failures.emplace_back(samples[i].id, errors[i]);
      continue;
    }
    const auto& r = *slots[i];
    total += r.distance;
    if (r.hit_original) {
      r.hit_perturbed ? ++report.correct_to_correct : ++report.correct_to_wrong;
    } else {
      r.hit_perturbed ? ++report.wrong_to_correct : ++report.wrong_to_wrong;
    }
    report.records.push_back(r);
  }
  if (!report.records.empty()) report.mean_shift = total / double(report.records.size());
  const int correct = report.correct_to_correct + report.correct_to_wrong;
  const int wrong = report.wrong_to_correct + report.wrong_to_wrong;
  report.correct_to_wrong_rate = correct ? double(report.correct_to_wrong) / correct : 0.0;
  report.wrong_to_correct_rate = wrong ? double(report.wrong_to_correct) / wrong : 0.0;
  report.resolution_bins = bin_distances(report.records, popts.resolution_edges,
                                         [](const PerturbationRecord& r) { return double(r.image_height); });
  report.area_bins = bin_distances(report.records, popts.area_edges,
                                   [](const PerturbationRecord& r) { return double(r.gt_area); });
  return report;
}

}  // namespace mvp
