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

#include <cstdio>
#include <fstream>

#include "mvp/harness.hpp"

namespace mvp {
namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

nlohmann::ordered_json group_json(const GroupAccuracy& g) {
  return {{"group", g.group}, {"n", g.n}, {"hits", g.hits}, {"accuracy", g.accuracy}};
}

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["mode"] = report.mode;
  j["seed"] = report.seed;
  j["config"] = report.config;

  nlohmann::ordered_json agg;
  agg["overall"] = group_json(report.overall);
  agg["containing_ratio"] =
      report.containing_ratio ? nlohmann::ordered_json(*report.containing_ratio) : nullptr;
  agg["pass_at_n"] = nlohmann::ordered_json::array();
  for (const auto& p : report.pass_at_n) agg["pass_at_n"].push_back({{"n", p.n}, {"rate", p.rate}});
  agg["per_tag"] = nlohmann::ordered_json::array();
  for (const auto& g : report.per_tag) agg["per_tag"].push_back(group_json(g));
  j["aggregates"] = agg;

  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json rj;
    rj["id"] = r.id;
    rj["final"] = r.final ? nlohmann::ordered_json{r.final->x(), r.final->y()} : nullptr;
    rj["hit"] = r.hit;
    rj["n_views"] = r.n_views;
    rj["cluster_sizes"] = r.cluster_sizes;
    rj["slot_hits"] = r.slot_hits;
    rj["contains_gt"] = r.contains_gt ? nlohmann::ordered_json(*r.contains_gt) : nullptr;
    rj["tags"] = r.tags;
    rj["failures"] = r.failures;
    j["records"].push_back(rj);
  }
  return j;
}

EvalReport eval_report_from_json(const nlohmann::ordered_json& j) {
  try {
    EvalReport report;
    report.mode = j.at("mode").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.config = j.at("config");
    for (const auto& p : j.at("aggregates").at("pass_at_n")) {
      report.pass_at_n_requested.push_back(p.at("n").get<int>());
    }
    for (const auto& rj : j.at("records")) {
      SampleRecord r;
      r.id = rj.at("id").get<std::string>();
      if (!rj.at("final").is_null()) {
        r.final = Point::full(rj["final"][0].get<double>(), rj["final"][1].get<double>());
      }
      r.hit = rj.at("hit").get<bool>();
      r.n_views = rj.at("n_views").get<int>();
      r.cluster_sizes = rj.at("cluster_sizes").get<std::vector<int>>();
      r.slot_hits = rj.at("slot_hits").get<std::vector<int>>();
      if (!rj.at("contains_gt").is_null()) r.contains_gt = rj["contains_gt"].get<bool>();
      r.tags = rj.at("tags").get<std::map<std::string, std::string>>();
      r.failures = rj.at("failures").get<std::vector<std::string>>();
      report.records.push_back(std::move(r));
    }
    recompute_aggregates(report);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

std::string to_csv(const EvalReport& report) {
  std::string out = "group,n,hits,accuracy\n";
  if (report.records.empty()) return out;
  auto row = [&](const GroupAccuracy& g) {
    out += csv_field(g.group) + "," + std::to_string(g.n) + "," + std::to_string(g.hits) + "," +
           fixed6(g.accuracy) + "\n";
  };
  row(report.overall);
  for (const auto& g : report.per_tag) row(g);
  return out;
}

nlohmann::ordered_json to_json(const PerturbationReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["config"] = report.config;
  nlohmann::ordered_json s;
  s["n"] = report.records.size();
  s["mean_shift"] = report.mean_shift;
  s["flips"] = {{"correct_to_correct", report.correct_to_correct},
                {"correct_to_wrong", report.correct_to_wrong},
                {"wrong_to_correct", report.wrong_to_correct},
                {"wrong_to_wrong", report.wrong_to_wrong},
                {"correct_to_wrong_rate", report.correct_to_wrong_rate},
                {"wrong_to_correct_rate", report.wrong_to_correct_rate}};
  auto bins = [](const std::vector<DistanceBin>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& b : v)
      a.push_back({{"bin", b.label}, {"count", b.count}, {"mean_distance", b.mean_distance}});
    return a;
  };
  s["by_resolution"] = bins(report.resolution_bins);
  s["by_area"] = bins(report.area_bins);
  j["summary"] = s;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    j["records"].push_back({{"id", r.id},
                            {"original", {r.original.x(), r.original.y()}},
                            {"perturbed", {r.perturbed.x(), r.perturbed.y()}},
                            {"distance", r.distance},
                            {"hit_original", r.hit_original},
                            {"hit_perturbed", r.hit_perturbed},
                            {"image_height", r.image_height},
                            {"gt_area", r.gt_area}});
  }
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& [id, msg] : report.failures) j["failures"].push_back({{"id", id}, {"error", msg}});
  return j;
}

std::string to_csv(const PerturbationReport& report) {
  std::string out = "axis,bin,count,mean_distance\n";
  for (const auto& b : report.resolution_bins)
    out += "resolution," + csv_field(b.label) + "," + std::to_string(b.count) + "," +
           fixed6(b.mean_distance) + "\n";
  for (const auto& b : report.area_bins)
    out += "area," + csv_field(b.label) + "," + std::to_string(b.count) + "," +
           fixed6(b.mean_distance) + "\n";
  return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format) {
  write_text(path, format == ReportFormat::Json ? to_json(report).dump(2) + "\n" : to_csv(report));
}

void emit_report(const PerturbationReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  write_text(path, format == ReportFormat::Json ? to_json(report).dump(2) + "\n" : to_csv(report));
}

ReportFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
}

}  // namespace mvp
