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

// Command-line front end: single-screenshot grounding and benchmark runs.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvp/backend/http_backend.hpp"
#include "mvp/backend/mock.hpp"
#include "mvp/harness.hpp"
#include "mvp/pipeline.hpp"
#include "mvp/rng.hpp"

namespace {

using namespace mvp;

// Config file: pipeline keys at the top level, plus optional "mock" and
// "http" sections.
struct Settings {
  MvpConfig pipeline;
  MockModelSpec mock;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
};

Settings load_settings(const std::string& path, std::optional<std::uint64_t> seed) {
  Settings s;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::InvalidArgument, path + " is not a JSON object");
    }
    s.pipeline = config_from_json(j);
    if (j.contains("mock")) s.mock = mock_spec_from_json(j.at("mock"));
    if (j.contains("http")) {
      const auto& h = j.at("http");
      s.retry.max_attempts = h.value("max_attempts", s.retry.max_attempts);
      s.retry.base_delay = std::chrono::milliseconds(h.value("base_delay_ms", 200));
      s.retry.max_delay = std::chrono::milliseconds(h.value("max_delay_ms", 5000));
      s.retry.multiplier = h.value("multiplier", s.retry.multiplier);
      s.retry.jitter = h.value("jitter", s.retry.jitter);
      s.timeout = std::chrono::seconds(h.value("timeout_s", 120));
    }
  }
  if (seed) {
    s.pipeline.seed = *seed;
    s.mock.seed = *seed;
  }
  s.pipeline.validate();
  s.mock.validate();
  return s;
}

struct BackendHandle {
  std::unique_ptr<GroundingBackend> backend;
  nlohmann::ordered_json snapshot;
};

BackendHandle make_backend(const std::string& which, const Settings& s) {
  BackendHandle h;
  if (which == "mock") {
    h.backend = std::make_unique<MockBackend>(s.mock);
    h.snapshot["kind"] = "mock";
    h.snapshot["mock"] = to_json(s.mock);
  } else if (which.rfind("http://", 0) == 0) {
    h.backend = std::make_unique<HttpBackend>(which, s.retry, s.timeout);
    h.snapshot["kind"] = "http";
    h.snapshot["url"] = which;
    h.snapshot["max_attempts"] = s.retry.max_attempts;
    h.snapshot["timeout_s"] = s.timeout.count();
  } else {
    throw Error(ErrorCode::InvalidArgument, "backend must be 'mock' or an http:// URL, got " + which);
  }
  return h;
}

Rect parse_rect(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int x = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
    if (ec != std::errc() || p != part.data() + part.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad integer '" + part + "' in " + text);
    }
    v.push_back(x);
  }
  if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "expected x,y,w,h, got " + text);
  return {v[0], v[1], v[2], v[3]};
}

Dataset load_any_dataset(const std::string& path, const std::string& image_root) {
  const std::filesystem::path p(path);
  if (p.extension() == ".json") {
    return load_screenspot_pro(p, image_root.empty() ? p.parent_path() : std::filesystem::path(image_root));
  }
  return load_dataset(p);
}

void warn_rejects(const Dataset& ds) {
  for (const auto& r : ds.rejects) std::cerr << "skipped line " << r.line << ": " << r.reason << "\n";
}

void write_or_print(const std::string& out, const auto& report) {
  if (out.empty()) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    emit_report(report, out, format_for_path(out));
  }
}

struct RunArgs {
  std::string dataset;
  std::string image_root;
  std::string backend = "mock";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 4;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--dataset", a.dataset, "JSONL dataset, or ScreenSpot-Pro annotation .json")->required();
  cmd->add_option("--image-root", a.image_root, "image directory for ScreenSpot-Pro annotations");
  cmd->add_option("--backend", a.backend, "'mock' or bridge URL")->capture_default_str();
  cmd->add_option("--config", a.config, "JSON config");
  cmd->add_option("--seed", a.seed, "seed for the pipeline and the mock");
  cmd->add_option("--out", a.out, "report path; .csv for CSV, otherwise JSON (default stdout)");
  cmd->add_option("--workers", a.workers, "samples in flight")->capture_default_str();
}

void print_summary(const EvalReport& r) {
  std::cerr << r.mode << ": " << r.overall.hits << "/" << r.overall.n << " = " << r.overall.accuracy;
  if (r.containing_ratio) std::cerr << ", containing ratio " << *r.containing_ratio;
  std::cerr << "\n";
  for (const auto& p : r.pass_at_n) std::cerr << "pass@" << p.n << " = " << p.rate << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view GUI grounding with attention-guided views and coordinate clustering"};
  app.require_subcommand(1);

  // ground
  std::string image, instruction, gt_text, emit_json;
  std::string backend_name = "mock", config_path;
  std::optional<std::uint64_t> ground_seed;
  auto* ground = app.add_subcommand("ground", "ground one instruction on one screenshot");
  ground->add_option("--image", image, "PNG screenshot")->required()->check(CLI::ExistingFile);
  ground->add_option("--instruction", instruction, "instruction text")->required();
  ground->add_option("--backend", backend_name, "'mock' or bridge URL")->capture_default_str();
  ground->add_option("--config", config_path, "JSON config");
  ground->add_option("--seed", ground_seed, "seed for the pipeline and the mock");
  ground->add_option("--gt", gt_text, "target box x,y,w,h (used by the mock, and to report a hit)");
  ground->add_option("--emit-json", emit_json, "write the full result as JSON");

  RunArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate MVP on a dataset");
  add_run_options(eval, eval_args);

  RunArgs ablate_args;
  std::string ablate_mode;
  auto* ablate = app.add_subcommand("ablate", "evaluate one ablation or baseline mode");
  add_run_options(ablate, ablate_args);
  ablate->add_option("--mode", ablate_mode, "mvp, single, average, random, no_resize, border_pad")
      ->required();

  RunArgs passn_args;
  std::vector<int> n_values{1, 2, 4, 10};
  auto* passn = app.add_subcommand("passn", "pass@N over the multi-view predictions");
  add_run_options(passn, passn_args);
  passn->add_option("--n", n_values, "comma-separated N values")->delimiter(',')->capture_default_str();

  RunArgs perturb_args;
  int border_px = 28;
  auto* perturb = app.add_subcommand("perturb", "border-padding perturbation study");
  add_run_options(perturb, perturb_args);
  perturb->add_option("--border", border_px, "border width in pixels")->capture_default_str();

  SyntheticSpec syn;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic JSONL dataset for the mock backend");
  synth->add_option("--n", syn.n, "samples")->capture_default_str();
  synth->add_option("--width", syn.dims.width, "image width")->capture_default_str();
  synth->add_option("--height", syn.dims.height, "image height")->capture_default_str();
  synth->add_option("--min-target", syn.min_target, "smallest target side")->capture_default_str();
  synth->add_option("--max-target", syn.max_target, "largest target side")->capture_default_str();
  synth->add_option("--seed", syn.seed, "seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output .jsonl")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ground) {
      const Settings s = load_settings(config_path, ground_seed);
      const auto h = make_backend(backend_name, s);
      std::optional<Rect> gt;
      if (!gt_text.empty()) gt = parse_rect(gt_text);
      const Screenshot shot = Screenshot::from_png(image);
      const MvpResult r = run_mvp(shot, instruction, gt, *h.backend, s.pipeline,
                                  fnv1a64(std::filesystem::path(image).filename().string()));
      for (const auto& f : r.failures) {
        std::cerr << "view " << f.view_id << " failed: " << f.message << "\n";
      }
      std::cout << format_point(r.final.x(), r.final.y());
      if (gt) std::cout << (point_in_rect(r.final, *gt) ? " hit" : " miss");
      std::cout << "\n";
      if (!emit_json.empty()) {
        std::ofstream out(emit_json);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + emit_json);
        out << to_json(r).dump(2) << "\n";
      }
      return 0;
    }

    if (*synth) {
      save_dataset(synthetic_dataset(syn), synth_out);
      return 0;
    }

    auto run = [](const RunArgs& a, auto&& body) {
      const Settings s = load_settings(a.config, a.seed);
      const auto h = make_backend(a.backend, s);
      const Dataset ds = load_any_dataset(a.dataset, a.image_root);
      warn_rejects(ds);
      HarnessOptions opts;
      opts.workers = a.workers;
      opts.backend = h.snapshot;
      body(s, *h.backend, ds, opts);
    };

    if (*eval) {
      run(eval_args, [&](const Settings& s, const GroundingBackend& b, const Dataset& ds,
                         const HarnessOptions& opts) {
        const auto r = evaluate(ds.samples, b, s.pipeline, EvalMode::MVP, opts);
        print_summary(r);
        write_or_print(eval_args.out, r);
      });
    } else if (*ablate) {
      const EvalMode mode = eval_mode_from_string(ablate_mode);
      run(ablate_args, [&](const Settings& s, const GroundingBackend& b, const Dataset& ds,
                           const HarnessOptions& opts) {
        const auto r = evaluate(ds.samples, b, s.pipeline, mode, opts);
        print_summary(r);
        write_or_print(ablate_args.out, r);
      });
    } else if (*passn) {
      run(passn_args, [&](const Settings& s, const GroundingBackend& b, const Dataset& ds,
                          const HarnessOptions& opts) {
        const auto r = pass_at_n(ds.samples, b, s.pipeline, n_values, opts);
        print_summary(r);
        write_or_print(passn_args.out, r);
      });
    } else if (*perturb) {
      run(perturb_args, [&](const Settings& s, const GroundingBackend& b, const Dataset& ds,
                            const HarnessOptions& opts) {
        PerturbationOptions popts;
        popts.border_px = border_px;
        const auto r = perturbation_study(ds.samples, b, s.pipeline, popts, opts);
        std::cerr << "mean shift " << r.mean_shift << " px, correct->wrong " << r.correct_to_wrong
                  << ", wrong->correct " << r.wrong_to_correct << "\n";
        write_or_print(perturb_args.out, r);
      });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
