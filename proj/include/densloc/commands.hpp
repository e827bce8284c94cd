// Copyright 2026 The densloc Authors. All Rights Reserved.
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

// Batch drivers behind the densloc subcommands.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "densloc/evaluation.hpp"
#include "densloc/gt_synthesis.hpp"
#include "densloc/ingestion.hpp"
#include "densloc/localization.hpp"
#include "densloc/render.hpp"
#include "densloc/schedule.hpp"

namespace densloc {

struct BinOverrides {
  int block_size = 8;
  int max_closed = 10;
  double open_representative = -1.0;  // < 0: max_closed + 1

  BinSpec build() const { return BinSpec::unit(block_size, max_closed, open_representative); }
};

// Settings shared by every subcommand. Loaded from an optional JSON config
// document, then overridden by command-line flags.
struct RunConfig {
  std::string manifest;
  std::string density_dir;
  std::string out_dir;
  LocalizationConfig localization;
  KernelSpec kernel = KernelSpec::with_sigma(4.0);
  BinOverrides bins;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  double match_radius = kDefaultMatchRadius;
  std::string model_name = "densloc";
};

nlohmann::json to_json(const RunConfig& cfg);
// Keys missing from `j` keep the values already in `cfg`.
void merge_json(const nlohmann::json& j, RunConfig& cfg);

// Relative manifest paths are resolved against the manifest's directory.
std::filesystem::path resolve_path(const std::filesystem::path& manifest_path,
                                   const std::string& p);

// ingest

struct IngestOptions {
  std::filesystem::path dataset_root;
  std::string split = "all";  // "train", "test" or "all"
  std::size_t target_width = 224;
  std::size_t target_height = 224;
  std::filesystem::path out_dir;
  bool render_density = false;  // also write ground-truth DMAPs
  KernelSpec kernel = KernelSpec::with_sigma(4.0);
};

struct IngestSummary {
  std::size_t n_images = 0;
  std::size_t n_points = 0;
  std::vector<std::pair<std::string, std::size_t>> images_per_split;
};

// Writes <out>/manifest.json, <out>/points/<id>.json and, if requested,
// <out>/density/<id>.dmap.
IngestSummary cmd_ingest(const IngestOptions& opts);

// eval

struct EvalResult {
  MetricsReport report;
  std::vector<CountRecord> records;
  std::vector<std::string> warnings;
  std::string table;
};

// Predicted count = DMAP mass, ground truth = size of the entry's PointSet.
// Writes <out>/metrics.json and <out>/metrics.txt if out_dir is set.
EvalResult cmd_eval(const RunConfig& cfg);

// localize

struct ImageOutcome {
  std::string image_id;
  std::uint64_t seed = 0;
  std::size_t n_predicted = 0;
  std::optional<std::size_t> n_truth;
  std::optional<MatchResult> match;
  std::optional<std::string> error;
};

struct LocalizeResult {
  std::vector<ImageOutcome> images;  // manifest order
  std::optional<LocalizationMetrics> aggregate;
  std::size_t n_failed = 0;
};

// Runs estimate_positions per manifest entry with seed = cfg.seed + index on
// up to cfg.jobs threads. Writes <out>/predictions/<id>.json,
// <out>/localize_report.json and <out>/config.json. Per-image failures are
// recorded and do not stop the batch.
LocalizeResult cmd_localize(const RunConfig& cfg);

// render

struct RenderOptions {
  std::filesystem::path density;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> points;
  std::size_t scale = 2;
  double alpha = 0.5;
  std::filesystem::path output;
};

RgbImage cmd_render(const RenderOptions& opts);

// synth

struct SynthOptions {
  std::size_t n_scenes = 100;
  std::size_t n_min = 1;
  std::size_t n_max = 20;
  std::size_t width = 224;
  std::size_t height = 224;
  double min_sep = 32.0;
  std::uint64_t seed = 42;
  KernelSpec kernel = KernelSpec::with_sigma(4.0);
  std::filesystem::path out_dir;
};

// Scene i has its object count drawn from [n_min, n_max] and is generated
// with seed + i. Writes <out>/density/<id>.dmap, <out>/truth/<id>.json and
// <out>/manifest.json.
std::vector<SyntheticScene> cmd_synth(const SynthOptions& opts);

std::string scene_id(std::size_t index);

}  // namespace densloc
