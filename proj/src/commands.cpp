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

#include "densloc/commands.hpp"

#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "densloc/error.hpp"
#include "densloc/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace densloc {

json to_json(const RunConfig& cfg) {
  return {
      {"manifest", cfg.manifest},
      {"density_dir", cfg.density_dir},
      {"out", cfg.out_dir},
      {"seed", cfg.seed},
      {"jobs", cfg.jobs},
      {"match_radius", cfg.match_radius},
      {"model_name", cfg.model_name},
      {"localization",
       {{"smooth_sigma", cfg.localization.smooth_sigma},
        {"top_percentile", cfg.localization.top_percentile},
        {"samples_per_object", cfg.localization.samples_per_object},
        {"kmeans_max_iter", cfg.localization.kmeans_max_iter},
        {"kmeans_tol", cfg.localization.kmeans_tol},
        {"kmeans_restarts", cfg.localization.kmeans_restarts}}},
      {"kernel", {{"sigma", cfg.kernel.sigma}, {"radius", cfg.kernel.radius}}},
      {"bins",
       {{"block_size", cfg.bins.block_size},
        {"max_closed", cfg.bins.max_closed},
        {"open_representative", cfg.bins.open_representative}}},
  };
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

void merge_json(const json& j, RunConfig& cfg) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  try {
    take(j, "manifest", cfg.manifest);
    take(j, "density_dir", cfg.density_dir);
    take(j, "out", cfg.out_dir);
    take(j, "seed", cfg.seed);
    take(j, "jobs", cfg.jobs);
    take(j, "match_radius", cfg.match_radius);
    take(j, "model_name", cfg.model_name);
    if (j.contains("localization")) {
      const json& l = j["localization"];
      take(l, "smooth_sigma", cfg.localization.smooth_sigma);
      take(l, "top_percentile", cfg.localization.top_percentile);
      take(l, "samples_per_object", cfg.localization.samples_per_object);
      take(l, "kmeans_max_iter", cfg.localization.kmeans_max_iter);
      take(l, "kmeans_tol", cfg.localization.kmeans_tol);
      take(l, "kmeans_restarts", cfg.localization.kmeans_restarts);
    }
    if (j.contains("kernel")) {
      const json& k = j["kernel"];
      if (k.contains("sigma") && !k.contains("radius")) {
        cfg.kernel = KernelSpec::with_sigma(k["sigma"].get<double>());
      } else {
        take(k, "sigma", cfg.kernel.sigma);
        take(k, "radius", cfg.kernel.radius);
      }
    }
    if (j.contains("bins")) {
      const json& b = j["bins"];
      take(b, "block_size", cfg.bins.block_size);
      take(b, "max_closed", cfg.bins.max_closed);
      take(b, "open_representative", cfg.bins.open_representative);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad config: {}", e.what()));
  }
}

fs::path resolve_path(const fs::path& manifest_path, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  return manifest_path.parent_path() / path;
}

std::string scene_id(std::size_t index) { return fmt::format("scene_{:04d}", index); }

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
}

Error with_id(const Error& e, const std::string& id) {
  return Error(e.code(), fmt::format("image {}: {}", id, e.what()));
}

void write_config(const RunConfig& cfg, const fs::path& out_dir) {
  write_text_file(out_dir / "config.json", to_json(cfg).dump(2) + "\n");
}

void require_file(const std::string& p, const char* what) {
  if (p.empty() || !fs::exists(p)) {
    throw Error(ErrorCode::kMissingFile, fmt::format("{} not found: '{}'", what, p));
  }
}

}  // namespace

IngestSummary cmd_ingest(const IngestOptions& opts) {
  if (opts.target_width == 0 || opts.target_height == 0) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  std::vector<std::string> splits;
  if (opts.split == "all") {
    splits = {"train", "test"};
  } else {
    splits = {opts.split};
  }
  DatasetManifest merged;
  merged.split = opts.split;
  IngestSummary summary;
  std::set<std::string> seen;
  for (const std::string& split : splits) {
    DatasetManifest m = build_manifest(opts.dataset_root, split);
    summary.images_per_split.emplace_back(split, m.entries.size());
    for (ManifestEntry& e : m.entries) {
      if (!seen.insert(e.image_id).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("image id {} appears in more than one split", e.image_id));
      }
      merged.entries.push_back(std::move(e));
    }
  }

  ensure_dir(opts.out_dir / "points");
  if (opts.render_density) ensure_dir(opts.out_dir / "density");
  for (ManifestEntry& e : merged.entries) {
    try {
      const auto boxes = parse_annotations(read_text_file(e.annotation_path));
      const PointSet centers = boxes_to_centers(
          boxes, static_cast<double>(e.native_width), static_cast<double>(e.native_height),
          static_cast<double>(opts.target_width), static_cast<double>(opts.target_height));
      e.points_path = (fs::path("points") / (e.image_id + ".json")).generic_string();
      write_pointset(centers, e.image_id, opts.out_dir / e.points_path);
      if (opts.render_density) {
        write_dmap(render_gt(centers, opts.kernel),
                   opts.out_dir / "density" / (e.image_id + ".dmap"));
      }
      summary.n_points += centers.size();
    } catch (const Error& err) {
      throw with_id(err, e.image_id);
    }
  }
  summary.n_images = merged.entries.size();
  write_manifest(merged, opts.out_dir / "manifest.json");
  spdlog::info("ingested {} images with {} points", summary.n_images, summary.n_points);
  return summary;
}

EvalResult cmd_eval(const RunConfig& cfg) {
  require_file(cfg.manifest, "manifest");
  const fs::path manifest_path(cfg.manifest);
  const DatasetManifest m = read_manifest(manifest_path);
  const BinSpec bins = cfg.bins.build();
  EvalResult res;
  std::set<std::string> gt_dims;
  for (const ManifestEntry& e : m.entries) {
    const fs::path dmap_path = fs::path(cfg.density_dir) / (e.image_id + ".dmap");
    if (!fs::is_regular_file(dmap_path)) {
      throw Error(ErrorCode::kMissingFile,
                  fmt::format("missing density map for image id {}", e.image_id));
    }
    if (e.points_path.empty()) {
      throw Error(ErrorCode::kMissingFile,
                  fmt::format("no ground-truth points for image id {}", e.image_id));
    }
    try {
      const DensityMap dm = read_dmap(dmap_path);
      const PointSet truth = read_pointset(resolve_path(manifest_path, e.points_path));
      const double predicted = total_count(dm);
      res.records.push_back({e.image_id, predicted, static_cast<double>(truth.size())});
      gt_dims.insert(fmt::format("{}x{}", truth.width(), truth.height()));

      const fs::path sidecar_path = fs::path(cfg.density_dir) / (e.image_id + ".json");
      if (fs::is_regular_file(sidecar_path)) {
        const DensitySidecar sc =
            sidecar_from_json(json::parse(read_text_file(sidecar_path)));
        if (std::abs(sc.total_count - predicted) > 1e-3 * std::max(1.0, predicted)) {
          res.warnings.push_back(fmt::format("{}: sidecar count {} != DMAP mass {}",
                                             e.image_id, sc.total_count, predicted));
        }
        if (sc.grid_h != blocks_along(dm.height(), bins.block_size()) ||
            sc.grid_w != blocks_along(dm.width(), bins.block_size())) {
          res.warnings.push_back(fmt::format("{}: sidecar grid {}x{} inconsistent with block {}",
                                             e.image_id, sc.grid_h, sc.grid_w,
                                             bins.block_size()));
        }
      }
    } catch (const Error& err) {
      throw with_id(err, e.image_id);
    } catch (const json::exception& err) {
      throw with_id(Error(ErrorCode::kParse, err.what()), e.image_id);
    }
  }
  const CountMetrics cm = count_metrics(res.records);
  res.report.n_images = res.records.size();
  res.report.mae = cm.mae;
  res.report.rmse = cm.rmse;
  const TableRow row{cfg.model_name, cm.mae, cm.rmse};
  res.table = format_table(std::span(&row, 1));

  if (!cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    json j = to_json(res.report);
    j["model"] = cfg.model_name;
    j["seed"] = cfg.seed;
    j["ground_truth"] = {{"source", "manifest points"},
                         {"dims", std::vector<std::string>(gt_dims.begin(), gt_dims.end())}};
    json recs = json::array();
    for (const CountRecord& r : res.records) {
      recs.push_back({{"image_id", r.image_id},
                      {"predicted", r.predicted},
                      {"ground_truth", r.ground_truth}});
    }
    j["records"] = std::move(recs);
    j["warnings"] = res.warnings;
    write_text_file(fs::path(cfg.out_dir) / "metrics.json", j.dump(2) + "\n");
    write_text_file(fs::path(cfg.out_dir) / "metrics.txt", res.table);
    write_config(cfg, cfg.out_dir);
  }
  for (const std::string& w : res.warnings) spdlog::warn("{}", w);
  return res;
}

LocalizeResult cmd_localize(const RunConfig& cfg) {
  require_file(cfg.manifest, "manifest");
  cfg.localization.validate();
  if (cfg.out_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  if (!(cfg.match_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "match radius must be > 0");
  }
  const fs::path manifest_path(cfg.manifest);
  const DatasetManifest m = read_manifest(manifest_path);
  const fs::path out(cfg.out_dir);
  ensure_dir(out / "predictions");

  LocalizeResult res;
  res.images.resize(m.entries.size());
  auto process = [&](std::size_t idx) {
    const ManifestEntry& e = m.entries[idx];
    ImageOutcome& o = res.images[idx];
    o.image_id = e.image_id;
    o.seed = cfg.seed + idx;
    try {
      const fs::path dmap_path = fs::path(cfg.density_dir) / (e.image_id + ".dmap");
      if (!fs::is_regular_file(dmap_path)) {
        throw Error(ErrorCode::kMissingFile,
                    fmt::format("missing density map for image id {}", e.image_id));
      }
      const DensityMap dm = read_dmap(dmap_path);
      LocalizationConfig lc = cfg.localization;
      lc.seed = o.seed;
      const PointSet pred = estimate_positions(dm, lc);
      o.n_predicted = pred.size();
      json pj = pointset_to_json(pred, e.image_id);
      pj["seed"] = o.seed;
      write_text_file(out / "predictions" / (e.image_id + ".json"), pj.dump() + "\n");
      if (!e.points_path.empty()) {
        const PointSet truth = read_pointset(resolve_path(manifest_path, e.points_path));
        o.n_truth = truth.size();
        o.match = match_points(pred, truth, cfg.match_radius);
      }
    } catch (const Error& err) {
      o.error = fmt::format("{}: {}", to_string(err.code()), err.what());
    } catch (const std::exception& err) {
      o.error = err.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, m.entries.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < m.entries.size(); i = next++) process(i);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::size_t matched = 0, n_pred = 0, n_truth = 0;
  bool any_truth = false;
  json images = json::array();
  json failures = json::array();
  for (const ImageOutcome& o : res.images) {
    json row = {{"image_id", o.image_id}, {"seed", o.seed}};
    if (o.error) {
      ++res.n_failed;
      row["error"] = *o.error;
      failures.push_back({{"image_id", o.image_id}, {"error", *o.error}});
    } else {
      row["n_predicted"] = o.n_predicted;
      if (o.match) {
        any_truth = true;
        matched += o.match->matches.size();
        n_pred += o.n_predicted;
        n_truth += *o.n_truth;
        row["n_truth"] = *o.n_truth;
        row["matched"] = o.match->matches.size();
        row["precision"] = o.match->precision;
        row["recall"] = o.match->recall;
        row["f1"] = o.match->f1;
      }
    }
    images.push_back(std::move(row));
  }
  json report = {{"n_images", res.images.size()},
                 {"n_failed", res.n_failed},
                 {"images", std::move(images)},
                 {"failures", std::move(failures)}};
  if (any_truth) {
    res.aggregate = aggregate_matches(matched, n_pred, n_truth, cfg.match_radius);
    report["localization"] = {{"precision", res.aggregate->precision},
                              {"recall", res.aggregate->recall},
                              {"f1", res.aggregate->f1},
                              {"match_radius", res.aggregate->match_radius}};
  }
  write_text_file(out / "localize_report.json", report.dump(2) + "\n");
  write_config(cfg, out);
  spdlog::info("localized {} images, {} failed", res.images.size(), res.n_failed);
  return res;
}

RgbImage cmd_render(const RenderOptions& opts) {
  FigureInputs in;
  in.density = read_dmap(opts.density);
  if (opts.image) in.image = read_png(*opts.image);
  if (opts.points) in.points = read_pointset(*opts.points);
  in.scale = opts.scale;
  in.alpha = opts.alpha;
  RgbImage fig = compose_figure(in);
  if (!opts.output.empty()) {
    if (opts.output.has_parent_path()) ensure_dir(opts.output.parent_path());
    write_png(fig, opts.output);
  }
  return fig;
}

std::vector<SyntheticScene> cmd_synth(const SynthOptions& opts) {
  if (opts.n_min > opts.n_max) {
    throw Error(ErrorCode::kInvalidArgument, "n_min must not exceed n_max");
  }
  const fs::path out = opts.out_dir;
  ensure_dir(out / "density");
  ensure_dir(out / "truth");
  DatasetManifest manifest;
  manifest.split = "synthetic";
  std::vector<SyntheticScene> scenes;
  scenes.reserve(opts.n_scenes);
  for (std::size_t i = 0; i < opts.n_scenes; ++i) {
    Rng count_rng(derive_seed(opts.seed, i));
    const std::size_t n = opts.n_min + count_rng.below(opts.n_max - opts.n_min + 1);
    SyntheticScene s =
        generate_scene(n, opts.width, opts.height, opts.min_sep, opts.seed + i, opts.kernel);
    const std::string id = scene_id(i);
    write_dmap(s.density, out / "density" / (id + ".dmap"));
    write_pointset(s.truth, id, out / "truth" / (id + ".json"));
    ManifestEntry e;
    e.image_id = id;
    e.split = "synthetic";
    e.native_width = opts.width;
    e.native_height = opts.height;
    e.points_path = (fs::path("truth") / (id + ".json")).generic_string();
    manifest.entries.push_back(std::move(e));
    scenes.push_back(std::move(s));
  }
  write_manifest(manifest, out / "manifest.json");
  spdlog::info("wrote {} synthetic scenes to {}", scenes.size(), out.string());
  return scenes;
}

}  // namespace densloc
