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

// densloc: counting, localization and evaluation driver.

#include <cstdlib>
#include <iostream>
#include <string>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "densloc/commands.hpp"
#include "densloc/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_logger_mt("densloc"));
  spdlog::set_level(spdlog::level::info);
  const char* env = std::getenv("DENSLOC_LOG");
  if (!env) return;
  const std::string level(env);
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::warn("unknown DENSLOC_LOG level '{}', using info", level);
  }
}

int report_error(std::string_view code, std::string_view message) {
  json j = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
  return 1;
}

template <typename T>
void override_if(const CLI::Option* opt, const T& value, T& dst) {
  if (opt->count() > 0) dst = value;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"densloc: density-map counting, localization and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  app.add_option("--config", config_path, "JSON config document")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Run seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Parallelism degree")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "Output directory (or file for render)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse CARPK annotations into ground-truth points");
  densloc::IngestOptions ingest_opts;
  std::string dataset_root;
  std::size_t target_size = 224;
  double ingest_sigma = 4.0;
  ingest->add_option("dataset_root", dataset_root, "Dataset root")->required();
  ingest->add_option("--split", ingest_opts.split, "train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}));
  ingest->add_option("--size", target_size, "Target square size in pixels");
  auto* ingest_sigma_opt =
      ingest->add_option("--kernel-sigma", ingest_sigma, "Ground-truth kernel sigma");
  ingest->add_flag("--render-density", ingest_opts.render_density,
                   "Also write ground-truth DMAPs");

  // eval / localize share manifest + density inputs
  std::string manifest, density_dir, model_name;
  double match_radius = densloc::kDefaultMatchRadius;
  auto* eval = app.add_subcommand("eval", "MAE/RMSE of DMAP counts against ground truth");
  auto* m1 = eval->add_option("--manifest", manifest, "Manifest JSON");
  auto* d1 = eval->add_option("--density-dir", density_dir, "Directory of <id>.dmap files");
  auto* model_opt = eval->add_option("--model", model_name, "Model name for the report row");

  auto* localize = app.add_subcommand("localize", "Estimate object centers from density maps");
  densloc::LocalizationConfig loc_flags;
  auto* m2 = localize->add_option("--manifest", manifest, "Manifest JSON");
  auto* d2 = localize->add_option("--density-dir", density_dir, "Directory of <id>.dmap files");
  auto* o_sigma = localize->add_option("--smooth-sigma", loc_flags.smooth_sigma);
  auto* o_top = localize->add_option("--top-percentile", loc_flags.top_percentile);
  auto* o_spo = localize->add_option("--samples-per-object", loc_flags.samples_per_object);
  auto* o_iter = localize->add_option("--kmeans-max-iter", loc_flags.kmeans_max_iter);
  auto* o_tol = localize->add_option("--kmeans-tol", loc_flags.kmeans_tol);
  auto* o_rst = localize->add_option("--kmeans-restarts", loc_flags.kmeans_restarts);
  auto* o_rad = localize->add_option("--match-radius", match_radius, "Match radius in pixels");

  // render
  auto* render = app.add_subcommand("render", "Render a density heatmap / overlay PNG");
  densloc::RenderOptions render_opts;
  std::string render_density, render_image, render_points;
  render->add_option("--density", render_density, "DMAP file")->required();
  render->add_option("--image", render_image, "Source PNG (same dims as density)");
  render->add_option("--points", render_points, "PointSet JSON of centers");
  render->add_option("--scale", render_opts.scale, "Pixel scale")->check(CLI::PositiveNumber);
  render->add_option("--alpha", render_opts.alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0));

  // synth
  auto* synth = app.add_subcommand("synth", "Write synthetic scenes (DMAP + truth JSON)");
  densloc::SynthOptions synth_opts;
  std::size_t synth_size = 224;
  double synth_sigma = 4.0;
  synth->add_option("--scenes", synth_opts.n_scenes, "Number of scenes");
  synth->add_option("--n-min", synth_opts.n_min, "Minimum objects per scene");
  synth->add_option("--n-max", synth_opts.n_max, "Maximum objects per scene");
  synth->add_option("--size", synth_size, "Square scene size in pixels");
  synth->add_option("--min-sep", synth_opts.min_sep, "Minimum pairwise separation");
  auto* synth_sigma_opt = synth->add_option("--kernel-sigma", synth_sigma, "Kernel sigma");

  // lr-schedule
  auto* sched = app.add_subcommand("lr-schedule", "Emit the warmup + cosine schedule as CSV");
  densloc::ScheduleSpec sched_spec;
  sched->add_option("--base-lr", sched_spec.base_lr);
  sched->add_option("--warmup", sched_spec.warmup_epochs);
  sched->add_option("--total", sched_spec.total_epochs);
  sched->add_option("--min-lr", sched_spec.min_lr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    densloc::RunConfig cfg;
    if (!config_path.empty()) {
      densloc::merge_json(json::parse(densloc::read_text_file(config_path)), cfg);
    }
    override_if(seed_opt, seed, cfg.seed);
    override_if(jobs_opt, jobs, cfg.jobs);
    override_if(out_opt, out, cfg.out_dir);
    override_if(m1, manifest, cfg.manifest);
    override_if(m2, manifest, cfg.manifest);
    override_if(d1, density_dir, cfg.density_dir);
    override_if(d2, density_dir, cfg.density_dir);
    override_if(model_opt, model_name, cfg.model_name);
    override_if(o_sigma, loc_flags.smooth_sigma, cfg.localization.smooth_sigma);
    override_if(o_top, loc_flags.top_percentile, cfg.localization.top_percentile);
    override_if(o_spo, loc_flags.samples_per_object, cfg.localization.samples_per_object);
    override_if(o_iter, loc_flags.kmeans_max_iter, cfg.localization.kmeans_max_iter);
    override_if(o_tol, loc_flags.kmeans_tol, cfg.localization.kmeans_tol);
    override_if(o_rst, loc_flags.kmeans_restarts, cfg.localization.kmeans_restarts);
    override_if(o_rad, match_radius, cfg.match_radius);
    if (ingest_sigma_opt->count() > 0) cfg.kernel = densloc::KernelSpec::with_sigma(ingest_sigma);
    if (synth_sigma_opt->count() > 0) cfg.kernel = densloc::KernelSpec::with_sigma(synth_sigma);

    if (*ingest) {
      if (cfg.out_dir.empty()) throw densloc::Error(densloc::ErrorCode::kInvalidArgument, "--out is required");
      ingest_opts.dataset_root = dataset_root;
      ingest_opts.target_width = ingest_opts.target_height = target_size;
      ingest_opts.out_dir = cfg.out_dir;
      ingest_opts.kernel = cfg.kernel;
      const auto summary = densloc::cmd_ingest(ingest_opts);
      json echo = densloc::to_json(cfg);
      echo["ingest"] = {{"dataset_root", dataset_root},
                        {"split", ingest_opts.split},
                        {"size", target_size},
                        {"render_density", ingest_opts.render_density}};
      densloc::write_text_file(fs::path(cfg.out_dir) / "config.json", echo.dump(2) + "\n");
      for (const auto& [split, n] : summary.images_per_split) {
        fmt::print("{}: {} images\n", split, n);
      }
      fmt::print("total: {} images, {} points\n", summary.n_images, summary.n_points);
    } else if (*eval) {
      const auto res = densloc::cmd_eval(cfg);
      fmt::print("{}", res.table);
      fmt::print("images: {}\n", res.report.n_images);
    } else if (*localize) {
      const auto res = densloc::cmd_localize(cfg);
      fmt::print("images: {}, failed: {}\n", res.images.size(), res.n_failed);
      if (res.aggregate) {
        fmt::print("precision {:.4f} recall {:.4f} f1 {:.4f} @ {} px\n", res.aggregate->precision,
                   res.aggregate->recall, res.aggregate->f1, res.aggregate->match_radius);
      }
      for (const auto& o : res.images) {
        if (o.error) spdlog::error("{} failed: {}", o.image_id, *o.error);
      }
    } else if (*render) {
      if (cfg.out_dir.empty()) throw densloc::Error(densloc::ErrorCode::kInvalidArgument, "--out is required");
      render_opts.density = render_density;
      if (!render_image.empty()) render_opts.image = render_image;
      if (!render_points.empty()) render_opts.points = render_points;
      render_opts.output = cfg.out_dir;
      const auto img = densloc::cmd_render(render_opts);
      fmt::print("wrote {} ({}x{})\n", cfg.out_dir, img.width, img.height);
    } else if (*synth) {
      if (cfg.out_dir.empty()) throw densloc::Error(densloc::ErrorCode::kInvalidArgument, "--out is required");
      synth_opts.width = synth_opts.height = synth_size;
      synth_opts.seed = cfg.seed;
      synth_opts.kernel = cfg.kernel;
      synth_opts.out_dir = cfg.out_dir;
      const auto scenes = densloc::cmd_synth(synth_opts);
      json echo = densloc::to_json(cfg);
      echo["synth"] = {{"scenes", synth_opts.n_scenes}, {"n_min", synth_opts.n_min},
                       {"n_max", synth_opts.n_max}, {"size", synth_size},
                       {"min_sep", synth_opts.min_sep}};
      densloc::write_text_file(fs::path(cfg.out_dir) / "config.json", echo.dump(2) + "\n");
      fmt::print("wrote {} scenes\n", scenes.size());
    } else if (*sched) {
      const std::string csv = densloc::schedule_csv(sched_spec);
      if (cfg.out_dir.empty()) {
        fmt::print("{}", csv);
      } else {
        densloc::write_text_file(cfg.out_dir, csv);
      }
    }
  } catch (const densloc::Error& e) {
    return report_error(densloc::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
