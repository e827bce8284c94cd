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

// CARPK annotation ingestion and the toolkit's file formats.
//
// DMAP layout (little-endian):
//   offset 0   4 bytes  magic "DMAP"
//   offset 4   1 byte   version, 0x01
//   offset 5   4 bytes  height (uint32)
//   offset 9   4 bytes  width (uint32)
//   offset 13  height*width IEEE-754 binary32 values, row-major
// Values must be finite and >= 0.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "densloc/core_model.hpp"
#include "densloc/types.hpp"

namespace densloc {

struct Box {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

// One box per non-blank line from the first four numeric fields; extra
// fields are ignored and reversed corners are swapped. Throws Error(kParse)
// naming the 1-based line number.
std::vector<Box> parse_annotations(std::string_view text);

// Box midpoints scaled from native to target dims. Coordinates on or past
// the far edge are clamped to target - kEdgeInset.
inline constexpr double kEdgeInset = 0x1.0p-20;
PointSet boxes_to_centers(const std::vector<Box>& boxes, double native_w, double native_h,
                          double target_w, double target_h);

// DMAP

inline constexpr std::uint8_t kDmapVersion = 0x01;
inline constexpr std::size_t kDmapHeaderSize = 13;

std::vector<std::uint8_t> encode_dmap(const DensityMap& dm);
DensityMap decode_dmap(std::span<const std::uint8_t> bytes);

void write_dmap(const DensityMap& dm, std::ostream& out);
void write_dmap(const DensityMap& dm, const std::filesystem::path& path);
DensityMap read_dmap(std::istream& in);
DensityMap read_dmap(const std::filesystem::path& path);

// PointSet JSON: {image_id, width, height, points: [[x, y], ...]}

nlohmann::json pointset_to_json(const PointSet& ps, const std::string& image_id);
PointSet pointset_from_json(const nlohmann::json& j, std::string* image_id = nullptr);
void write_pointset(const PointSet& ps, const std::string& image_id,
                    const std::filesystem::path& path);
PointSet read_pointset(const std::filesystem::path& path, std::string* image_id = nullptr);

// Manifest

struct ManifestEntry {
  std::string image_id;
  std::string split;
  std::string image_path;
  std::string annotation_path;
  std::size_t native_width = 0;
  std::size_t native_height = 0;
  // Ground-truth PointSet JSON written by ingest/synth; empty if not yet built.
  std::string points_path;
};

struct DatasetManifest {
  std::string split;
  std::vector<ManifestEntry> entries;
};

struct ManifestOptions {
  // Used when an image file is absent or is not a PNG.
  std::size_t default_native_width = 1280;
  std::size_t default_native_height = 720;
};

// Layout under `root`:
//   ImageSets/<split>.txt   one image id per line
//   Images/<id>.png
//   Annotations/<id>.txt
// Throws Error(kMissingSplitFile) or Error(kMissingAnnotation) naming the id.
DatasetManifest build_manifest(const std::filesystem::path& root, const std::string& split,
                               const ManifestOptions& opts = {});

// Width and height from a PNG IHDR chunk, if `path` is a readable PNG.
std::optional<std::pair<std::size_t, std::size_t>> png_dimensions(
    const std::filesystem::path& path);

// The manifest is a JSON array of entry objects.
nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Companion files emitted next to DMAPs by the model inference bridge.

struct DensitySidecar {
  std::string image_id;
  double total_count = 0.0;
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
};

DensitySidecar sidecar_from_json(const nlohmann::json& j);

// Debug dump of per-block probabilities:
//   {image_id, height, width, block_size, grid_h, grid_w, n_bins,
//    probs: [[p_0 .. p_{n_bins-1}], ...]}   (blocks row-major)
// Validated through the ProbMap invariants.
ProbMap probmap_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace densloc
