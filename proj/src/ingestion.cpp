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

#include "densloc/ingestion.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "densloc/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace densloc {

namespace {

bool parse_double(std::string_view tok, double& out) {
  std::string s(tok);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty() && errno != ERANGE && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ','; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) buf.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
         static_cast<std::uint32_t>(b[off + 2]) << 16 |
         static_cast<std::uint32_t>(b[off + 3]) << 24;
}

std::vector<std::uint8_t> slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<Box> parse_annotations(std::string_view text) {
  std::vector<Box> boxes;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (k >= fields.size() || !parse_double(fields[k], v[k])) {
        throw Error(ErrorCode::kParse,
                    fmt::format("annotation line {}: expected 4 numeric fields", line_no));
      }
    }
    Box b{v[0], v[1], v[2], v[3]};
    if (b.x1 > b.x2) std::swap(b.x1, b.x2);
    if (b.y1 > b.y2) std::swap(b.y1, b.y2);
    boxes.push_back(b);
  }
  return boxes;
}

PointSet boxes_to_centers(const std::vector<Box>& boxes, double native_w, double native_h,
                          double target_w, double target_h) {
  if (!(native_w > 0.0 && native_h > 0.0 && target_w > 0.0 && target_h > 0.0)) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  const double sx = target_w / native_w;
  const double sy = target_h / native_h;
  std::vector<Point> pts;
  pts.reserve(boxes.size());
  for (const Box& b : boxes) {
    const double cx = (b.x1 + b.x2) / 2.0 * sx;
    const double cy = (b.y1 + b.y2) / 2.0 * sy;
    pts.push_back({std::clamp(cx, 0.0, target_w - kEdgeInset),
                   std::clamp(cy, 0.0, target_h - kEdgeInset)});
  }
  return PointSet(std::move(pts), target_w, target_h);
}

std::vector<std::uint8_t> encode_dmap(const DensityMap& dm) {
  if (dm.height() > UINT32_MAX || dm.width() > UINT32_MAX) {
    throw Error(ErrorCode::kInvalidArgument, "density map too large for DMAP");
  }
  for (float v : dm.values()) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw Error(ErrorCode::kInvalidPayload, "density values must be finite and >= 0");
    }
  }
  std::vector<std::uint8_t> buf;
  buf.reserve(kDmapHeaderSize + dm.size() * 4);
  buf.insert(buf.end(), {'D', 'M', 'A', 'P', kDmapVersion});
  put_u32(buf, static_cast<std::uint32_t>(dm.height()));
  put_u32(buf, static_cast<std::uint32_t>(dm.width()));
  for (float v : dm.values()) put_u32(buf, std::bit_cast<std::uint32_t>(v));
  return buf;
}

DensityMap decode_dmap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "DMAP", 4) != 0) {
    throw Error(ErrorCode::kNotDmap, "not a DMAP file");
  }
  if (bytes.size() < kDmapHeaderSize) {
    throw Error(ErrorCode::kShortRead, "short read: truncated DMAP header");
  }
  if (bytes[4] != kDmapVersion) {
    throw Error(ErrorCode::kBadVersion,
                fmt::format("unsupported DMAP version {}", static_cast<int>(bytes[4])));
  }
  const std::uint64_t h = get_u32(bytes, 5);
  const std::uint64_t w = get_u32(bytes, 9);
  const std::uint64_t payload = h * w * 4;
  const std::uint64_t have = bytes.size() - kDmapHeaderSize;
  if (have < payload) {
    throw Error(ErrorCode::kShortRead,
                fmt::format("short read: payload has {} of {} bytes", have, payload));
  }
  if (have > payload) {
    throw Error(ErrorCode::kInvalidPayload,
                fmt::format("DMAP has {} trailing bytes", have - payload));
  }
  std::vector<float> values(h * w);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = std::bit_cast<float>(get_u32(bytes, kDmapHeaderSize + 4 * i));
    if (!std::isfinite(v) || v < 0.0f) {
      throw Error(ErrorCode::kInvalidPayload,
                  fmt::format("DMAP value {} is negative or not finite", i));
    }
    values[i] = v;
  }
  return DensityMap(h, w, std::move(values));
}

void write_dmap(const DensityMap& dm, std::ostream& out) {
  const auto buf = encode_dmap(dm);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing DMAP");
}

void write_dmap(const DensityMap& dm, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot open {} for writing", path.string()));
  write_dmap(dm, out);
}

DensityMap read_dmap(std::istream& in) {
  const auto bytes = slurp(in);
  return decode_dmap(bytes);
}

DensityMap read_dmap(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, fmt::format("cannot open {}", path.string()));
  return read_dmap(in);
}

json pointset_to_json(const PointSet& ps, const std::string& image_id) {
  json pts = json::array();
  for (const Point& p : ps.points()) pts.push_back({p.x, p.y});
  return {{"image_id", image_id}, {"width", ps.width()}, {"height", ps.height()},
          {"points", std::move(pts)}};
}

PointSet pointset_from_json(const json& j, std::string* image_id) {
  try {
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) {
        throw Error(ErrorCode::kParse, "point entries must be [x, y]");
      }
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (image_id) *image_id = j.at("image_id").get<std::string>();
    return PointSet(std::move(pts), j.at("width").get<double>(), j.at("height").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad PointSet JSON: {}", e.what()));
  }
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot open {} for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing {}", path.string()));
}

namespace {

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

void write_pointset(const PointSet& ps, const std::string& image_id, const fs::path& path) {
  write_text_file(path, pointset_to_json(ps, image_id).dump() + "\n");
}

PointSet read_pointset(const fs::path& path, std::string* image_id) {
  return pointset_from_json(parse_json_file(path), image_id);
}

std::optional<std::pair<std::size_t, std::size_t>> png_dimensions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<std::uint8_t, 24> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (in.gcount() != static_cast<std::streamsize>(head.size())) return std::nullopt;
  static constexpr std::array<std::uint8_t, 8> kSig = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (!std::equal(kSig.begin(), kSig.end(), head.begin()) ||
      std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
    return std::nullopt;
  }
  auto be32 = [&](std::size_t off) {
    return static_cast<std::size_t>(head[off]) << 24 | static_cast<std::size_t>(head[off + 1]) << 16 |
           static_cast<std::size_t>(head[off + 2]) << 8 | static_cast<std::size_t>(head[off + 3]);
  };
  return std::pair{be32(16), be32(20)};
}

DatasetManifest build_manifest(const fs::path& root, const std::string& split,
                               const ManifestOptions& opts) {
  const fs::path split_file = root / "ImageSets" / (split + ".txt");
  if (!fs::is_regular_file(split_file)) {
    throw Error(ErrorCode::kMissingSplitFile,
                fmt::format("missing split file: {}", split_file.string()));
  }
  DatasetManifest m;
  m.split = split;
  std::set<std::string> seen;
  std::istringstream ids(read_text_file(split_file));
  std::string line;
  while (std::getline(ids, line)) {
    const std::string id = trim(line);
    if (id.empty()) continue;
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("duplicate image id {} in split {}", id, split));
    }
    ManifestEntry e;
    e.image_id = id;
    e.split = split;
    e.image_path = (root / "Images" / (id + ".png")).string();
    e.annotation_path = (root / "Annotations" / (id + ".txt")).string();
    if (!fs::is_regular_file(e.annotation_path)) {
      throw Error(ErrorCode::kMissingAnnotation,
                  fmt::format("missing annotation for image id {}", id));
    }
    const auto dims = png_dimensions(e.image_path);
    e.native_width = dims ? dims->first : opts.default_native_width;
    e.native_height = dims ? dims->second : opts.default_native_height;
    m.entries.push_back(std::move(e));
  }
  return m;
}

json manifest_to_json(const DatasetManifest& m) {
  json arr = json::array();
  for (const ManifestEntry& e : m.entries) {
    json j = {{"image_id", e.image_id},
              {"split", e.split},
              {"image_path", e.image_path},
              {"annotation_path", e.annotation_path},
              {"native_width", e.native_width},
              {"native_height", e.native_height}};
    if (!e.points_path.empty()) j["points_path"] = e.points_path;
    arr.push_back(std::move(j));
  }
  return arr;
}

DatasetManifest manifest_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "manifest must be a JSON array");
  DatasetManifest m;
  std::set<std::string> seen;
  try {
    for (const auto& row : j) {
      ManifestEntry e;
      e.image_id = row.at("image_id").get<std::string>();
      e.split = row.value("split", "");
      e.image_path = row.value("image_path", "");
      e.annotation_path = row.value("annotation_path", "");
      e.native_width = row.value("native_width", std::size_t{0});
      e.native_height = row.value("native_height", std::size_t{0});
      e.points_path = row.value("points_path", "");
      if (e.image_id.empty() || !seen.insert(e.image_id).second) {
        throw Error(ErrorCode::kParse,
                    fmt::format("manifest image id '{}' is empty or repeated", e.image_id));
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad manifest: {}", e.what()));
  }
  if (!m.entries.empty()) m.split = m.entries.front().split;
  return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
  write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

DatasetManifest read_manifest(const fs::path& path) {
  return manifest_from_json(parse_json_file(path));
}

DensitySidecar sidecar_from_json(const json& j) {
  try {
    DensitySidecar s;
    s.image_id = j.at("image_id").get<std::string>();
    s.total_count = j.at("total_count").get<double>();
    s.grid_h = j.at("grid_h").get<std::size_t>();
    s.grid_w = j.at("grid_w").get<std::size_t>();
    if (!std::isfinite(s.total_count) || s.total_count < 0.0) {
      throw Error(ErrorCode::kParse, "sidecar total_count must be finite and >= 0");
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad density sidecar: {}", e.what()));
  }
}

ProbMap probmap_from_json(const json& j) {
  try {
    const auto height = j.at("height").get<std::size_t>();
    const auto width = j.at("width").get<std::size_t>();
    const auto block = j.at("block_size").get<int>();
    const auto n_bins = j.at("n_bins").get<std::size_t>();
    const auto& rows = j.at("probs");
    std::vector<double> flat;
    flat.reserve(rows.size() * n_bins);
    for (const auto& r : rows) {
      if (r.size() != n_bins) {
        throw Error(ErrorCode::kDimensionMismatch, "probability vector length != n_bins");
      }
      for (const auto& p : r) flat.push_back(p.get<double>());
    }
    ProbMap pm(height, width, block, n_bins, std::move(flat));
    if (j.contains("grid_h") && j.contains("grid_w") &&
        (j["grid_h"].get<std::size_t>() != pm.grid_h() ||
         j["grid_w"].get<std::size_t>() != pm.grid_w())) {
      throw Error(ErrorCode::kDimensionMismatch, "declared grid does not match image dims");
    }
    return pm;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("bad probability dump: {}", e.what()));
  }
}

}  // namespace densloc
