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

#include "densloc/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "densloc/error.hpp"

namespace densloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDegenerateImage: return "degenerate_image";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kSceneInfeasible: return "scene_infeasible";
    case ErrorCode::kNoDensityMass: return "no_density_mass";
    case ErrorCode::kInsufficientSamples: return "insufficient_samples";
    case ErrorCode::kEmptyCandidates: return "empty_candidates";
    case ErrorCode::kNoRecords: return "no_records";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kNotDmap: return "not_dmap";
    case ErrorCode::kBadVersion: return "bad_version";
    case ErrorCode::kShortRead: return "short_read";
    case ErrorCode::kInvalidPayload: return "invalid_payload";
    case ErrorCode::kMissingSplitFile: return "missing_split_file";
    case ErrorCode::kMissingAnnotation: return "missing_annotation";
    case ErrorCode::kMissingFile: return "missing_file";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

PointSet::PointSet(std::vector<Point> points, double width, double height)
    : points_(std::move(points)), width_(width), height_(height) {
  if (!(width_ > 0.0) || !(height_ > 0.0)) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  for (const Point& p : points_) {
    if (!(p.x >= 0.0 && p.x < width_ && p.y >= 0.0 && p.y < height_)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("point ({}, {}) outside {}x{} image", p.x, p.y, width_, height_));
    }
  }
}

DensityMap::DensityMap(std::size_t height, std::size_t width)
    : height_(height), width_(width), values_(height * width, 0.0f) {}

DensityMap::DensityMap(std::size_t height, std::size_t width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height_ * width_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("density map {}x{} given {} values", height_, width_, values_.size()));
  }
}

double total_count(const DensityMap& dm) {
  double acc = 0.0;
  for (float v : dm.values()) acc += v;
  return acc;
}

}  // namespace densloc
