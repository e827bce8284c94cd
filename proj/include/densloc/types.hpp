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

#include <cstddef>
#include <span>
#include <vector>

namespace densloc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Object centers for one image, in pixel coordinates. A pixel at column j
// and row i sits at coordinate (j, i).
class PointSet {
 public:
  PointSet() = default;
  // Throws Error(kDegenerateImage) for non-positive dims and
  // Error(kInvalidArgument) for out-of-bounds points.
  PointSet(std::vector<Point> points, double width, double height);

  const std::vector<Point>& points() const noexcept { return points_; }
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<Point> points_;
  double width_ = 0.0;
  double height_ = 0.0;
};

// Row-major grid of per-pixel mass. Values are stored as 32-bit floats so the
// in-memory map and its DMAP file are bit-identical.
class DensityMap {
 public:
  DensityMap() = default;
  DensityMap(std::size_t height, std::size_t width);
  // Throws Error(kDimensionMismatch) if values.size() != height * width.
  DensityMap(std::size_t height, std::size_t width, std::vector<float> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }

  float& at(std::size_t row, std::size_t col) {
    return values_[row * width_ + col];
  }
  float at(std::size_t row, std::size_t col) const {
    return values_[row * width_ + col];
  }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const DensityMap&, const DensityMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> values_;
};

// Sum of all values, accumulated in double precision.
double total_count(const DensityMap& dm);

}  // namespace densloc
