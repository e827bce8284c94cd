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

// Heatmap and overlay rendering to PNG.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "densloc/types.hpp"

namespace densloc {

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), rgb(w * h * 3, fill) {}

  std::uint8_t* px(std::size_t x, std::size_t y) { return rgb.data() + (y * width + x) * 3; }
  const std::uint8_t* px(std::size_t x, std::size_t y) const {
    return rgb.data() + (y * width + x) * 3;
  }
};

// 8-bit gray, gray+alpha, RGB or RGBA PNGs; alpha is dropped.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const RgbImage& img, const std::filesystem::path& path);

// Jet-style color map of dm / max(dm), each density pixel drawn as a
// scale x scale square.
RgbImage heatmap(const DensityMap& dm, std::size_t scale);

// Pixel-replicating upscale.
RgbImage upscale(const RgbImage& img, std::size_t scale);

// out = (1 - alpha) * base + alpha * top. Throws Error(kDimensionMismatch).
RgbImage blend(const RgbImage& base, const RgbImage& top, double alpha);

// Cross markers at point coordinates (in density pixels) on an image drawn
// at `scale`.
void draw_markers(RgbImage& img, const PointSet& points, std::size_t scale);

RgbImage hconcat(const std::vector<RgbImage>& panels, std::size_t gap);

struct FigureInputs {
  std::optional<RgbImage> image;  // must match the density dims
  DensityMap density;
  std::optional<PointSet> points;
  std::size_t scale = 1;
  double alpha = 0.5;
};

// density only       -> heatmap
// density + points   -> heatmap with markers
// image + density    -> [original | overlay]
// all three          -> [original | density map | overlay with markers]
RgbImage compose_figure(const FigureInputs& in);

}  // namespace densloc
