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

#include "densloc/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <fmt/format.h>
#include <png.h>

#include "densloc/error.hpp"

namespace densloc {

RgbImage read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    throw Error(ErrorCode::kIo, fmt::format("cannot read PNG {}: {}", path.string(), img.message));
  }
  img.format = PNG_FORMAT_RGB;
  RgbImage out(img.width, img.height);
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::kIo, fmt::format("cannot decode PNG {}: {}", path.string(), img.message));
  }
  return out;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  png_image p;
  std::memset(&p, 0, sizeof p);
  p.version = PNG_IMAGE_VERSION;
  p.width = static_cast<png_uint_32>(img.width);
  p.height = static_cast<png_uint_32>(img.height);
  p.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&p, path.string().c_str(), 0, img.rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write PNG {}: {}", path.string(), p.message));
  }
}

namespace {

// Piecewise-linear jet: dark blue -> cyan -> yellow -> dark red.
void jet(double t, std::uint8_t* out) {
  t = std::clamp(t, 0.0, 1.0);
  auto ramp = [&](double center) {
    return std::clamp(1.5 - std::abs(4.0 * t - center), 0.0, 1.0);
  };
  out[0] = static_cast<std::uint8_t>(std::lround(255.0 * ramp(3.0)));
  out[1] = static_cast<std::uint8_t>(std::lround(255.0 * ramp(2.0)));
  out[2] = static_cast<std::uint8_t>(std::lround(255.0 * ramp(1.0)));
}

}  // namespace

RgbImage heatmap(const DensityMap& dm, std::size_t scale) {
  if (scale < 1) throw Error(ErrorCode::kInvalidArgument, "render scale must be >= 1");
  float peak = 0.0f;
  for (float v : dm.values()) peak = std::max(peak, v);
  RgbImage out(dm.width() * scale, dm.height() * scale);
  for (std::size_t r = 0; r < dm.height(); ++r) {
    for (std::size_t c = 0; c < dm.width(); ++c) {
      std::uint8_t color[3];
      jet(peak > 0.0f ? dm.at(r, c) / peak : 0.0, color);
      for (std::size_t dy = 0; dy < scale; ++dy) {
        for (std::size_t dx = 0; dx < scale; ++dx) {
          std::memcpy(out.px(c * scale + dx, r * scale + dy), color, 3);
        }
      }
    }
  }
  return out;
}

RgbImage upscale(const RgbImage& img, std::size_t scale) {
  if (scale < 1) throw Error(ErrorCode::kInvalidArgument, "render scale must be >= 1");
  if (scale == 1) return img;
  RgbImage out(img.width * scale, img.height * scale);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      std::memcpy(out.px(x, y), img.px(x / scale, y / scale), 3);
    }
  }
  return out;
}

RgbImage blend(const RgbImage& base, const RgbImage& top, double alpha) {
  if (base.width != top.width || base.height != top.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("cannot blend {}x{} with {}x{}", base.width, base.height, top.width,
                            top.height));
  }
  RgbImage out(base.width, base.height);
  for (std::size_t i = 0; i < out.rgb.size(); ++i) {
    out.rgb[i] = static_cast<std::uint8_t>(
        std::lround((1.0 - alpha) * base.rgb[i] + alpha * top.rgb[i]));
  }
  return out;
}

void draw_markers(RgbImage& img, const PointSet& points, std::size_t scale) {
  static constexpr std::uint8_t kMarker[3] = {255, 255, 255};
  static constexpr std::uint8_t kOutline[3] = {0, 0, 0};
  const long arm = static_cast<long>(std::max<std::size_t>(3, 2 * scale));
  const long w = static_cast<long>(img.width), h = static_cast<long>(img.height);
  auto put = [&](long x, long y, const std::uint8_t* c) {
    if (x >= 0 && y >= 0 && x < w && y < h) std::memcpy(img.px(x, y), c, 3);
  };
  for (const Point& p : points.points()) {
    const long cx = std::lround((p.x + 0.5) * static_cast<double>(scale) - 0.5);
    const long cy = std::lround((p.y + 0.5) * static_cast<double>(scale) - 0.5);
    for (long d = -arm - 1; d <= arm + 1; ++d) {
      for (long o = -1; o <= 1; ++o) {
        put(cx + d, cy + o, kOutline);
        put(cx + o, cy + d, kOutline);
      }
    }
    for (long d = -arm; d <= arm; ++d) {
      put(cx + d, cy, kMarker);
      put(cx, cy + d, kMarker);
    }
  }
}

RgbImage hconcat(const std::vector<RgbImage>& panels, std::size_t gap) {
  if (panels.empty()) return {};
  std::size_t w = gap * (panels.size() - 1);
  std::size_t h = 0;
  for (const RgbImage& p : panels) {
    w += p.width;
    h = std::max(h, p.height);
  }
  RgbImage out(w, h, 255);
  std::size_t x0 = 0;
  for (const RgbImage& p : panels) {
    for (std::size_t y = 0; y < p.height; ++y) {
      std::memcpy(out.px(x0, y), p.px(0, y), p.width * 3);
    }
    x0 += p.width + gap;
  }
  return out;
}

RgbImage compose_figure(const FigureInputs& in) {
  if (in.image && (in.image->width != in.density.width() ||
                   in.image->height != in.density.height())) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("image is {}x{} but density is {}x{}", in.image->width,
                            in.image->height, in.density.width(), in.density.height()));
  }
  if (in.points && (in.points->width() != static_cast<double>(in.density.width()) ||
                    in.points->height() != static_cast<double>(in.density.height()))) {
    throw Error(ErrorCode::kDimensionMismatch, "points and density have different dims");
  }
  RgbImage heat = heatmap(in.density, in.scale);
  if (!in.image) {
    if (in.points) draw_markers(heat, *in.points, in.scale);
    return heat;
  }
  const RgbImage original = upscale(*in.image, in.scale);
  RgbImage overlay = blend(original, heat, in.alpha);
  if (!in.points) return hconcat({original, overlay}, 4 * in.scale);
  draw_markers(overlay, *in.points, in.scale);
  return hconcat({original, heat, overlay}, 4 * in.scale);
}

}  // namespace densloc
