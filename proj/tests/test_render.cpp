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

#include <filesystem>

#include "doctest.h"

#include "densloc/error.hpp"
#include "densloc/gt_synthesis.hpp"
#include "densloc/render.hpp"

using namespace densloc;
namespace fs = std::filesystem;

namespace {

bool is_white(const RgbImage& img, std::size_t x, std::size_t y) {
  const auto* p = img.px(x, y);
  return p[0] == 255 && p[1] == 255 && p[2] == 255;
}

}  // namespace

TEST_CASE("heatmap") {
  DensityMap dm(4, 6);
  dm.at(1, 2) = 2.0f;
  const RgbImage img = heatmap(dm, 3);
  CHECK(img.width == 18);
  CHECK(img.height == 12);
  // An all-zero map still renders (uniform low color).
  const RgbImage flat = heatmap(DensityMap(2, 2), 1);
  CHECK(flat.px(0, 0)[2] == flat.px(1, 1)[2]);
  // The peak is hotter (more red) than the background.
  CHECK(img.px(7, 4)[0] > img.px(0, 0)[0]);
}

TEST_CASE("markers sit on the point coordinates") {
  DensityMap dm(20, 20);
  const PointSet pts({{10, 5}}, 20, 20);
  RgbImage img = heatmap(dm, 2);
  draw_markers(img, pts, 2);
  // The marker center lies inside the 2x2 block drawn for pixel (10, 5).
  bool hit = false;
  for (std::size_t y = 10; y < 12; ++y)
    for (std::size_t x = 20; x < 22; ++x) hit = hit || is_white(img, x, y);
  CHECK(hit);
  CHECK_FALSE(is_white(img, 2, 2));
}

TEST_CASE("compose_figure layouts") {
  const auto scene = generate_scene(3, 32, 24, 8, 1, KernelSpec::with_sigma(2.0));
  RgbImage photo(32, 24, 100);
  SUBCASE("density only") {
    const RgbImage out = compose_figure({std::nullopt, scene.density, std::nullopt, 2, 0.5});
    CHECK(out.width == 64);
    CHECK(out.height == 48);
  }
  SUBCASE("three panels") {
    const RgbImage out = compose_figure({photo, scene.density, scene.truth, 1, 0.5});
    CHECK(out.height == 24);
    CHECK(out.width >= 3 * 32);
    CHECK(out.width < 3 * 32 + 32);
  }
  SUBCASE("two panels") {
    const RgbImage out = compose_figure({photo, scene.density, std::nullopt, 1, 0.5});
    CHECK(out.width >= 2 * 32);
    CHECK(out.width < 3 * 32);
  }
  SUBCASE("mismatched image dims") {
    CHECK_THROWS_AS(compose_figure({RgbImage(10, 10), scene.density, std::nullopt, 1, 0.5}), Error);
  }
  SUBCASE("mismatched point dims") {
    CHECK_THROWS_AS(
        compose_figure({std::nullopt, scene.density, PointSet({}, 10, 10), 1, 0.5}), Error);
  }
}

TEST_CASE("blend") {
  const RgbImage a(2, 2, 0), b(2, 2, 200);
  CHECK(blend(a, b, 0.5).px(1, 1)[0] == 100);
  CHECK_THROWS_AS(blend(a, RgbImage(3, 2), 0.5), Error);
}

TEST_CASE("PNG round trip") {
  const fs::path dir = fs::temp_directory_path() / "densloc_test_png";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RgbImage img(5, 3);
  for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 7);
  write_png(img, dir / "x.png");
  const RgbImage back = read_png(dir / "x.png");
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.rgb == img.rgb);
  CHECK_THROWS_AS(read_png(dir / "none.png"), Error);
}
