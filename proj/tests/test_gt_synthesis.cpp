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

#include <cmath>

#include "doctest.h"

#include "densloc/error.hpp"
#include "densloc/gt_synthesis.hpp"
#include "densloc/random.hpp"

using namespace densloc;

namespace {

// Direct 2-D evaluation over the whole image, no separability.
std::vector<double> brute_force_kernel(const Point& p, std::size_t w, std::size_t h,
                                       const KernelSpec& k) {
  std::vector<double> out(w * h, 0.0);
  const long mx = std::lround(p.x), my = std::lround(p.y);
  double sum = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const long dc = static_cast<long>(c) - mx, dr = static_cast<long>(r) - my;
      if (std::labs(dc) > k.radius || std::labs(dr) > k.radius) continue;
      const double dx = static_cast<double>(c) - p.x, dy = static_cast<double>(r) - p.y;
      const double v = std::exp(-(dx * dx + dy * dy) / (2 * k.sigma * k.sigma));
      out[r * w + c] = v;
      sum += v;
    }
  }
  for (double& v : out) v /= sum;
  return out;
}

std::size_t argmax(const DensityMap& dm) {
  const auto v = dm.values();
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace

TEST_CASE("kernel spec") {
  const KernelSpec k = KernelSpec::with_sigma(4.0);
  CHECK(k.radius == 12);
  CHECK(KernelSpec::with_sigma(0.1).radius == 1);
  CHECK_THROWS_AS((KernelSpec{0.0, 3}.validate()), Error);
  CHECK_THROWS_AS((KernelSpec{1.0, 0}.validate()), Error);
}

TEST_CASE("render_gt") {
  const KernelSpec k = KernelSpec::with_sigma(4.0);
  SUBCASE("no points") {
    const DensityMap dm = render_gt(PointSet({}, 224, 224), k);
    CHECK(dm.height() == 224);
    CHECK(total_count(dm) == 0.0);
  }
  SUBCASE("point at the image center") {
    for (double sigma : {0.5, 2.0, 4.0, 9.0}) {
      const DensityMap dm = render_gt(PointSet({{112, 112}}, 224, 224),
                                      KernelSpec::with_sigma(sigma));
      CHECK(total_count(dm) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(argmax(dm) == 112 * 224 + 112);
    }
  }
  SUBCASE("corner point matches the clipped brute-force kernel") {
    const PointSet ps({{0, 0}}, 64, 48);
    const DensityMap dm = render_gt(ps, k);
    CHECK(std::abs(total_count(dm) - 1.0) <= 1e-6);
    const auto oracle = brute_force_kernel({0, 0}, 64, 48, k);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(dm.values()[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
    }
  }
  SUBCASE("sub-pixel point matches brute force") {
    const Point p{30.7, 2.2};
    const DensityMap dm = render_gt(PointSet({p}, 40, 40), k);
    const auto oracle = brute_force_kernel(p, 40, 40, k);
    double max_err = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      max_err = std::max(max_err, std::abs(dm.values()[i] - oracle[i]));
    }
    CHECK(max_err < 1e-7);
  }
}

TEST_CASE("render_gt conserves mass and stays nonnegative") {
  Rng rng(2024);
  const KernelSpec k = KernelSpec::with_sigma(4.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts(rng.below(51));
    for (Point& p : pts) {
      // Bias a third of the points onto the border.
      const double x = rng.below(3) == 0 ? 0.0 : rng.uniform(0, 224);
      p = {x, rng.below(5) == 0 ? 223.999 : rng.uniform(0, 224)};
    }
    const DensityMap dm = render_gt(PointSet(pts, 224, 224), k);
    CHECK(std::abs(total_count(dm) - static_cast<double>(pts.size())) <= 1e-3);
    CHECK(std::all_of(dm.values().begin(), dm.values().end(), [](float v) { return v >= 0; }));
  }
}

TEST_CASE("generate_scene") {
  SUBCASE("empty scene") {
    const auto s = generate_scene(0, 224, 224, 32, 7);
    CHECK(s.truth.empty());
    CHECK(total_count(s.density) == 0.0);
  }
  SUBCASE("n=5 at min_sep 32") {
    const auto s = generate_scene(5, 224, 224, 32, 7);
    REQUIRE(s.truth.size() == 5);
    CHECK(std::abs(total_count(s.density) - 5.0) <= 1e-3);
    const auto& p = s.truth.points();
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        CHECK(std::hypot(p[i].x - p[j].x, p[i].y - p[j].y) >= 32.0);
      }
    }
  }
  SUBCASE("deterministic for a fixed seed") {
    const auto a = generate_scene(12, 224, 224, 20, 123);
    const auto b = generate_scene(12, 224, 224, 20, 123);
    CHECK(a.truth == b.truth);
    CHECK(a.density == b.density);
    const auto c = generate_scene(12, 224, 224, 20, 124);
    CHECK_FALSE(a.truth == c.truth);
  }
  SUBCASE("infeasible placement") {
    try {
      generate_scene(50, 64, 64, 40, 1);
      FAIL("expected scene infeasible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSceneInfeasible);
      CHECK(std::string(e.what()).find("scene infeasible") != std::string::npos);
    }
  }
}
