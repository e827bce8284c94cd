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
#include <map>

#include "doctest.h"

#include "densloc/error.hpp"
#include "densloc/evaluation.hpp"
#include "densloc/gt_synthesis.hpp"
#include "densloc/localization.hpp"
#include "densloc/random.hpp"

using namespace densloc;

namespace {

DensityMap random_map(Rng& rng, std::size_t h, std::size_t w) {
  DensityMap dm(h, w);
  for (float& v : dm.values()) v = rng.below(4) == 0 ? static_cast<float>(rng.uniform()) : 0.0f;
  return dm;
}

// Non-separable scatter: each source pixel spreads over the in-bounds part of
// its 2-D kernel window, renormalized.
std::vector<double> brute_force_smooth(const DensityMap& dm, double sigma) {
  const long r = static_cast<long>(std::ceil(3 * sigma));
  const long h = static_cast<long>(dm.height()), w = static_cast<long>(dm.width());
  std::vector<double> out(dm.size(), 0.0);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const double v = dm.at(y, x);
      if (v == 0) continue;
      double s = 0;
      for (long yy = std::max(0L, y - r); yy <= std::min(h - 1, y + r); ++yy)
        for (long xx = std::max(0L, x - r); xx <= std::min(w - 1, x + r); ++xx)
          s += std::exp(-double((xx - x) * (xx - x) + (yy - y) * (yy - y)) / (2 * sigma * sigma));
      for (long yy = std::max(0L, y - r); yy <= std::min(h - 1, y + r); ++yy)
        for (long xx = std::max(0L, x - r); xx <= std::min(w - 1, x + r); ++xx)
          out[yy * w + xx] += v / s *
              std::exp(-double((xx - x) * (xx - x) + (yy - y) * (yy - y)) / (2 * sigma * sigma));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("gaussian_smooth") {
  SUBCASE("sigma 0 is the identity") {
    Rng rng(1);
    const DensityMap dm = random_map(rng, 20, 30);
    CHECK(gaussian_smooth(dm, 0.0) == dm);
  }
  SUBCASE("centered impulse") {
    DensityMap dm(41, 41);
    dm.at(20, 20) = 1.0f;
    const DensityMap out = gaussian_smooth(dm, 2.0);
    CHECK(total_count(out) == doctest::Approx(1.0).epsilon(1e-6));
    const auto v = out.values();
    CHECK(std::distance(v.begin(), std::max_element(v.begin(), v.end())) == 20 * 41 + 20);
    CHECK(out.at(20, 19) == out.at(20, 21));
    CHECK(out.at(19, 20) == out.at(21, 20));
  }
  SUBCASE("random map keeps its mass") {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
      const DensityMap dm = random_map(rng, 1 + rng.below(80), 1 + rng.below(80));
      const DensityMap out = gaussian_smooth(dm, 2.0);
      CHECK(std::abs(total_count(out) - total_count(dm)) <= 1e-3);
      CHECK(std::all_of(out.values().begin(), out.values().end(), [](float x) { return x >= 0; }));
    }
  }
  SUBCASE("matches the non-separable scatter") {
    Rng rng(3);
    const DensityMap dm = random_map(rng, 17, 23);
    const DensityMap out = gaussian_smooth(dm, 1.5);
    const auto oracle = brute_force_smooth(dm, 1.5);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(out.values()[i] == doctest::Approx(oracle[i]).epsilon(1e-5));
    }
  }
  SUBCASE("negative sigma") {
    CHECK_THROWS_AS(gaussian_smooth(DensityMap(4, 4), -1.0), Error);
  }
}

TEST_CASE("select_candidates") {
  SUBCASE("top 3% of a 10x10 map is 3 pixels") {
    Rng rng(4);
    DensityMap dm(10, 10);
    for (float& v : dm.values()) v = 0.01f + static_cast<float>(rng.uniform());
    const auto c = select_candidates(dm, 0.03);
    CHECK(c.size() == 3);
    double s = 0;
    for (const auto& x : c) s += x.weight;
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
  SUBCASE("single nonzero pixel") {
    DensityMap dm(10, 10);
    dm.at(4, 7) = 0.3f;
    const auto c = select_candidates(dm, 0.03);
    REQUIRE(c.size() == 1);
    CHECK(c[0].x == 7);
    CHECK(c[0].y == 4);
    CHECK(c[0].weight == 1.0);
  }
  SUBCASE("tie goes to row-major order") {
    DensityMap dm(10, 10);
    dm.at(0, 5) = 2.0f;
    dm.at(3, 2) = 2.0f;
    dm.at(5, 5) = 1.0f;
    const auto c = select_candidates(dm, 0.01);
    REQUIRE(c.size() == 1);
    CHECK(c[0].x == 5);
    CHECK(c[0].y == 0);
  }
  SUBCASE("all-zero map") {
    try {
      select_candidates(DensityMap(8, 8), 0.03);
      FAIL("expected no density mass");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoDensityMass);
    }
  }
  SUBCASE("bad fraction") {
    CHECK_THROWS_AS(select_candidates(DensityMap(8, 8), 0.0), Error);
    CHECK_THROWS_AS(select_candidates(DensityMap(8, 8), 1.5), Error);
  }
}

TEST_CASE("weighted_sample") {
  SUBCASE("single candidate") {
    const CandidateSet c{{3, 4, 1.0}};
    for (const Point& p : weighted_sample(c, 100, 9)) CHECK(p == Point{3, 4});
  }
  SUBCASE("zero-weight candidates are never drawn") {
    const CandidateSet c{{1, 1, 1.0}, {2, 2, 0.0}};
    for (const Point& p : weighted_sample(c, 1000, 9)) CHECK(p == Point{1, 1});
    const CandidateSet d{{2, 2, 0.0}, {1, 1, 1.0}, {5, 5, 0.0}};
    for (const Point& p : weighted_sample(d, 1000, 10)) CHECK(p == Point{1, 1});
  }
  SUBCASE("even split over 10000 draws") {
    const CandidateSet c{{0, 0, 0.5}, {1, 0, 0.5}};
    const auto s = weighted_sample(c, 10000, 77);
    const auto first = std::count_if(s.begin(), s.end(), [](const Point& p) { return p.x == 0; });
    CHECK(std::abs(static_cast<double>(first) / 10000.0 - 0.5) <= 0.02);
  }
  SUBCASE("deterministic") {
    const CandidateSet c{{0, 0, 0.2}, {1, 0, 0.3}, {2, 0, 0.5}};
    CHECK(weighted_sample(c, 500, 5) == weighted_sample(c, 500, 5));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(weighted_sample(CandidateSet{}, 5, 1), Error);
    CHECK_THROWS_AS(weighted_sample(CandidateSet{{0, 0, 1.0}}, 0, 1), Error);
  }
}

TEST_CASE("estimate_positions") {
  const LocalizationConfig cfg;
  const KernelSpec k = KernelSpec::with_sigma(4.0);
  SUBCASE("zero map gives no points") {
    const PointSet out = estimate_positions(DensityMap(64, 64), cfg);
    CHECK(out.empty());
    CHECK(out.width() == 64);
  }
  SUBCASE("single rendered point") {
    const DensityMap dm = render_gt(PointSet({{32, 32}}, 64, 64), k);
    const PointSet out = estimate_positions(dm, cfg);
    REQUIRE(out.size() == 1);
    CHECK(std::hypot(out.points()[0].x - 32, out.points()[0].y - 32) <= 3.0);
  }
  SUBCASE("five-object synthetic scene") {
    const auto scene = generate_scene(5, 224, 224, 32, 7, k);
    const PointSet out = estimate_positions(scene.density, cfg);
    REQUIRE(out.size() == 5);
    const auto m = match_points(out, scene.truth, 6.0);
    CHECK(m.matches.size() == 5);
  }
  SUBCASE("cardinality follows the rounded mass") {
    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
      const auto scene = generate_scene(1 + rng.below(12), 128, 128, 16, 100 + t, k);
      CHECK(estimate_positions(scene.density, cfg).size() == scene.truth.size());
    }
  }
  SUBCASE("deterministic") {
    const auto scene = generate_scene(9, 224, 224, 24, 3, k);
    CHECK(estimate_positions(scene.density, cfg) == estimate_positions(scene.density, cfg));
  }
  SUBCASE("sub-half mass rounds to zero objects") {
    DensityMap dm(16, 16);
    dm.at(3, 3) = 0.4f;
    CHECK(estimate_positions(dm, cfg).empty());
  }
  SUBCASE("invalid config") {
    LocalizationConfig bad;
    bad.top_percentile = 0.0;
    CHECK_THROWS_AS(estimate_positions(DensityMap(8, 8), bad), Error);
  }
}
