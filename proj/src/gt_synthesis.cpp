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

#include "densloc/gt_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "densloc/error.hpp"
#include "densloc/random.hpp"

namespace densloc {

KernelSpec KernelSpec::with_sigma(double sigma) {
  KernelSpec k;
  k.sigma = sigma;
  k.radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  return k;
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel sigma must be > 0");
  }
  if (radius < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kernel radius must be >= 1");
  }
}

namespace {

// 1-D weights of the window [first, first + size) around `center`.
struct Window {
  long first = 0;
  std::vector<double> w;
};

Window axis_window(double center, long extent, const KernelSpec& k) {
  const long mid = std::lround(center);
  const long lo = std::max(0L, mid - k.radius);
  const long hi = std::min(extent - 1, mid + k.radius);
  Window win;
  win.first = lo;
  const double inv = 1.0 / (2.0 * k.sigma * k.sigma);
  for (long t = lo; t <= hi; ++t) {
    const double d = static_cast<double>(t) - center;
    win.w.push_back(std::exp(-d * d * inv));
  }
  return win;
}

}  // namespace

DensityMap render_gt(const PointSet& points, const KernelSpec& kernel) {
  kernel.validate();
  const auto h = static_cast<std::size_t>(std::ceil(points.height()));
  const auto w = static_cast<std::size_t>(std::ceil(points.width()));
  std::vector<double> acc(h * w, 0.0);
  for (const Point& p : points.points()) {
    const Window wx = axis_window(p.x, static_cast<long>(w), kernel);
    const Window wy = axis_window(p.y, static_cast<long>(h), kernel);
    double sx = 0.0, sy = 0.0;
    for (double v : wx.w) sx += v;
    for (double v : wy.w) sy += v;
    const double norm = 1.0 / (sx * sy);
    for (std::size_t a = 0; a < wy.w.size(); ++a) {
      const std::size_t row = static_cast<std::size_t>(wy.first) + a;
      const double ry = wy.w[a] * norm;
      double* dst = acc.data() + row * w + static_cast<std::size_t>(wx.first);
      for (std::size_t b = 0; b < wx.w.size(); ++b) dst[b] += ry * wx.w[b];
    }
  }
  std::vector<float> values(acc.size());
  std::transform(acc.begin(), acc.end(), values.begin(),
                 [](double v) { return static_cast<float>(v); });
  return DensityMap(h, w, std::move(values));
}

SyntheticScene generate_scene(std::size_t n, std::size_t width, std::size_t height,
                              double min_sep, std::uint64_t seed,
                              const KernelSpec& kernel) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  if (min_sep < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "min_sep must be >= 0");
  }
  Rng rng(seed);
  const double W = static_cast<double>(width);
  const double H = static_cast<double>(height);
  const double sep2 = min_sep * min_sep;
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Point cand{std::min(rng.uniform(0.0, W), std::nextafter(W, 0.0)),
                       std::min(rng.uniform(0.0, H), std::nextafter(H, 0.0))};
      placed = std::none_of(pts.begin(), pts.end(), [&](const Point& q) {
        const double dx = q.x - cand.x, dy = q.y - cand.y;
        return dx * dx + dy * dy < sep2;
      });
      if (placed) pts.push_back(cand);
    }
    if (!placed) {
      throw Error(ErrorCode::kSceneInfeasible,
                  fmt::format("scene infeasible: placed {} of {} points with min_sep {}",
                              i, n, min_sep));
    }
  }
  SyntheticScene scene;
  scene.truth = PointSet(std::move(pts), W, H);
  scene.density = render_gt(scene.truth, kernel);
  scene.seed = seed;
  scene.min_sep = min_sep;
  return scene;
}

}  // namespace densloc
