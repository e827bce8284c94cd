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

// Ground-truth density rendering and synthetic scenes used as a test oracle.

#include <cstddef>
#include <cstdint>

#include "densloc/types.hpp"

namespace densloc {

struct KernelSpec {
  double sigma = 4.0;
  int radius = 12;  // truncation radius in pixels

  // sigma with radius = ceil(3 sigma), at least 1.
  static KernelSpec with_sigma(double sigma);
  void validate() const;
};

struct SyntheticScene {
  PointSet truth;
  DensityMap density;
  std::uint64_t seed = 0;
  double min_sep = 0.0;
};

inline constexpr int kPlacementAttempts = 10000;

// Every point contributes a truncated Gaussian sampled at integer pixel
// coordinates and renormalized to unit mass over the in-bounds pixels.
DensityMap render_gt(const PointSet& points, const KernelSpec& kernel);

// Rejection sampling of `n` points at least `min_sep` apart; each point gets
// kPlacementAttempts tries. Throws Error(kSceneInfeasible) when placement fails.
SyntheticScene generate_scene(std::size_t n, std::size_t width, std::size_t height,
                              double min_sep, std::uint64_t seed,
                              const KernelSpec& kernel = KernelSpec{});

}  // namespace densloc
