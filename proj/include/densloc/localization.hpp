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

// Object position estimation from a density map: smooth, keep the top
// percentile of pixels, draw weighted samples and cluster them with k equal
// to the rounded count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "densloc/types.hpp"

namespace densloc {

struct LocalizationConfig {
  double smooth_sigma = 2.0;
  double top_percentile = 0.03;
  std::size_t samples_per_object = 50;
  std::size_t kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
  std::size_t kmeans_restarts = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Candidate {
  std::size_t x = 0;
  std::size_t y = 0;
  double weight = 0.0;
};

using CandidateSet = std::vector<Candidate>;

// Separable truncated Gaussian (radius ceil(3 sigma)). Each pixel scatters
// its mass over the in-bounds part of the kernel, renormalized, so the total
// is preserved at the borders. sigma == 0 returns the input.
DensityMap gaussian_smooth(const DensityMap& dm, double sigma);

// The ceil(fraction * H * W) highest pixels, ties by row-major order. Pixels
// with zero value carry no probability and are dropped. Weights sum to 1.
// Throws Error(kNoDensityMass) when nothing positive is selected.
CandidateSet select_candidates(const DensityMap& dm, double top_percentile);

// Draws with replacement, probability proportional to weight.
std::vector<Point> weighted_sample(std::span<const Candidate> cands,
                                   std::size_t n_samples, std::uint64_t seed);

struct KMeansOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  // Independent seedings; the run with the lowest final objective wins.
  std::size_t restarts = 1;
};

struct KMeansResult {
  std::vector<Point> centers;
  std::vector<std::size_t> assignment;
  double objective = 0.0;  // within-cluster sum of squared distances
  // Objective after the initial assignment and after every Lloyd iteration
  // of the returned run.
  std::vector<double> history;
  std::size_t iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm seeded by greedy k-means++. An empty cluster is moved to
// the sample farthest from its assigned center.
KMeansResult kmeans(std::span<const Point> samples, std::size_t k,
                    const KMeansOptions& opts);

// Sum of squared distances from each sample to its nearest center.
double kmeans_objective(std::span<const Point> samples, std::span<const Point> centers);

PointSet estimate_positions(const DensityMap& dm, const LocalizationConfig& cfg);

}  // namespace densloc
