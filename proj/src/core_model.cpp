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

#include "densloc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "densloc/error.hpp"

namespace densloc {

namespace {

constexpr double kProbSumTolerance = 1e-6;
constexpr std::string_view kPlaceholder = "{n}";

}  // namespace

BinSpec BinSpec::unit(int block_size, int max_closed,
                      double open_representative,
                      std::string prompt_template) {
  if (max_closed < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max closed bin label must be >= 0");
  }
  std::vector<Bin> bins;
  bins.reserve(static_cast<std::size_t>(max_closed) + 2);
  for (int n = 0; n <= max_closed; ++n) {
    bins.push_back({n, false, static_cast<double>(n)});
  }
  double open_rep = open_representative < 0.0 ? max_closed + 1.0 : open_representative;
  bins.push_back({max_closed + 1, true, open_rep});
  return BinSpec(block_size, std::move(bins), std::move(prompt_template));
}

BinSpec::BinSpec(int block_size, std::vector<Bin> bins, std::string prompt_template)
    : block_size_(block_size),
      bins_(std::move(bins)),
      prompt_template_(std::move(prompt_template)) {
  if (block_size_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "block size must be >= 1");
  }
  if (bins_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "bin spec needs at least one closed bin and the open bin");
  }
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const Bin& b = bins_[i];
    const bool last = i + 1 == bins_.size();
    if (b.label < 0) {
      throw Error(ErrorCode::kInvalidArgument, "bin labels must be nonnegative");
    }
    if (i > 0 && b.label <= bins_[i - 1].label) {
      throw Error(ErrorCode::kInvalidArgument, "bin labels must be strictly increasing");
    }
    if (b.open != last) {
      throw Error(ErrorCode::kInvalidArgument,
                  "exactly one open bin is required and it must be last");
    }
    if (!b.open && b.representative != static_cast<double>(b.label)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("closed bin {} must have representative {}", b.label, b.label));
    }
    if (!std::isfinite(b.representative) || b.representative < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "bin representative must be finite and >= 0");
    }
  }
  if (prompt_template_.find(kPlaceholder) == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "prompt template needs a {n} placeholder");
  }
}

std::string BinSpec::prompt(std::size_t bin_index) const {
  if (bin_index >= bins_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bin index out of range");
  }
  const Bin& b = bins_[bin_index];
  std::string count = b.open ? fmt::format("more than {}", max_closed_label())
                             : std::to_string(b.label);
  std::string out = prompt_template_;
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), count);
  return out;
}

long BlockCountGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0L);
}

std::size_t blocks_along(std::size_t extent, int block_size) {
  const auto b = static_cast<std::size_t>(block_size);
  return (extent + b - 1) / b;
}

ProbMap::ProbMap(std::size_t height, std::size_t width, int block_size,
                 std::size_t n_bins, std::vector<double> probs)
    : height_(height),
      width_(width),
      block_size_(block_size),
      n_bins_(n_bins),
      probs_(std::move(probs)) {
  if (height_ == 0 || width_ == 0) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  if (block_size_ < 1 || n_bins_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "block size and bin count must be positive");
  }
  grid_h_ = blocks_along(height_, block_size_);
  grid_w_ = blocks_along(width_, block_size_);
  if (probs_.size() != grid_h_ * grid_w_ * n_bins_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("probability map has {} values, expected {}x{}x{}",
                            probs_.size(), grid_h_, grid_w_, n_bins_));
  }
  for (std::size_t b = 0; b < grid_h_ * grid_w_; ++b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_bins_; ++k) {
      const double p = probs_[b * n_bins_ + k];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("block {} has a negative or non-finite probability", b));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("block {} probabilities sum to {}", b, sum));
    }
  }
}

BlockCountGrid blockify(const PointSet& points, int block_size) {
  if (!(points.width() > 0.0) || !(points.height() > 0.0)) {
    throw Error(ErrorCode::kDegenerateImage, "degenerate image");
  }
  if (block_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "block size must be >= 1");
  }
  BlockCountGrid grid;
  grid.grid_h = blocks_along(static_cast<std::size_t>(std::ceil(points.height())), block_size);
  grid.grid_w = blocks_along(static_cast<std::size_t>(std::ceil(points.width())), block_size);
  grid.counts.assign(grid.grid_h * grid.grid_w, 0);
  for (const Point& p : points.points()) {
    auto i = static_cast<std::size_t>(std::floor(p.y / block_size));
    auto j = static_cast<std::size_t>(std::floor(p.x / block_size));
    i = std::min(i, grid.grid_h - 1);
    j = std::min(j, grid.grid_w - 1);
    ++grid.counts[i * grid.grid_w + j];
  }
  return grid;
}

std::size_t quantize(long count, const BinSpec& spec) {
  if (count < 0) {
    throw Error(ErrorCode::kInvalidArgument, "count must be >= 0");
  }
  const auto& bins = spec.bins();
  if (count > spec.max_closed_label()) return spec.open_index();
  // Largest closed bin whose label does not exceed the count.
  auto it = std::upper_bound(bins.begin(), bins.end() - 1, count,
                             [](long c, const Bin& b) { return c < b.label; });
  if (it == bins.begin()) return 0;
  return static_cast<std::size_t>(std::distance(bins.begin(), it) - 1);
}

std::vector<double> one_hot(std::size_t bin_index, const BinSpec& spec) {
  if (bin_index >= spec.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bin index out of range");
  }
  std::vector<double> v(spec.size(), 0.0);
  v[bin_index] = 1.0;
  return v;
}

double expected_count(std::span<const double> block_probs, const BinSpec& spec) {
  if (block_probs.size() != spec.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("probability vector has {} entries, bin spec has {}",
                            block_probs.size(), spec.size()));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < block_probs.size(); ++k) {
    acc += block_probs[k] * spec.bins()[k].representative;
  }
  return acc;
}

DensityMap decode_density(const ProbMap& pm, const BinSpec& spec) {
  if (pm.n_bins() != spec.size() || pm.block_size() != spec.block_size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "probability map does not match the bin spec");
  }
  const auto bs = static_cast<std::size_t>(spec.block_size());
  DensityMap dm(pm.height(), pm.width());
  for (std::size_t i = 0; i < pm.grid_h(); ++i) {
    const std::size_t r0 = i * bs;
    const std::size_t r1 = std::min(r0 + bs, pm.height());
    for (std::size_t j = 0; j < pm.grid_w(); ++j) {
      const std::size_t c0 = j * bs;
      const std::size_t c1 = std::min(c0 + bs, pm.width());
      const double area = static_cast<double>((r1 - r0) * (c1 - c0));
      const auto per_pixel = static_cast<float>(expected_count(pm.block(i, j), spec) / area);
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) dm.at(r, c) = per_pixel;
      }
    }
  }
  return dm;
}

}  // namespace densloc
