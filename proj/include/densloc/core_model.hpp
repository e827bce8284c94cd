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

// Blockwise count bins and the decode path from per-block bin probabilities
// to density maps.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "densloc/types.hpp"

namespace densloc {

struct Bin {
  int label = 0;          // lower bound of the bin; exact count for closed bins
  bool open = false;      // true for the single top bin covering counts > label - 1
  double representative = 0.0;
};

class BinSpec {
 public:
  static constexpr const char* kDefaultPrompt = "There are {n} cars";

  // Unit-width closed bins 0..max_closed plus one open bin whose
  // representative value defaults to max_closed + 1.
  static BinSpec unit(int block_size = 8, int max_closed = 10,
                      double open_representative = -1.0,
                      std::string prompt_template = kDefaultPrompt);

  // Validates ordering, the single trailing open bin, closed representatives
  // and the template placeholder. Throws Error(kInvalidArgument).
  BinSpec(int block_size, std::vector<Bin> bins,
          std::string prompt_template = kDefaultPrompt);

  int block_size() const noexcept { return block_size_; }
  const std::vector<Bin>& bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::size_t open_index() const noexcept { return bins_.size() - 1; }
  int max_closed_label() const noexcept { return bins_[bins_.size() - 2].label; }
  const std::string& prompt_template() const noexcept { return prompt_template_; }

  // "There are 3 cars" for closed bins, "There are more than 10 cars" for the
  // open bin.
  std::string prompt(std::size_t bin_index) const;

 private:
  int block_size_;
  std::vector<Bin> bins_;
  std::string prompt_template_;
};

struct BlockCountGrid {
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
  std::vector<long> counts;  // row-major

  long at(std::size_t i, std::size_t j) const { return counts[i * grid_w + j]; }
  long total() const;
};

// Per-block probability vectors over the bins of a BinSpec. The image
// extent is kept so that partial edge blocks decode to the right pixels.
class ProbMap {
 public:
  // Throws Error(kDimensionMismatch) when the grid does not tile the image
  // with `block_size` or probs has the wrong length, and Error(kInvalidArgument)
  // when a block vector is negative or does not sum to 1 within 1e-6.
  ProbMap(std::size_t height, std::size_t width, int block_size,
          std::size_t n_bins, std::vector<double> probs);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  int block_size() const noexcept { return block_size_; }
  std::size_t grid_h() const noexcept { return grid_h_; }
  std::size_t grid_w() const noexcept { return grid_w_; }
  std::size_t n_bins() const noexcept { return n_bins_; }

  std::span<const double> block(std::size_t i, std::size_t j) const {
    return {probs_.data() + (i * grid_w_ + j) * n_bins_, n_bins_};
  }

 private:
  std::size_t height_;
  std::size_t width_;
  int block_size_;
  std::size_t grid_h_;
  std::size_t grid_w_;
  std::size_t n_bins_;
  std::vector<double> probs_;
};

// Number of blocks along an axis of `extent` pixels; the last block may be
// partial.
std::size_t blocks_along(std::size_t extent, int block_size);

BlockCountGrid blockify(const PointSet& points, int block_size);

std::size_t quantize(long count, const BinSpec& spec);

std::vector<double> one_hot(std::size_t bin_index, const BinSpec& spec);

double expected_count(std::span<const double> block_probs, const BinSpec& spec);

// Each block's expected count is spread uniformly over the pixels the block
// covers.
DensityMap decode_density(const ProbMap& pm, const BinSpec& spec);

}  // namespace densloc
