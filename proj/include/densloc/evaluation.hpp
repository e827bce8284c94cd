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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "densloc/types.hpp"

namespace densloc {

struct CountRecord {
  std::string image_id;
  double predicted = 0.0;
  double ground_truth = 0.0;
};

struct CountMetrics {
  double mae = 0.0;
  double rmse = 0.0;
};

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (pred, truth)
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct LocalizationMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double match_radius = 0.0;
};

struct MetricsReport {
  std::size_t n_images = 0;
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<LocalizationMetrics> localization;
};

inline constexpr double kDefaultMatchRadius = 8.0;

// MAE = mean |pred - gt|, RMSE = sqrt(mean (pred - gt)^2). Throws
// Error(kNoRecords) on an empty list.
CountMetrics count_metrics(std::span<const CountRecord> records);

// Greedy one-to-one matching over all pairs by ascending distance (ties by
// pred index, then truth index); pairs beyond `radius` stay unmatched.
MatchResult match_points(const PointSet& pred, const PointSet& truth, double radius);

// Micro-averaged precision/recall/f1 from summed counts, using the same
// empty-set conventions as match_points.
LocalizationMetrics aggregate_matches(std::size_t matched, std::size_t n_pred,
                                      std::size_t n_truth, double radius);

nlohmann::json to_json(const MetricsReport& report);

struct TableRow {
  std::string model;
  double mae = 0.0;
  double rmse = 0.0;
};

// Fixed-width comparison table with columns Model, MAE, RMSE.
std::string format_table(std::span<const TableRow> rows);

// Parses "model,mae,rmse" CSV rows; a header line starting with "Model" is
// skipped.
std::vector<TableRow> parse_table_rows(const std::string& csv);

}  // namespace densloc
