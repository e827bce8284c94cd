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

#include "densloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "densloc/error.hpp"

namespace densloc {

CountMetrics count_metrics(std::span<const CountRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kNoRecords, "no records");
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (const CountRecord& r : records) {
    if (!(r.ground_truth >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("record {} has negative ground truth", r.image_id));
    }
    const double e = r.predicted - r.ground_truth;
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(records.size());
  CountMetrics m{abs_sum / n, std::sqrt(sq_sum / n)};
  // Both are rounded independently; keep mae <= rmse when they agree to an ulp.
  m.rmse = std::max(m.rmse, m.mae);
  return m;
}

namespace {

void fill_rates(std::size_t matched, std::size_t n_pred, std::size_t n_truth,
                double& precision, double& recall, double& f1) {
  if (n_pred == 0 && n_truth == 0) {
    precision = recall = f1 = 1.0;
    return;
  }
  if (n_pred == 0 || n_truth == 0) {
    precision = recall = f1 = 0.0;
    return;
  }
  precision = static_cast<double>(matched) / static_cast<double>(n_pred);
  recall = static_cast<double>(matched) / static_cast<double>(n_truth);
  f1 = matched == 0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

MatchResult match_points(const PointSet& pred, const PointSet& truth, double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "match radius must be > 0");
  }
  const auto& P = pred.points();
  const auto& T = truth.points();
  const double r2 = radius * radius;
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (std::size_t j = 0; j < T.size(); ++j) {
      const double dx = P[i].x - T[j].x, dy = P[i].y - T[j].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= r2) pairs.emplace_back(d2, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<char> pred_used(P.size()), truth_used(T.size());
  MatchResult res;
  for (const auto& [d2, i, j] : pairs) {
    if (pred_used[i] || truth_used[j]) continue;
    pred_used[i] = truth_used[j] = 1;
    res.matches.emplace_back(i, j);
  }
  fill_rates(res.matches.size(), P.size(), T.size(), res.precision, res.recall, res.f1);
  return res;
}

LocalizationMetrics aggregate_matches(std::size_t matched, std::size_t n_pred,
                                      std::size_t n_truth, double radius) {
  LocalizationMetrics m;
  m.match_radius = radius;
  fill_rates(matched, n_pred, n_truth, m.precision, m.recall, m.f1);
  return m;
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["n_images"] = report.n_images;
  j["mae"] = report.mae;
  j["rmse"] = report.rmse;
  if (report.localization) {
    j["localization"] = {
        {"precision", report.localization->precision},
        {"recall", report.localization->recall},
        {"f1", report.localization->f1},
        {"match_radius", report.localization->match_radius},
    };
  }
  return j;
}

std::string format_table(std::span<const TableRow> rows) {
  std::size_t name_w = 5;
  for (const TableRow& r : rows) name_w = std::max(name_w, r.model.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}\n", "Model", name_w, "MAE", "RMSE");
  for (const TableRow& r : rows) {
    out += fmt::format("{:<{}}  {:>8.2f}  {:>8.2f}\n", r.model, name_w, r.mae, r.rmse);
  }
  return out;
}

std::vector<TableRow> parse_table_rows(const std::string& csv) {
  std::vector<TableRow> rows;
  std::istringstream in(csv);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("Model", 0) == 0) continue;
    const auto c2 = line.rfind(',');
    const auto c1 = c2 == std::string::npos ? c2 : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(ErrorCode::kParse, fmt::format("table row {}: expected model,mae,rmse", line_no));
    }
    try {
      rows.push_back({line.substr(0, c1), std::stod(line.substr(c1 + 1, c2 - c1 - 1)),
                      std::stod(line.substr(c2 + 1))});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParse, fmt::format("table row {}: bad number", line_no));
    }
  }
  return rows;
}

}  // namespace densloc
