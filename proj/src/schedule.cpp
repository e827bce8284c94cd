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

#include "densloc/schedule.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "densloc/error.hpp"

namespace densloc {

void ScheduleSpec::validate() const {
  if (!(min_lr >= 0.0 && min_lr <= base_lr) || !std::isfinite(base_lr)) {
    throw Error(ErrorCode::kInvalidArgument, "schedule needs 0 <= min_lr <= base_lr");
  }
  if (warmup_epochs >= total_epochs) {
    throw Error(ErrorCode::kInvalidArgument, "schedule needs warmup_epochs < total_epochs");
  }
}

double lr_at(const ScheduleSpec& spec, std::size_t epoch) {
  spec.validate();
  if (epoch >= spec.total_epochs) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("epoch {} outside [0, {})", epoch, spec.total_epochs));
  }
  if (epoch < spec.warmup_epochs) {
    return spec.base_lr * static_cast<double>(epoch + 1) /
           static_cast<double>(spec.warmup_epochs);
  }
  const std::size_t span = spec.total_epochs - 1 - spec.warmup_epochs;
  if (span == 0) return spec.base_lr;
  const double t = static_cast<double>(epoch - spec.warmup_epochs) / static_cast<double>(span);
  return spec.min_lr +
         0.5 * (spec.base_lr - spec.min_lr) * (1.0 + std::cos(std::numbers::pi * t));
}

std::vector<double> lr_schedule(const ScheduleSpec& spec) {
  spec.validate();
  std::vector<double> out(spec.total_epochs);
  for (std::size_t e = 0; e < spec.total_epochs; ++e) out[e] = lr_at(spec, e);
  return out;
}

std::string schedule_csv(const ScheduleSpec& spec) {
  std::string out = "epoch,lr\n";
  const auto lrs = lr_schedule(spec);
  for (std::size_t e = 0; e < lrs.size(); ++e) out += fmt::format("{},{:.17g}\n", e, lrs[e]);
  return out;
}

}  // namespace densloc
