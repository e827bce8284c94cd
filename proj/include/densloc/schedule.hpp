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

// Linear warmup followed by cosine annealing.

#include <cstddef>
#include <string>
#include <vector>

namespace densloc {

struct ScheduleSpec {
  double base_lr = 1e-4;
  std::size_t warmup_epochs = 50;
  std::size_t total_epochs = 2600;
  double min_lr = 0.0;

  void validate() const;
};

// Epoch is 0-based. Warmup: base_lr * (epoch + 1) / warmup_epochs, so the
// last warmup epoch is exactly base_lr. Afterwards the rate follows a half
// cosine from base_lr down to min_lr at the final epoch.
double lr_at(const ScheduleSpec& spec, std::size_t epoch);

std::vector<double> lr_schedule(const ScheduleSpec& spec);

// "epoch,lr" header plus one row per epoch.
std::string schedule_csv(const ScheduleSpec& spec);

}  // namespace densloc
