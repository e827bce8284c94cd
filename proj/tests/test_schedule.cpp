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
#include <sstream>

#include "doctest.h"

#include "densloc/error.hpp"
#include "densloc/schedule.hpp"

using namespace densloc;

TEST_CASE("warmup + cosine at the reference recipe") {
  const ScheduleSpec spec{1e-4, 50, 2600, 0.0};
  CHECK(lr_at(spec, 49) == 1e-4);
  // base * 1 / 50
  CHECK(lr_at(spec, 0) == doctest::Approx(2e-6).epsilon(1e-12));
  CHECK(std::abs(lr_at(spec, 2599)) <= 1e-12);
  CHECK(lr_at(spec, 50) == 1e-4);
  CHECK(lr_at(spec, 24) == doctest::Approx(5e-5).epsilon(1e-12));
  // Halfway through the cosine phase: (2549 / 2) epochs past warmup is not an
  // integer, so check the closed form directly.
  const double t = (1000.0 - 50.0) / (2600.0 - 1.0 - 50.0);
  CHECK(lr_at(spec, 1000) == doctest::Approx(0.5e-4 * (1 + std::cos(M_PI * t))).epsilon(1e-12));
}

TEST_CASE("schedule properties") {
  for (const ScheduleSpec spec : {ScheduleSpec{1e-4, 50, 2600, 0.0}, ScheduleSpec{3e-3, 5, 40, 1e-5},
                                  ScheduleSpec{1.0, 0, 10, 0.1}, ScheduleSpec{1.0, 1, 3, 0.0}}) {
    const auto lrs = lr_schedule(spec);
    const auto peak = std::max_element(lrs.begin(), lrs.end());
    CHECK(*peak == spec.base_lr);
    if (spec.warmup_epochs > 0) {
      CHECK(static_cast<std::size_t>(peak - lrs.begin()) == spec.warmup_epochs - 1);
      CHECK(std::abs(lrs[spec.warmup_epochs - 1] - lrs[spec.warmup_epochs]) <=
            spec.base_lr / static_cast<double>(spec.warmup_epochs));
    }
    for (std::size_t e = spec.warmup_epochs + 1; e < lrs.size(); ++e) CHECK(lrs[e] <= lrs[e - 1]);
    CHECK(std::abs(lrs.back() - spec.min_lr) <= 1e-12);
  }
}

TEST_CASE("schedule errors") {
  const ScheduleSpec spec{1e-4, 50, 2600, 0.0};
  CHECK_THROWS_AS(lr_at(spec, 2600), Error);
  CHECK_THROWS_AS(lr_at(ScheduleSpec{1e-4, 10, 10, 0.0}, 0), Error);
  CHECK_THROWS_AS(lr_at(ScheduleSpec{1e-4, 1, 10, 1e-3}, 0), Error);
}

TEST_CASE("CSV output") {
  const std::string csv = schedule_csv(ScheduleSpec{1e-4, 2, 5, 0.0});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,lr");
  std::getline(in, line);
  CHECK(line == "0,5.0000000000000002e-05");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}
