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

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

#include "densloc/commands.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "densloc_cli";

int run(const std::string& args, const std::string& stdout_file = "/dev/null",
        const std::string& stderr_file = "/dev/null") {
  const std::string cmd = std::string(DENSLOC_CLI) + " " + args + " >" + stdout_file + " 2>" +
                          stderr_file;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) { return densloc::read_text_file(p); }

}  // namespace

TEST_CASE("lr-schedule prints CSV") {
  fs::create_directories(kWork);
  const fs::path out = kWork / "lr.csv";
  REQUIRE(run("lr-schedule", out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("epoch,lr\n0,", 0) == 0);
  CHECK(csv.find("\n49,0.0001\n") != std::string::npos);
}

TEST_CASE("synth then localize is independent of --jobs") {
  fs::remove_all(kWork / "s");
  REQUIRE(run("--seed 5 --out " + (kWork / "s").string() + " synth --scenes 6 --n-max 8") == 0);
  CHECK(fs::exists(kWork / "s" / "manifest.json"));
  const std::string common = " localize --manifest " + (kWork / "s" / "manifest.json").string() +
                             " --density-dir " + (kWork / "s" / "density").string();
  REQUIRE(run("--jobs 1 --out " + (kWork / "j1").string() + common) == 0);
  REQUIRE(run("--jobs 8 --out " + (kWork / "j8").string() + common) == 0);
  for (int i = 0; i < 6; ++i) {
    const std::string f = densloc::scene_id(i) + ".json";
    CHECK(slurp(kWork / "j1" / "predictions" / f) == slurp(kWork / "j8" / "predictions" / f));
  }
  REQUIRE(run("--out " + (kWork / "ev").string() + " eval --manifest " +
              (kWork / "s" / "manifest.json").string() + " --density-dir " +
              (kWork / "s" / "density").string()) == 0);
  CHECK(fs::exists(kWork / "ev" / "metrics.json"));
}

TEST_CASE("errors are reported as JSON with a nonzero exit") {
  fs::create_directories(kWork);
  const fs::path err = kWork / "err.txt";
  const int rc = run("eval --manifest /nonexistent/manifest.json --density-dir /tmp",
                     "/dev/null", err.string());
  CHECK(rc != 0);
  const std::string msg = slurp(err);
  CHECK(msg.find("\"error\"") != std::string::npos);
  CHECK(msg.find("manifest") != std::string::npos);
  CHECK(run("no-such-command") != 0);
}
