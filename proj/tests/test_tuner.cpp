// Copyright 2026 The Dualtrack Authors
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

#include <cstdio>
#include <fstream>
#include <variant>

#include "doctest.h"
#include "dualtrack/config_opt.hpp"
#include "dualtrack/tuner.hpp"
#include "test_util.hpp"

namespace dualtrack {
namespace {

using testing::asset_path;
using testing::compact_model;
using testing::heavy_model;
using testing::place_robot2;

// A small tracking setup: IK path over a 150 mm prefix of the fixture curve,
// greedily fitted, executed once. Shared across the cases below.
struct TuneFixture {
  DualConfig cfg;
  RobotModel robot2p;
  Curve curve;
  MotionProgram program;
  ExecutionRecord record;

  TuneFixture() {
    cfg = load_dual_config(asset_path("configs/seed_curve1.json"));
    robot2p = place_robot2(compact_model(), cfg);
    curve = resample(load_curve(asset_path("curves/curve1.csv")), 1.0);
    if (curve.size() > 151) curve.samples.resize(151);
    const SolvePathResult result =
        solve_path(cfg, curve, heavy_model(), compact_model());
    REQUIRE(std::holds_alternative<JointPath>(result));
    GreedyFitOptions options;
    options.mu = 150.0;
    program = greedy_fit_dual(std::get<JointPath>(result), heavy_model(),
                              robot2p, curve, options);
    record = execute(program, heavy_model(), robot2p, {});
  }
};

const TuneFixture& fixture() {
  static const TuneFixture f;
  return f;
}

TEST_CASE("proportional_adjust validates gamma") {
  const TuneFixture& f = fixture();
  CHECK_THROWS(proportional_adjust(f.program, f.record, f.curve, heavy_model(),
                                   f.robot2p, 0.0));
  CHECK_THROWS(proportional_adjust(f.program, f.record, f.curve, heavy_model(),
                                   f.robot2p, 1.5));
}

TEST_CASE("proportional_adjust preserves the program structure") {
  const TuneFixture& f = fixture();
  const MotionProgram out = proportional_adjust(
      f.program, f.record, f.curve, heavy_model(), f.robot2p, 0.7);
  REQUIRE(out.size() == f.program.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    CHECK(out.robot1[k].kind == f.program.robot1[k].kind);
    CHECK(out.robot2[k].kind == f.program.robot2[k].kind);
    CHECK(out.robot1[k].speed == f.program.robot1[k].speed);
    CHECK(out.robot1[k].blend_radius == f.program.robot1[k].blend_radius);
  }
  CHECK((out.start_q1 - f.program.start_q1).norm() == 0.0);
}

TEST_CASE("multipeak_adjust preserves the program structure") {
  const TuneFixture& f = fixture();
  const MotionProgram out = multipeak_adjust(f.program, f.record, f.curve,
                                             heavy_model(), f.robot2p, {});
  REQUIRE(out.size() == f.program.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    CHECK(out.robot1[k].kind == f.program.robot1[k].kind);
    CHECK(out.robot2[k].kind == f.program.robot2[k].kind);
  }
}

TEST_CASE("tune returns a well-formed result on a short budget") {
  const TuneFixture& f = fixture();
  TuneOptions options;
  options.max_iterations = 2;
  options.runs = 1;
  const TuneResult result = tune(f.program, f.curve, heavy_model(), f.robot2p,
                                 {}, 150.0, options);
  CHECK(result.program.size() == f.program.size());
  CHECK(!result.history.empty());
  CHECK(result.history.size() <=
        static_cast<std::size_t>(options.max_iterations));
  CHECK(result.mu_cmd > 0.0);
  if (result.success) {
    CHECK(result.metrics.within(Tolerances{}));
  }
}

TEST_CASE("tune history CSV has one row per iteration") {
  std::vector<TuneHistoryEntry> history;
  for (int i = 1; i <= 3; ++i) {
    history.push_back({i, 100.0 * i, 0.1 * i, 0.2 * i, 95.0 * i, 0.01 * i});
  }
  const std::string file = "/tmp/dualtrack_test_history.csv";
  write_tune_history_csv(file, history);
  std::ifstream in(file);
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  std::remove(file.c_str());
  CHECK(rows == 3);
}

}  // namespace
}  // namespace dualtrack
