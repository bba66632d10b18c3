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

#include <cmath>
#include <cstdio>
#include <limits>

#include "doctest.h"
#include "dualtrack/config_opt.hpp"
#include "dualtrack/exec_sim.hpp"
#include "test_util.hpp"

namespace dualtrack {
namespace {

using testing::asset_path;
using testing::compact_model;
using testing::heavy_model;
using testing::place_robot2;

struct Fixture {
  DualConfig cfg;
  RobotModel robot2p;
  MotionProgram program;
  Vector3 corner;  // waypoint between the two Cartesian segments
  Vector3 finish;

  explicit Fixture(double blend) {
    cfg = load_dual_config(asset_path("configs/seed_curve1.json"));
    robot2p = place_robot2(compact_model(), cfg);
    Vector6 qa = cfg.q0_1;
    Vector6 qb = qa;
    qb[0] += 0.08;
    qb[1] -= 0.05;
    Vector6 qc = qb;
    qc[0] += 0.06;
    qc[2] += 0.07;
    const Pose t1 = forward_kinematics(heavy_model(), qb);
    const Pose t2 = forward_kinematics(heavy_model(), qc);
    corner = t1.p;
    finish = t2.p;

    program.start_q1 = qa;
    program.start_q2 = cfg.q0_2;
    Primitive l1, l2;
    l1.kind = PrimitiveKind::kMoveL;
    l1.target = t1;
    l1.speed = 100.0;
    l1.blend_radius = blend;
    l2.kind = PrimitiveKind::kMoveL;
    l2.target = t2;
    l2.speed = 100.0;
    l2.blend_radius = 0.0;
    program.robot1 = {l1, l2};
    Primitive park;
    park.kind = PrimitiveKind::kMoveJ;
    park.joint_target = cfg.q0_2;
    park.speed = 1.0;
    park.blend_radius = 0.0;
    program.robot2 = {park, park};
  }
};

TEST_CASE("blend-0 execution passes through waypoints exactly") {
  const Fixture f(0.0);
  const ExecutionRecord record =
      execute(f.program, heavy_model(), f.robot2p, {});
  REQUIRE(record.size() > 10);
  REQUIRE(record.segment_switch_times.size() == 2);
  const double dt = record.t[1] - record.t[0];
  CHECK(dt == doctest::Approx(1.0 / 250.0));

  const std::size_t idx = static_cast<std::size_t>(
      std::lround(record.segment_switch_times[0] / dt));
  REQUIRE(idx < record.size());
  const Pose at_corner = forward_kinematics(heavy_model(), record.q1[idx]);
  CHECK((at_corner.p - f.corner).norm() < 1e-6);
  // The synchronized peer is at its own waypoint at the same instant.
  CHECK((record.q2[idx] - f.program.robot2[0].joint_target).norm() < 1e-9);

  const Pose at_end =
      forward_kinematics(heavy_model(), record.q1[record.size() - 1]);
  CHECK((at_end.p - f.finish).norm() < 1e-6);
  CHECK(record.segment_switch_times[1] > record.segment_switch_times[0]);
}

TEST_CASE("blended corners stay inside the blend radius") {
  const double blend = 8.0;
  const Fixture f(blend);
  const ExecutionRecord record =
      execute(f.program, heavy_model(), f.robot2p, {});
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < record.size(); ++i) {
    const Pose tcp = forward_kinematics(heavy_model(), record.q1[i]);
    closest = std::min(closest, (tcp.p - f.corner).norm());
  }
  // Containment: the executed path approaches the corner no closer than the
  // blend curve but always enters the blend_radius ball.
  CHECK(closest <= blend + 1e-3);
  CHECK(closest > 1e-4);  // the corner itself is bypassed
}

TEST_CASE("executed joints respect the limits") {
  const Fixture f(5.0);
  const ExecutionRecord record =
      execute(f.program, heavy_model(), f.robot2p, {});
  for (std::size_t i = 0; i < record.size(); ++i) {
    CHECK(heavy_model().within_limits(record.q1[i], 1e-6));
    CHECK(f.robot2p.within_limits(record.q2[i], 1e-6));
  }
  CHECK(record.time_scale >= 1.0);
}

TEST_CASE("oversized blend radius raises a corner path failure") {
  const Fixture probe(0.0);
  const ExecutionRecord nominal =
      execute(probe.program, heavy_model(), probe.robot2p, {});
  (void)nominal;
  // A blend radius over half of either adjacent segment length must throw.
  Fixture f(0.0);
  f.program.robot1[0].blend_radius = 1e6;
  try {
    execute(f.program, heavy_model(), f.robot2p, {});
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.kind() == SimulationError::Kind::kCornerPath);
  }
}

TEST_CASE("average_runs reduces to execute without noise") {
  const Fixture f(5.0);
  const ExecutionRecord one = execute(f.program, heavy_model(), f.robot2p, {});
  const ExecutionRecord avg =
      average_runs(f.program, heavy_model(), f.robot2p, 3, {});
  REQUIRE(avg.size() == one.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK((avg.q1[i] - one.q1[i]).norm() < 1e-12);
    CHECK((avg.q2[i] - one.q2[i]).norm() < 1e-12);
  }
}

TEST_CASE("repeatability noise is seeded deterministically") {
  const Fixture f(5.0);
  ExecOptions opts;
  opts.noise_sigma1 = 0.5;
  opts.noise_sigma2 = 0.2;
  opts.seed = 99;
  const ExecutionRecord a = execute(f.program, heavy_model(), f.robot2p, opts);
  const ExecutionRecord b = execute(f.program, heavy_model(), f.robot2p, opts);
  ExecOptions other = opts;
  other.seed = 100;
  const ExecutionRecord c =
      execute(f.program, heavy_model(), f.robot2p, other);
  REQUIRE(a.size() == b.size());
  double same = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = std::max(same, (a.q1[i] - b.q1[i]).norm());
    if (i < c.size()) diff = std::max(diff, (a.q1[i] - c.q1[i]).norm());
  }
  CHECK(same == 0.0);
  CHECK(diff > 0.0);
}

TEST_CASE("execution record CSV round-trips") {
  const Fixture f(0.0);
  const ExecutionRecord record =
      execute(f.program, heavy_model(), f.robot2p, {});
  const std::string file = "/tmp/dualtrack_test_record.csv";
  write_execution_record_csv(file, record);
  const ExecutionRecord back = read_execution_record_csv(file);
  std::remove(file.c_str());
  REQUIRE(back.size() == record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    CHECK(back.t[i] == doctest::Approx(record.t[i]).epsilon(1e-12));
    CHECK((back.q1[i] - record.q1[i]).norm() < 1e-12);
    CHECK((back.q2[i] - record.q2[i]).norm() < 1e-12);
  }
}

}  // namespace
}  // namespace dualtrack
