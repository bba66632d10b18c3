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

#include <random>

#include "doctest.h"
#include "dualtrack/robot_model.hpp"
#include "test_util.hpp"

namespace dualtrack {
namespace {

using testing::compact_model;
using testing::heavy_model;
using testing::random_config;

// Independent oracle: central finite differences of the forward kinematics.
// Angular rows come from the world-frame rotation increment.
Matrix6 fd_jacobian(const RobotModel& model, const Vector6& q) {
  const double h = 1e-6;
  Matrix6 J;
  for (int j = 0; j < 6; ++j) {
    Vector6 qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    const Pose fp = forward_kinematics(model, qp);
    const Pose fm = forward_kinematics(model, qm);
    J.block<3, 1>(0, j) = rotation_log(fp.R * fm.R.transpose()) / (2.0 * h);
    J.block<3, 1>(3, j) = (fp.p - fm.p) / (2.0 * h);
  }
  return J;
}

TEST_CASE("model files load with sane invariants") {
  for (const RobotModel* model : {&heavy_model(), &compact_model()}) {
    CHECK(model->joint_count == 6);
    CHECK(model->joint_axes.size() == 6);
    CHECK(model->joint_origins.size() == 6);
    CHECK_FALSE(model->accel_table.empty());
    for (int j = 0; j < 6; ++j) {
      CHECK(model->q_min[j] < model->q_max[j]);
      CHECK(model->qd_min[j] < 0.0);
      CHECK(model->qd_max[j] > 0.0);
      CHECK(model->joint_axes[j].norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("forward kinematics returns a proper rigid transform") {
  std::mt19937 rng(11);
  for (int i = 0; i < 10; ++i) {
    const Vector6 q = random_config(heavy_model(), rng);
    const Pose tcp = forward_kinematics(heavy_model(), q);
    CHECK(is_rotation(tcp.R, 1e-9));
    CHECK(tcp.p.allFinite());
  }
}

TEST_CASE("analytic Jacobian matches finite differences") {
  std::mt19937 rng(12);
  for (const RobotModel* model : {&heavy_model(), &compact_model()}) {
    for (int i = 0; i < 10; ++i) {
      const Vector6 q = random_config(*model, rng);
      const Matrix6 J = jacobian(*model, q);
      const Matrix6 Jfd = fd_jacobian(*model, q);
      CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-4);
    }
  }
}

TEST_CASE("accel_limits performs nearest-node lookup") {
  const RobotModel& model = heavy_model();
  const AccelTable::Node& node = model.accel_table.nodes.front();
  Vector6 q = Vector6::Zero();
  q[1] = node.q2;
  q[2] = node.q3;
  const Vector6 a = accel_limits(model, q);
  const AccelTable::Node& nearest = model.accel_table.nearest(q[1], q[2]);
  CHECK((a - nearest.accel).norm() == doctest::Approx(0.0));
  for (int j = 0; j < 6; ++j) CHECK(a[j] > 0.0);
}

TEST_CASE("limit helpers clamp and test consistently") {
  const RobotModel& model = compact_model();
  Vector6 q = model.q_max;
  q[0] += 1.0;
  CHECK_FALSE(model.within_limits(q));
  const Vector6 c = model.clamp_to_limits(q);
  CHECK(model.within_limits(c, 1e-12));
  CHECK(c[0] == doctest::Approx(model.q_max[0]));
}

TEST_CASE("single_arm_ik recovers a forward kinematics target") {
  std::mt19937 rng(13);
  const RobotModel& model = heavy_model();
  for (int i = 0; i < 5; ++i) {
    const Vector6 q_true = random_config(model, rng);
    const Pose target = forward_kinematics(model, q_true);
    // Seed near the solution; full-pose 6R IK is local by design.
    Vector6 seed = q_true;
    seed.array() += 0.05;
    const auto sol = single_arm_ik(model, target, model.clamp_to_limits(seed));
    REQUIRE(sol.has_value());
    const Pose reached = forward_kinematics(model, *sol);
    CHECK((reached.p - target.p).norm() < 1e-3);
    CHECK(rotation_log(reached.R * target.R.transpose()).norm() < 1e-5);
  }
}

}  // namespace
}  // namespace dualtrack
