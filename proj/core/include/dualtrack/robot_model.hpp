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

#ifndef DUALTRACK_ROBOT_MODEL_HPP_
#define DUALTRACK_ROBOT_MODEL_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dualtrack/geometry.hpp"

namespace dualtrack {

/// Per-joint |qdd|max over a regular (q2, q3) grid, nearest-node lookup.
struct AccelTable {
  struct Node {
    double q2 = 0.0;
    double q3 = 0.0;
    Vector6 accel = Vector6::Zero();
  };
  std::vector<Node> nodes;

  bool empty() const { return nodes.empty(); }
  /// Nearest node by squared distance; ties go to the lower-index node.
  const Node& nearest(double q2, double q3) const;
};

/// Serial 6R arm: successive rigid transforms, axes and origins given in the
/// home (all-zero) configuration. Lengths in mm, angles in rad.
struct RobotModel {
  std::string name;
  int joint_count = 6;
  std::vector<Vector3> joint_axes;     // unit, home frame
  std::vector<Vector3> joint_origins;  // mm, offset from previous joint frame
  Pose tool_transform;                 // flange -> TCP
  Pose base_transform;                 // base in world
  Vector6 q_min = Vector6::Zero();
  Vector6 q_max = Vector6::Zero();
  Vector6 qd_min = Vector6::Zero();
  Vector6 qd_max = Vector6::Zero();
  AccelTable accel_table;

  bool within_limits(const Vector6& q, double tol = 0.0) const;
  Vector6 clamp_to_limits(const Vector6& q) const;
};

/// Loads a robot model from a JSON description. The acceleration table is a
/// side CSV (rows: q2, q3, a1..a6) referenced by the "accel_table" field,
/// resolved relative to the model file. Throws std::runtime_error on schema
/// or invariant violations.
RobotModel load_robot_model(const std::string& path);

/// TCP pose in world: base * joint transforms * tool.
Pose forward_kinematics(const RobotModel& model, const Vector6& q);

/// Geometric Jacobian at the TCP, rows [omega; v], columns by joint index:
/// J(q) qdot = [omega rad/s; v mm/s].
Matrix6 jacobian(const RobotModel& model, const Vector6& q);

/// Symmetric per-joint acceleration bound at q, nearest-grid lookup on
/// (q2, q3). Throws on an empty table.
Vector6 accel_limits(const RobotModel& model, const Vector6& q);

/// Damped-least-squares IK for a single arm to a full 6-dof pose. Returns
/// nullopt when the position/orientation residual does not converge below
/// (tol_p mm, tol_r rad) within max_iters.
std::optional<Vector6> single_arm_ik(const RobotModel& model,
                                     const Pose& target, const Vector6& seed,
                                     double tol_p = 1e-4, double tol_r = 1e-6,
                                     int max_iters = 200);

}  // namespace dualtrack

#endif  // DUALTRACK_ROBOT_MODEL_HPP_
