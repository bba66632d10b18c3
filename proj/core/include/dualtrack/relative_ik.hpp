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

#ifndef DUALTRACK_RELATIVE_IK_HPP_
#define DUALTRACK_RELATIVE_IK_HPP_

#include <string>
#include <variant>
#include <vector>

#include "dualtrack/curve.hpp"
#include "dualtrack/geometry.hpp"
#include "dualtrack/robot_model.hpp"

namespace dualtrack {

// IK convergence tolerances; far inside the 0.5 mm / 3 deg task budget.
inline constexpr double kIkPosTol = 1e-3;    // mm
inline constexpr double kIkNormTol = 1e-5;   // rad
inline constexpr int kIkMaxIters = 100;
inline constexpr double kIkDamping = 0.01;

/// The 15 configuration parameters of the dual-arm system: both arms' seed
/// joints plus the planar pose of arm 2's base (zero z-offset, zero
/// roll/pitch).
struct DualConfig {
  Vector6 q0_1 = Vector6::Zero();
  Vector6 q0_2 = Vector6::Zero();
  double base2_x = 0.0;    // mm
  double base2_y = 0.0;    // mm
  double base2_yaw = 0.0;  // rad

  Pose base2_transform() const;

  Eigen::Matrix<double, 15, 1> as_vector() const;
  static DualConfig from_vector(const Eigen::Matrix<double, 15, 1>& v);
};

/// Both arm models plus the world pose of arm 2's base from the config.
/// Arm 1's base comes from its model file; arm 2's base_transform field is
/// replaced by the configuration under optimization.
struct DualArmSystem {
  const RobotModel* robot1 = nullptr;
  const RobotModel* robot2 = nullptr;
  Pose base2;  // world pose of robot 2 base

  RobotModel robot2_placed() const;  // robot2 with base2 applied
};

/// 12-joint path tracking the curve, one entry per curve sample.
struct JointPath {
  std::vector<double> lambda;
  std::vector<Vector6> q1;
  std::vector<Vector6> q2;
  std::vector<double> residual_p;  // mm
  std::vector<double> residual_n;  // rad

  std::size_t size() const { return lambda.size(); }
};

enum class IkFailure { kNonConvergent, kJointLimitLocked };

struct IkError {
  IkFailure kind = IkFailure::kNonConvergent;
  double lambda = 0.0;  // curve position of the failing sample
  std::string message;
};

using SolvePathResult = std::variant<JointPath, IkError>;

/// Relative tracking error at one curve sample: translational error in world
/// mm and the tool-axis/normal misalignment angle in [0, pi].
struct RelativeError {
  Vector3 e_p = Vector3::Zero();
  double theta = 0.0;
};

RelativeError relative_error(const RobotModel& robot1,
                             const RobotModel& robot2_placed,
                             const Vector6& q1, const Vector6& q2,
                             const Vector3& p_star, const Vector3& n_star);

/// 6x12 relative Jacobian: rows 1-3 differentiate the translational
/// constraint, rows 4-6 the normal constraint (rank <= 2). Columns 1-6 are
/// robot 1 joints, 7-12 robot 2.
Eigen::Matrix<double, 6, 12> relative_jacobian(
    const RobotModel& robot1, const RobotModel& robot2_placed,
    const Vector6& q1, const Vector6& q2, const Vector3& p_star,
    const Vector3& n_star);

/// Damped-least-squares resolution along the whole curve, seeding each
/// sample from the previous one. The returned path satisfies the exactness
/// tolerances (kIkPosTol, kIkNormTol) at every sample, or an IkError names
/// the first failing lambda.
SolvePathResult solve_path(const DualConfig& config, const Curve& curve,
                           const RobotModel& robot1, const RobotModel& robot2);

/// Writes a JointPath as CSV: lambda, q1[1..6], q2[1..6], residual_p,
/// residual_n.
void write_joint_path_csv(const std::string& path, const JointPath& jp);
JointPath read_joint_path_csv(const std::string& path);

}  // namespace dualtrack

#endif  // DUALTRACK_RELATIVE_IK_HPP_
