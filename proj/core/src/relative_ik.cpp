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

#include "dualtrack/relative_ik.hpp"

#include <cmath>
#include <stdexcept>

#include "dualtrack/csv.hpp"

namespace dualtrack {

Pose DualConfig::base2_transform() const {
  return Pose(axis_angle_rotation(Vector3::UnitZ(), base2_yaw),
              Vector3(base2_x, base2_y, 0.0));
}

Eigen::Matrix<double, 15, 1> DualConfig::as_vector() const {
  Eigen::Matrix<double, 15, 1> v;
  v.segment<6>(0) = q0_1;
  v.segment<6>(6) = q0_2;
  v[12] = base2_x;
  v[13] = base2_y;
  v[14] = base2_yaw;
  return v;
}

DualConfig DualConfig::from_vector(const Eigen::Matrix<double, 15, 1>& v) {
  DualConfig c;
  c.q0_1 = v.segment<6>(0);
  c.q0_2 = v.segment<6>(6);
  c.base2_x = v[12];
  c.base2_y = v[13];
  c.base2_yaw = v[14];
  return c;
}

RobotModel DualArmSystem::robot2_placed() const {
  RobotModel placed = *robot2;
  placed.base_transform = base2;
  return placed;
}

RelativeError relative_error(const RobotModel& robot1,
                             const RobotModel& robot2_placed,
                             const Vector6& q1, const Vector6& q2,
                             const Vector3& p_star, const Vector3& n_star) {
  const Pose T1 = forward_kinematics(robot1, q1);
  const Pose T2 = forward_kinematics(robot2_placed, q2);
  RelativeError err;
  err.e_p = T1.p - T2.p - T2.R * p_star;
  err.theta = angle_between(T1.R.col(2), -(T2.R * n_star));
  return err;
}

Eigen::Matrix<double, 6, 12> relative_jacobian(
    const RobotModel& robot1, const RobotModel& robot2_placed,
    const Vector6& q1, const Vector6& q2, const Vector3& p_star,
    const Vector3& n_star) {
  const Pose T1 = forward_kinematics(robot1, q1);
  const Pose T2 = forward_kinematics(robot2_placed, q2);
  const Matrix6 J1 = jacobian(robot1, q1);
  const Matrix6 J2 = jacobian(robot2_placed, q2);
  const auto Jw1 = J1.topRows<3>();
  const auto Jv1 = J1.bottomRows<3>();
  const auto Jw2 = J2.topRows<3>();
  const auto Jv2 = J2.bottomRows<3>();

  const Vector3 a = T1.R.col(2);         // tool z-axis of arm 1
  const Vector3 b = -(T2.R * n_star);    // target direction for it
  const Vector3 rp = T2.R * p_star;

  Eigen::Matrix<double, 6, 12> J;
  // Translational constraint p1 - p2 - R2 p* = 0.
  J.block<3, 6>(0, 0) = Jv1;
  J.block<3, 6>(0, 6) = -Jv2 + skew(rp) * Jw2;
  // Normal constraint via the cross-product residual a x b (rank <= 2):
  // d(a x b) = (w1 x a) x b + a x (w2 x b).
  J.block<3, 6>(3, 0) = skew(b) * skew(a) * Jw1;
  J.block<3, 6>(3, 6) = -skew(a) * skew(b) * Jw2;
  return J;
}

namespace {

struct SampleIk {
  bool converged = false;
  bool limit_locked = false;
};

SampleIk solve_sample(const RobotModel& r1, const RobotModel& r2,
                      const Vector3& p_star, const Vector3& n_star,
                      Vector6& q1, Vector6& q2) {
  SampleIk out;
  bool clamped_any = false;
  for (int iter = 0; iter < kIkMaxIters; ++iter) {
    const Pose T1 = forward_kinematics(r1, q1);
    const Pose T2 = forward_kinematics(r2, q2);
    const Vector3 a = T1.R.col(2);
    const Vector3 b = -(T2.R * n_star);
    const Vector3 e_p = T1.p - T2.p - T2.R * p_star;
    const double theta = angle_between(a, b);
    if (e_p.norm() <= kIkPosTol && theta <= kIkNormTol) {
      out.converged = true;
      return out;
    }
    Eigen::Matrix<double, 6, 1> nu;
    nu << -e_p, -(a.cross(b));
    const auto J = relative_jacobian(r1, r2, q1, q2, p_star, n_star);
    const Eigen::Matrix<double, 12, 12> H =
        J.transpose() * J +
        kIkDamping * Eigen::Matrix<double, 12, 12>::Identity();
    const Vector12 dq = H.ldlt().solve(J.transpose() * nu);
    q1 += dq.segment<6>(0);
    q2 += dq.segment<6>(6);
    const Vector6 q1c = r1.clamp_to_limits(q1);
    const Vector6 q2c = r2.clamp_to_limits(q2);
    if ((q1c - q1).norm() > 0.0 || (q2c - q2).norm() > 0.0) clamped_any = true;
    q1 = q1c;
    q2 = q2c;
  }
  out.limit_locked = clamped_any;
  return out;
}

}  // namespace

SolvePathResult solve_path(const DualConfig& config, const Curve& curve,
                           const RobotModel& robot1,
                           const RobotModel& robot2) {
  if (curve.samples.empty()) {
    return IkError{IkFailure::kNonConvergent, 0.0, "empty curve"};
  }
  DualArmSystem sys{&robot1, &robot2, config.base2_transform()};
  const RobotModel r2 = sys.robot2_placed();

  JointPath path;
  Vector6 q1 = config.q0_1;
  Vector6 q2 = config.q0_2;
  const double step =
      curve.size() > 1 ? curve.samples[1].lambda - curve.samples[0].lambda
                       : 0.5;
  // Per-sample joint jump bound; a branch flip shows up as a spike far above
  // what continuous path following produces at this resolution.
  const double continuity_bound = std::max(0.02, 0.2 * step);

  for (const auto& s : curve.samples) {
    const Vector6 q1_prev = q1;
    const Vector6 q2_prev = q2;
    const SampleIk r = solve_sample(robot1, r2, s.p, s.n, q1, q2);
    if (!r.converged) {
      const char* what =
          r.limit_locked ? "joint limit locked" : "IK did not converge";
      return IkError{r.limit_locked ? IkFailure::kJointLimitLocked
                                    : IkFailure::kNonConvergent,
                     s.lambda, what};
    }
    if (!path.lambda.empty()) {
      const double jump =
          std::max((q1 - q1_prev).cwiseAbs().maxCoeff(),
                   (q2 - q2_prev).cwiseAbs().maxCoeff());
      if (jump > continuity_bound) {
        return IkError{IkFailure::kNonConvergent, s.lambda,
                       "solution branch discontinuity"};
      }
    }
    const RelativeError err = relative_error(robot1, r2, q1, q2, s.p, s.n);
    path.lambda.push_back(s.lambda);
    path.q1.push_back(q1);
    path.q2.push_back(q2);
    path.residual_p.push_back(err.e_p.norm());
    path.residual_n.push_back(err.theta);
  }
  return path;
}

void write_joint_path_csv(const std::string& path, const JointPath& jp) {
  std::vector<std::vector<double>> rows;
  rows.reserve(jp.size());
  for (std::size_t i = 0; i < jp.size(); ++i) {
    std::vector<double> row;
    row.push_back(jp.lambda[i]);
    for (int k = 0; k < 6; ++k) row.push_back(jp.q1[i][k]);
    for (int k = 0; k < 6; ++k) row.push_back(jp.q2[i][k]);
    row.push_back(jp.residual_p[i]);
    row.push_back(jp.residual_n[i]);
    rows.push_back(std::move(row));
  }
  write_numeric_csv(path,
                    {"lambda, q1[1..6], q2[1..6], residual_p, residual_n"},
                    rows);
}

JointPath read_joint_path_csv(const std::string& path) {
  JointPath jp;
  for (const auto& row : read_numeric_csv(path)) {
    if (row.size() != 15) {
      throw std::runtime_error("joint path CSV " + path +
                               ": rows must have 15 columns");
    }
    jp.lambda.push_back(row[0]);
    Vector6 q1, q2;
    for (int k = 0; k < 6; ++k) q1[k] = row[1 + k];
    for (int k = 0; k < 6; ++k) q2[k] = row[7 + k];
    jp.q1.push_back(q1);
    jp.q2.push_back(q2);
    jp.residual_p.push_back(row[13]);
    jp.residual_n.push_back(row[14]);
  }
  return jp;
}

}  // namespace dualtrack
