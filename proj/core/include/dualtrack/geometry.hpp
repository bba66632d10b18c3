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

#ifndef DUALTRACK_GEOMETRY_HPP_
#define DUALTRACK_GEOMETRY_HPP_

#include <Eigen/Dense>

namespace dualtrack {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector12 = Eigen::Matrix<double, 12, 1>;

/// Rigid transform: rotation plus translation, lengths in mm.
struct Pose {
  Matrix3 R = Matrix3::Identity();
  Vector3 p = Vector3::Zero();

  Pose() = default;
  Pose(const Matrix3& R_, const Vector3& p_) : R(R_), p(p_) {}

  Pose operator*(const Pose& other) const {
    return Pose(R * other.R, R * other.p + p);
  }
  Vector3 operator*(const Vector3& v) const { return R * v + p; }

  Pose inverse() const { return Pose(R.transpose(), -(R.transpose() * p)); }

  static Pose Identity() { return Pose(); }
};

/// Skew-symmetric matrix of v, i.e. skew(v) * w == v.cross(w).
Matrix3 skew(const Vector3& v);

/// Rotation about a unit axis by angle (Rodrigues).
Matrix3 axis_angle_rotation(const Vector3& axis, double angle);

/// Rotation vector (axis * angle) of R; angle in [0, pi].
Vector3 rotation_log(const Matrix3& R);

/// Rotation from rotation vector; inverse of rotation_log.
Matrix3 rotation_exp(const Vector3& w);

/// Unsigned angle between two vectors, in [0, pi]. Inputs need not be unit.
double angle_between(const Vector3& a, const Vector3& b);

/// True when R'R = I and det R = 1 within tol.
bool is_rotation(const Matrix3& R, double tol = 1e-9);

/// Interpolates rotations along the geodesic, t in [0, 1].
Matrix3 slerp_rotation(const Matrix3& Ra, const Matrix3& Rb, double t);

/// Rotates unit vector a toward unit vector b at constant angular rate.
Vector3 slerp_direction(const Vector3& a, const Vector3& b, double t);

}  // namespace dualtrack

#endif  // DUALTRACK_GEOMETRY_HPP_
