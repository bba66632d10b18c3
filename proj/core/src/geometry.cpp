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

#include "dualtrack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dualtrack {

Matrix3 skew(const Vector3& v) {
  Matrix3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Matrix3 axis_angle_rotation(const Vector3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Vector3 rotation_log(const Matrix3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Matrix3 rotation_exp(const Vector3& w) {
  const double angle = w.norm();
  if (angle < 1e-14) return Matrix3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

double angle_between(const Vector3& a, const Vector3& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

bool is_rotation(const Matrix3& R, double tol) {
  const double ortho = (R.transpose() * R - Matrix3::Identity()).norm();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Matrix3 slerp_rotation(const Matrix3& Ra, const Matrix3& Rb, double t) {
  Eigen::Quaterniond qa(Ra), qb(Rb);
  return qa.slerp(t, qb).toRotationMatrix();
}

Vector3 slerp_direction(const Vector3& a, const Vector3& b, double t) {
  const Vector3 ua = a.normalized();
  const Vector3 ub = b.normalized();
  const double angle = angle_between(ua, ub);
  if (angle < 1e-12) return ua;
  // Antipodal pair has no unique great-circle path.
  if (angle > M_PI - 1e-9) {
    Vector3 ortho = ua.unitOrthogonal();
    return axis_angle_rotation(ortho, t * angle) * ua;
  }
  const Vector3 axis = ua.cross(ub).normalized();
  return axis_angle_rotation(axis, t * angle) * ua;
}

}  // namespace dualtrack
