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

#ifndef DUALTRACK_SPEED_BOUND_HPP_
#define DUALTRACK_SPEED_BOUND_HPP_

#include <limits>
#include <string>
#include <vector>

#include "dualtrack/relative_ik.hpp"

namespace dualtrack {

/// Channels with negligible q' or q'' impose no bound and contribute this
/// sentinel instead of a finite value.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Per-sample arc-length derivatives of all 12 joint channels.
struct PathDerivatives {
  std::vector<Vector12> dq;   // rad/mm
  std::vector<Vector12> ddq;  // rad/mm^2
};

/// Uniform-speed feasibility profile along the path. The commanded relative
/// speed mu is the minimum over lambda of the combined bound.
struct SpeedProfile {
  std::vector<double> lambda;
  std::vector<double> vel_bound;  // mm/s, from joint velocity limits
  std::vector<double> acc_bound;  // mm/s, from acceleration limits
  std::vector<double> combined;   // elementwise min
  double mu = 0.0;                // mm/s
};

/// Central differences interiorly, one-sided at endpoints, per joint of both
/// arms. Throws on a non-uniform lambda grid or fewer than 3 samples.
PathDerivatives path_derivatives(const JointPath& path);

/// Largest uniform path speed under joint velocity limits and the
/// configuration-dependent acceleration limits of both arms. Endpoints are
/// excluded from the acceleration bound (one-sided second differences).
SpeedProfile max_uniform_speed(const JointPath& path, const RobotModel& robot1,
                               const RobotModel& robot2);

/// CSV: lambda, vel_bound, acc_bound, combined. Unbounded entries are
/// written as the string "unbounded".
void write_speed_profile_csv(const std::string& path,
                             const SpeedProfile& profile);

}  // namespace dualtrack

#endif  // DUALTRACK_SPEED_BOUND_HPP_
