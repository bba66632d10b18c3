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

#ifndef DUALTRACK_EXEC_SIM_HPP_
#define DUALTRACK_EXEC_SIM_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualtrack/motion_program.hpp"
#include "dualtrack/robot_model.hpp"

namespace dualtrack {

struct ExecOptions {
  // Waypoint-level path repeatability, mm (3-sigma bound). Applied as one
  // constant Cartesian offset per robot per run, zero-mean Gaussian per axis
  // with std = sigma/3.
  double noise_sigma1 = 0.0;
  double noise_sigma2 = 0.0;
  std::uint64_t seed = 0;
  double output_rate = 250.0;    // Hz
  double internal_rate = 1000.0; // Hz, integration before decimation
  int dense_per_segment = 64;    // IK sampling of Cartesian segments
  int profile_per_segment = 200; // velocity-profile grid resolution
};

/// 250 Hz joint trace of one synchronized execution.
struct ExecutionRecord {
  std::vector<double> t;  // s, uniform
  std::vector<Vector6> q1;
  std::vector<Vector6> q2;
  // Shared by both arms; index k is the crossing time of waypoint k.
  std::vector<double> segment_switch_times;
  std::vector<int> saturated_segments;  // hit a velocity limit pre-scaling
  double time_scale = 1.0;  // global stretch applied for limit compliance

  std::size_t size() const { return t.size(); }
};

class SimulationError : public std::runtime_error {
 public:
  enum class Kind { kCornerPath, kIkFailure };
  SimulationError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Executes a program on the simulated synchronized controller. Each segment
/// is timed by the slower arm; blend zones replace corners with joint-space
/// cubic blends; the shared speed profile is trapezoidal per segment under
/// the acceleration map and globally time-scaled to the velocity limits.
/// Throws SimulationError on corner path failure or unreachable targets.
ExecutionRecord execute(const MotionProgram& program, const RobotModel& robot1,
                        const RobotModel& robot2_placed,
                        const ExecOptions& options = {});

/// Pointwise mean of n noisy executions (seeds options.seed + run index).
/// n = 1 or noise off reduces to execute.
ExecutionRecord average_runs(const MotionProgram& program,
                             const RobotModel& robot1,
                             const RobotModel& robot2_placed, int n,
                             const ExecOptions& options = {});

/// CSV: t, q1[1..6], q2[1..6].
void write_execution_record_csv(const std::string& path,
                                const ExecutionRecord& record);
ExecutionRecord read_execution_record_csv(const std::string& path);

}  // namespace dualtrack

#endif  // DUALTRACK_EXEC_SIM_HPP_
