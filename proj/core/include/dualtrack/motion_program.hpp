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

#ifndef DUALTRACK_MOTION_PROGRAM_HPP_
#define DUALTRACK_MOTION_PROGRAM_HPP_

#include <span>
#include <string>
#include <vector>

#include "dualtrack/curve.hpp"
#include "dualtrack/geometry.hpp"
#include "dualtrack/relative_ik.hpp"
#include "dualtrack/robot_model.hpp"

namespace dualtrack {

enum class PrimitiveKind { kMoveL, kMoveC, kMoveJ };

char primitive_kind_letter(PrimitiveKind kind);

/// One controller motion segment. The segment's start is implicit (the
/// previous segment's end); only the target is stored. moveC additionally
/// carries the circlepoint. blend_radius applies at the segment's terminal
/// waypoint.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kMoveL;
  Pose target;                            // L, C
  Vector3 via = Vector3::Zero();          // C circlepoint, mm
  Vector6 joint_target = Vector6::Zero(); // J
  double speed = 0.0;                     // mm/s along the robot's own path
  double blend_radius = 0.0;              // mm
};

/// Two synchronized primitive sequences with a shared segment count: both
/// controllers reach waypoint k at the same time.
struct MotionProgram {
  std::vector<Primitive> robot1;
  std::vector<Primitive> robot2;
  Vector6 start_q1 = Vector6::Zero();
  Vector6 start_q2 = Vector6::Zero();

  std::size_t size() const { return robot1.size(); }  // K
};

/// Pose along a primitive at fraction u in [0, 1] from a known start state.
/// Orientation is interpolated at constant angular rate between the anchored
/// start and the target. For moveJ the pose is the FK image of the joint
/// interpolation.
Pose primitive_pose(const RobotModel& model, const Primitive& prim,
                    const Pose& start_pose, const Vector6& start_joints,
                    double u);

/// Joint state along a moveJ primitive (linear in joint space).
Vector6 primitive_joints(const Primitive& prim, const Vector6& start_joints,
                         double u);

/// Cartesian path length of a primitive, evaluated densely.
double primitive_length(const RobotModel& model, const Primitive& prim,
                        const Pose& start_pose, const Vector6& start_joints,
                        int samples = 64);

struct CartesianFit {
  Primitive prim;
  double deviation = 0.0;  // mm, max sample-to-fit distance
  bool degenerate = false; // C only: collinear input, line fallback
};

struct JointFit {
  Primitive prim;
  double deviation = 0.0;  // rad, max joint-space deviation
};

/// Least-squares line fit with the first pose anchored; deviation is the
/// max point-to-chord distance.
CartesianFit fit_segment_L(std::span<const Pose> poses);

/// Principal-component plane + circle fit through the anchored start; via is
/// the fitted arc midpoint.
CartesianFit fit_segment_C(std::span<const Pose> poses);

/// Linear joint-space interpolation to the last sample.
JointFit fit_segment_J(std::span<const Vector6> joints);

struct GreedyFitOptions {
  double tol = 0.1;          // mm, relative fitting tolerance
  double mu = 100.0;         // mm/s, relative path speed to realize
  double extension = 30.0;   // mm, lead-in/lead-out length
  double default_blend = 10.0;  // mm
  int dense_samples_per_index = 2;
};

struct GreedyFitReport {
  std::size_t interior_segments = 0;  // K without lead-in/out
  std::vector<char> kinds1;           // interior primitive letters
  std::vector<char> kinds2;
  std::vector<double> deviations;     // per interior segment, mm (relative)
  std::vector<std::size_t> end_index; // path sample index per segment end
};

/// Dual-arm greedy fitting: from each shared start index, bisection finds
/// the furthest shared end index whose fitted primitive pair keeps the
/// induced relative trajectory within tol of the curve; per robot the kind
/// preference at equal span is L over C over J. Lead-in/out segments are
/// appended by joint-space extrapolation over `extension` mm.
/// Throws std::runtime_error when even a single-index span cannot meet tol.
MotionProgram greedy_fit_dual(const JointPath& path, const RobotModel& robot1,
                              const RobotModel& robot2_placed,
                              const Curve& curve,
                              const GreedyFitOptions& options,
                              GreedyFitReport* report = nullptr);

/// Max distance between the program's densely evaluated relative trajectory
/// (robot-2 TCP frame, pre-blending) and the curve. Lead-in/out segments are
/// skipped when `skip_lead` is set.
double program_relative_deviation(const MotionProgram& program,
                                  const RobotModel& robot1,
                                  const RobotModel& robot2_placed,
                                  const Curve& curve, bool skip_lead = true,
                                  int samples_per_segment = 200);

/// Line-oriented text serialization; parse(serialize(p)) round-trips
/// bit-exactly.
std::string serialize_motion_program(const MotionProgram& program);
MotionProgram parse_motion_program(const std::string& text);
void save_motion_program(const std::string& path,
                         const MotionProgram& program);
MotionProgram load_motion_program(const std::string& path);

}  // namespace dualtrack

#endif  // DUALTRACK_MOTION_PROGRAM_HPP_
