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

#ifndef DUALTRACK_TUNER_HPP_
#define DUALTRACK_TUNER_HPP_

#include <string>
#include <vector>

#include "dualtrack/exec_sim.hpp"
#include "dualtrack/metrics.hpp"
#include "dualtrack/motion_program.hpp"

namespace dualtrack {

/// Global waypoint update in the relative error direction: each waypoint's
/// executed error (e_p, theta) splits between the arms so the relative
/// waypoint moves by -gamma * e_p; orientations counter-rotate by gamma *
/// theta about the error-perpendicular axis. moveJ targets are re-solved by
/// single-pose IK; waypoints whose IK fails stay unchanged.
MotionProgram proportional_adjust(const MotionProgram& program,
                                  const ExecutionRecord& record,
                                  const Curve& curve, const RobotModel& robot1,
                                  const RobotModel& robot2_placed,
                                  double gamma);

/// Localized correction at error peaks: for each local maximum of the
/// position error above eps_pos (prominence >= 0.05 mm), the 3 nearest
/// relative waypoints take a gradient-descent step (finite differences of
/// the spline-predicted closest-point error, h = 0.01 mm, backtracking with
/// at most 8 halvings). Non-peak waypoints are untouched.
MotionProgram multipeak_adjust(const MotionProgram& program,
                               const ExecutionRecord& record,
                               const Curve& curve, const RobotModel& robot1,
                               const RobotModel& robot2_placed,
                               const Tolerances& tol = {});

struct TuneOptions {
  double gamma = 0.7;
  int max_iterations = 20;
  double speed_backoff = 0.9;
  double mu_floor = 1.0;   // mm/s
  int runs = 5;            // noisy executions averaged per iteration
  double blend_growth = 1.5;
  ExecOptions exec;
};

struct TuneHistoryEntry {
  int iteration = 0;
  double mu_cmd = 0.0;
  double max_pos_err = 0.0;
  double max_norm_err = 0.0;
  double mu_avg = 0.0;
  double speed_std_ratio = 0.0;
};

struct TuneResult {
  MotionProgram program;
  Metrics metrics;
  std::vector<TuneHistoryEntry> history;
  bool success = false;
  double mu_cmd = 0.0;  // mm/s, final commanded relative speed
};

/// Waypoint iteration: execute (averaged noisy runs), score, adjust.
/// Proportional updates run while the max error keeps improving by > 1%,
/// then multi-peak updates; blend radii grow from their initial value until
/// waypoint speed dips disappear; the commanded speed backs off
/// multiplicatively when the error plateaus out of tolerance. Failure (speed
/// floor or iteration budget) returns best-so-far with success = false.
TuneResult tune(const MotionProgram& program, const Curve& curve,
                const RobotModel& robot1, const RobotModel& robot2_placed,
                const Tolerances& tol, double mu_start,
                const TuneOptions& options = {});

/// CSV: iteration, mu_cmd, max_pos_err, max_norm_err, mu_avg, std_ratio.
void write_tune_history_csv(const std::string& path,
                            const std::vector<TuneHistoryEntry>& history);

}  // namespace dualtrack

#endif  // DUALTRACK_TUNER_HPP_
