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

#ifndef DUALTRACK_METRICS_HPP_
#define DUALTRACK_METRICS_HPP_

#include <string>
#include <vector>

#include "dualtrack/curve.hpp"
#include "dualtrack/exec_sim.hpp"
#include "dualtrack/robot_model.hpp"

namespace dualtrack {

struct Tolerances {
  double eps_speed = 0.05;  // fraction, sigma(mu)/mu_avg
  double eps_pos = 0.5;     // mm
  double eps_norm = 3.0;    // deg
};

/// Relaxed-tracking statistics of one execution over the gated interior of
/// the curve traversal.
struct Metrics {
  double max_pos_err = 0.0;    // mm
  double max_norm_err = 0.0;   // deg
  double mu_avg = 0.0;         // mm/s
  double speed_std_ratio = 0.0;  // fraction

  // Per-sample traces aligned to the record timestamps.
  std::vector<double> t;
  std::vector<double> pos_err;    // mm
  std::vector<double> norm_err;   // deg
  std::vector<double> mu;         // mm/s
  std::vector<int> gated;         // 1 = inside the statistics gate
  // Fractional curve-sample index of the closest point, per sample.
  std::vector<double> closest_param;

  bool within(const Tolerances& tol) const {
    return max_pos_err <= tol.eps_pos && max_norm_err <= tol.eps_norm &&
           speed_std_ratio <= tol.eps_speed;
  }
};

/// Scores a record against the curve. Per sample the closest curve point is
/// found by squared-distance search (monotone-window accelerated); samples
/// whose closest point is a curve endpoint and whose distance exceeds
/// 2 * eps_pos are gated out (lead-in/out trimming). Throws when fewer than
/// 3 samples remain inside the gate.
Metrics compute_metrics(const ExecutionRecord& record, const Curve& curve,
                        const RobotModel& robot1,
                        const RobotModel& robot2_placed,
                        const Tolerances& tol = {});

void write_metrics_csv(const std::string& path, const Metrics& metrics);

}  // namespace dualtrack

#endif  // DUALTRACK_METRICS_HPP_
