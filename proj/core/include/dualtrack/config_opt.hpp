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

#ifndef DUALTRACK_CONFIG_OPT_HPP_
#define DUALTRACK_CONFIG_OPT_HPP_

#include <string>

#include "dualtrack/curve.hpp"
#include "dualtrack/evolution.hpp"
#include "dualtrack/relative_ik.hpp"
#include "dualtrack/speed_bound.hpp"

namespace dualtrack {

/// Estimated maximum uniform relative speed for one configuration, mm/s.
/// Total: infeasible configurations (IK failure, joint-limit lock) score 0.
double objective_mu(const DualConfig& config, const Curve& curve,
                    const RobotModel& robot1, const RobotModel& robot2);

/// 15-parameter box: joint seeds bounded by the robots' limits (optionally
/// shrunk by joint_margin rad), base position/yaw by the given box.
SearchSpace make_search_space(const RobotModel& robot1,
                              const RobotModel& robot2, double base_x_min,
                              double base_x_max, double base_y_min,
                              double base_y_max, double yaw_min,
                              double yaw_max, double joint_margin = 0.0);

struct ConfigOptResult {
  DualConfig best;
  double best_mu = 0.0;  // mm/s
  EvolutionReport report;
};

/// Differential evolution over DualConfig maximizing the uniform speed,
/// seeded with `seed_config` (the single-arm-style starting configuration).
ConfigOptResult optimize_config(const Curve& curve, const RobotModel& robot1,
                                const RobotModel& robot2,
                                const SearchSpace& space,
                                const DualConfig& seed_config,
                                const EvolutionOptions& options);

/// Per-generation best-mu CSV (generation, best_mu).
void write_evolution_csv(const std::string& path,
                         const EvolutionReport& report);

/// JSON round-trip for the winning configuration.
void save_dual_config(const std::string& path, const DualConfig& config,
                      double mu);
DualConfig load_dual_config(const std::string& path);

}  // namespace dualtrack

#endif  // DUALTRACK_CONFIG_OPT_HPP_
