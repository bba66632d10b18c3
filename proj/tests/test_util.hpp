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

#ifndef DUALTRACK_TESTS_TEST_UTIL_HPP_
#define DUALTRACK_TESTS_TEST_UTIL_HPP_

#include <random>
#include <string>

#include "dualtrack/config_opt.hpp"
#include "dualtrack/relative_ik.hpp"
#include "dualtrack/robot_model.hpp"

namespace dualtrack::testing {

inline std::string asset_path(const std::string& rel) {
  return std::string(DUALTRACK_ASSET_DIR) + "/" + rel;
}

// Fixture models are loaded once; the accel table CSVs make loading
// non-trivially expensive.
inline const RobotModel& heavy_model() {
  static const RobotModel model =
      load_robot_model(asset_path("robots/heavy-6r.json"));
  return model;
}

inline const RobotModel& compact_model() {
  static const RobotModel model =
      load_robot_model(asset_path("robots/compact-6r.json"));
  return model;
}

inline RobotModel place_robot2(const RobotModel& robot2,
                               const DualConfig& config) {
  RobotModel placed = robot2;
  placed.base_transform = config.base2_transform();
  return placed;
}

inline Vector6 random_config(const RobotModel& model, std::mt19937& rng) {
  Vector6 q;
  for (int j = 0; j < 6; ++j) {
    std::uniform_real_distribution<double> dist(model.q_min[j], model.q_max[j]);
    q[j] = dist(rng);
  }
  return q;
}

}  // namespace dualtrack::testing

#endif  // DUALTRACK_TESTS_TEST_UTIL_HPP_
