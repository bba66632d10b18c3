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

#include "dualtrack/config_opt.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dualtrack/csv.hpp"

namespace dualtrack {

double objective_mu(const DualConfig& config, const Curve& curve,
                    const RobotModel& robot1, const RobotModel& robot2) {
  const SolvePathResult result = solve_path(config, curve, robot1, robot2);
  if (std::holds_alternative<IkError>(result)) return 0.0;
  const JointPath& path = std::get<JointPath>(result);
  if (path.size() < 3) return 0.0;
  try {
    return max_uniform_speed(path, robot1, robot2).mu;
  } catch (const std::exception&) {
    return 0.0;
  }
}

SearchSpace make_search_space(const RobotModel& robot1,
                              const RobotModel& robot2, double base_x_min,
                              double base_x_max, double base_y_min,
                              double base_y_max, double yaw_min,
                              double yaw_max, double joint_margin) {
  SearchSpace space;
  space.lower.resize(15);
  space.upper.resize(15);
  for (int i = 0; i < 6; ++i) {
    space.lower[i] = robot1.q_min[i] + joint_margin;
    space.upper[i] = robot1.q_max[i] - joint_margin;
    space.lower[6 + i] = robot2.q_min[i] + joint_margin;
    space.upper[6 + i] = robot2.q_max[i] - joint_margin;
  }
  space.lower[12] = base_x_min;
  space.upper[12] = base_x_max;
  space.lower[13] = base_y_min;
  space.upper[13] = base_y_max;
  space.lower[14] = yaw_min;
  space.upper[14] = yaw_max;
  return space;
}

ConfigOptResult optimize_config(const Curve& curve, const RobotModel& robot1,
                                const RobotModel& robot2,
                                const SearchSpace& space,
                                const DualConfig& seed_config,
                                const EvolutionOptions& options) {
  auto objective = [&](const Eigen::VectorXd& x) {
    Eigen::Matrix<double, 15, 1> v = x;
    return objective_mu(DualConfig::from_vector(v), curve, robot1, robot2);
  };
  ConfigOptResult result;
  result.report =
      evolve(space, objective, options, {seed_config.as_vector()});
  Eigen::Matrix<double, 15, 1> best = result.report.best_member;
  result.best = DualConfig::from_vector(best);
  result.best_mu = result.report.best_score;
  return result;
}

void write_evolution_csv(const std::string& path,
                         const EvolutionReport& report) {
  std::vector<std::vector<double>> rows;
  for (std::size_t g = 0; g < report.best_per_generation.size(); ++g) {
    rows.push_back({static_cast<double>(g), report.best_per_generation[g]});
  }
  write_numeric_csv(path, {"generation, best_mu (mm/s)"}, rows);
}

void save_dual_config(const std::string& path, const DualConfig& config,
                      double mu) {
  nlohmann::json j;
  for (int i = 0; i < 6; ++i) {
    j["q0_1"].push_back(config.q0_1[i]);
    j["q0_2"].push_back(config.q0_2[i]);
  }
  j["base2_planar"] = {{"x", config.base2_x},
                       {"y", config.base2_y},
                       {"yaw", config.base2_yaw}};
  j["mu"] = mu;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

DualConfig load_dual_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  DualConfig c;
  for (int i = 0; i < 6; ++i) {
    c.q0_1[i] = j.at("q0_1")[i].get<double>();
    c.q0_2[i] = j.at("q0_2")[i].get<double>();
  }
  c.base2_x = j.at("base2_planar").at("x").get<double>();
  c.base2_y = j.at("base2_planar").at("y").get<double>();
  c.base2_yaw = j.at("base2_planar").at("yaw").get<double>();
  return c;
}

}  // namespace dualtrack
