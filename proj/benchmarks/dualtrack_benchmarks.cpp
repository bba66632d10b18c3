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

// Micro and macro benchmarks for the hot paths: kinematics, the relative-IK
// path solve, the uniform-speed bound, and one program execution.

#include <random>
#include <string>
#include <variant>

#include <benchmark/benchmark.h>

#include "dualtrack/config_opt.hpp"
#include "dualtrack/curve.hpp"
#include "dualtrack/exec_sim.hpp"
#include "dualtrack/motion_program.hpp"
#include "dualtrack/relative_ik.hpp"
#include "dualtrack/robot_model.hpp"
#include "dualtrack/speed_bound.hpp"

namespace dualtrack {
namespace {

std::string asset(const std::string& rel) {
  return std::string(DUALTRACK_ASSET_DIR) + "/" + rel;
}

const RobotModel& robot1() {
  static const RobotModel model =
      load_robot_model(asset("robots/heavy-6r.json"));
  return model;
}

const RobotModel& robot2() {
  static const RobotModel model =
      load_robot_model(asset("robots/compact-6r.json"));
  return model;
}

Vector6 mid_config(const RobotModel& model) {
  return 0.5 * (model.q_min + model.q_max);
}

void BM_ForwardKinematics(benchmark::State& state) {
  const Vector6 q = mid_config(robot1());
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_kinematics(robot1(), q));
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_Jacobian(benchmark::State& state) {
  const Vector6 q = mid_config(robot1());
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobian(robot1(), q));
  }
}
BENCHMARK(BM_Jacobian);

void BM_SingleArmIk(benchmark::State& state) {
  std::mt19937 rng(5);
  std::normal_distribution<double> jitter(0.0, 0.02);
  const Vector6 q = mid_config(robot1());
  const Pose goal = forward_kinematics(robot1(), q);
  for (auto _ : state) {
    Vector6 seed = q;
    for (int j = 0; j < 6; ++j) seed[j] += jitter(rng);
    benchmark::DoNotOptimize(single_arm_ik(robot1(), goal, seed));
  }
}
BENCHMARK(BM_SingleArmIk);

void BM_SolvePath(benchmark::State& state) {
  const DualConfig cfg = load_dual_config(asset("configs/seed_curve1.json"));
  Curve curve = resample(load_curve(asset("curves/curve1.csv")),
                         static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) {
    const SolvePathResult r = solve_path(cfg, curve, robot1(), robot2());
    benchmark::DoNotOptimize(std::holds_alternative<JointPath>(r));
  }
  state.counters["samples"] = static_cast<double>(curve.size());
}
BENCHMARK(BM_SolvePath)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MaxUniformSpeed(benchmark::State& state) {
  const DualConfig cfg = load_dual_config(asset("configs/seed_curve1.json"));
  const Curve curve = resample(load_curve(asset("curves/curve1.csv")), 0.5);
  const SolvePathResult r = solve_path(cfg, curve, robot1(), robot2());
  const JointPath& path = std::get<JointPath>(r);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_uniform_speed(path, robot1(), robot2()));
  }
  state.counters["samples"] = static_cast<double>(path.size());
}
BENCHMARK(BM_MaxUniformSpeed)->Unit(benchmark::kMillisecond);

void BM_Execute(benchmark::State& state) {
  const DualConfig cfg = load_dual_config(asset("configs/seed_curve1.json"));
  RobotModel r2 = robot2();
  r2.base_transform = cfg.base2_transform();
  const Curve curve = resample(load_curve(asset("curves/curve1.csv")), 0.5);
  const SolvePathResult r = solve_path(cfg, curve, robot1(), robot2());
  GreedyFitOptions options;
  options.mu = 400.0;
  const MotionProgram program =
      greedy_fit_dual(std::get<JointPath>(r), robot1(), r2, curve, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(program, robot1(), r2, {}));
  }
  state.counters["segments"] = static_cast<double>(program.size());
}
BENCHMARK(BM_Execute)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dualtrack

BENCHMARK_MAIN();
