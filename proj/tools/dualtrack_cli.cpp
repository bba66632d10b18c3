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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualtrack/config_opt.hpp"
#include "dualtrack/csv.hpp"
#include "dualtrack/curve.hpp"
#include "dualtrack/exec_sim.hpp"
#include "dualtrack/metrics.hpp"
#include "dualtrack/motion_program.hpp"
#include "dualtrack/relative_ik.hpp"
#include "dualtrack/robot_model.hpp"
#include "dualtrack/speed_bound.hpp"
#include "dualtrack/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dualtrack;

namespace {

// Exit-code contract: 0 success, 2 input error, 3 infeasible kinematics,
// 4 tolerance failure.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitKinematics = 3;
constexpr int kExitTolerance = 4;

struct CliError {
  int code;
  std::string message;
};

struct Scenario {
  fs::path dir;
  fs::path robot1_model;
  fs::path robot2_model;
  fs::path curve_file;
  fs::path seed_config;  // optional DualConfig JSON
  double resample_step = 0.5;
  Tolerances tol;
  EvolutionOptions evolution;
  struct {
    double base_x_min = 0, base_x_max = 0;
    double base_y_min = 0, base_y_max = 0;
    double yaw_min = -M_PI, yaw_max = M_PI;
    double joint_margin = 0.0;
  } search;
  GreedyFitOptions fitting;
  struct {
    double noise_sigma1 = 0.0;
    double noise_sigma2 = 0.0;
    int runs = 5;
  } simulator;
  TuneOptions tuning;
  int baseline_waypoints = 50;
  fs::path out_dir;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Scenario load_scenario(const std::string& file) {
  if (!fs::exists(file)) {
    throw CliError{kExitInput, "scenario file not found: " + file};
  }
  std::ifstream in(file);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CliError{kExitInput,
                   "scenario " + file + ": invalid JSON: " + e.what()};
  }
  Scenario s;
  s.dir = fs::absolute(file).parent_path();
  try {
    s.robot1_model = resolve(s.dir, j.at("robot1_model").get<std::string>());
    s.robot2_model = resolve(s.dir, j.at("robot2_model").get<std::string>());
    s.curve_file = resolve(s.dir, j.at("curve").get<std::string>());
    if (j.contains("seed_config")) {
      s.seed_config = resolve(s.dir, j["seed_config"].get<std::string>());
    }
    s.resample_step = j.value("resample_step", 0.5);
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      s.tol.eps_speed = t.value("eps_speed", 0.05);
      s.tol.eps_pos = t.value("eps_pos", 0.5);
      s.tol.eps_norm = t.value("eps_norm", 3.0);
    }
    if (s.tol.eps_speed <= 0 || s.tol.eps_pos <= 0 || s.tol.eps_norm <= 0) {
      throw CliError{kExitInput, "scenario: tolerances must be positive"};
    }
    if (j.contains("evolution")) {
      const auto& e = j["evolution"];
      s.evolution.population = e.value("population", 30);
      s.evolution.max_generations = e.value("max_generations", 300);
      s.evolution.weight_f = e.value("weight_f", 0.8);
      s.evolution.crossover_cr = e.value("crossover_cr", 0.9);
      s.evolution.stagnation_generations =
          e.value("stagnation_generations", 50);
      s.evolution.seed = e.value("seed", 0);
    }
    if (j.contains("search")) {
      const auto& b = j["search"];
      auto range = [&](const char* key, double& lo, double& hi) {
        if (!b.contains(key)) return;
        lo = b[key][0].get<double>();
        hi = b[key][1].get<double>();
      };
      range("base_x", s.search.base_x_min, s.search.base_x_max);
      range("base_y", s.search.base_y_min, s.search.base_y_max);
      range("yaw", s.search.yaw_min, s.search.yaw_max);
      s.search.joint_margin = b.value("joint_margin", 0.0);
    }
    if (j.contains("fitting")) {
      const auto& f = j["fitting"];
      s.fitting.tol = f.value("tol", 0.1);
      s.fitting.extension = f.value("extension", 30.0);
      s.fitting.default_blend = f.value("default_blend", 10.0);
    }
    if (j.contains("simulator")) {
      const auto& m = j["simulator"];
      s.simulator.noise_sigma1 = m.value("noise_sigma1", 0.0);
      s.simulator.noise_sigma2 = m.value("noise_sigma2", 0.0);
      s.simulator.runs = m.value("runs", 5);
    }
    if (j.contains("tuning")) {
      const auto& t = j["tuning"];
      s.tuning.gamma = t.value("gamma", 0.7);
      s.tuning.max_iterations = t.value("max_iterations", 20);
      s.tuning.speed_backoff = t.value("speed_backoff", 0.9);
      s.tuning.mu_floor = t.value("mu_floor", 1.0);
      s.tuning.blend_growth = t.value("blend_growth", 1.5);
    }
    if (j.contains("baseline")) {
      s.baseline_waypoints = j["baseline"].value("waypoints", 50);
    }
    s.out_dir = resolve(s.dir, j.value("out_dir", std::string("runs")));
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{kExitInput, "scenario " + file + ": " + e.what()};
  }
  for (const fs::path* p : {&s.robot1_model, &s.robot2_model, &s.curve_file}) {
    if (!fs::exists(*p)) {
      throw CliError{kExitInput, "referenced file not found: " + p->string()};
    }
  }
  return s;
}

struct Loaded {
  RobotModel robot1;
  RobotModel robot2;
  Curve curve;
};

Loaded load_inputs(const Scenario& s) {
  Loaded l;
  try {
    l.robot1 = load_robot_model(s.robot1_model.string());
    l.robot2 = load_robot_model(s.robot2_model.string());
    l.curve = resample(load_curve(s.curve_file.string()), s.resample_step);
  } catch (const std::exception& e) {
    throw CliError{kExitInput, e.what()};
  }
  return l;
}

RobotModel place_robot2(const RobotModel& robot2, const DualConfig& config) {
  DualArmSystem sys;
  sys.robot2 = &robot2;
  sys.base2 = config.base2_transform();
  return sys.robot2_placed();
}

fs::path subdir(const fs::path& out, const char* name) {
  const fs::path d = out / name;
  fs::create_directories(d);
  return d;
}

DualConfig load_config_or_die(const std::string& path, double* mu) {
  if (!fs::exists(path)) {
    throw CliError{kExitInput, "config file not found: " + path};
  }
  DualConfig c;
  try {
    c = load_dual_config(path);
    if (mu) {
      std::ifstream in(path);
      json j;
      in >> j;
      *mu = j.value("mu", 0.0);
    }
  } catch (const std::exception& e) {
    throw CliError{kExitInput, e.what()};
  }
  return c;
}

DualConfig scenario_seed_config(const Scenario& s) {
  if (s.seed_config.empty()) {
    throw CliError{kExitInput, "scenario has no seed_config entry"};
  }
  return load_config_or_die(s.seed_config.string(), nullptr);
}

// Curve sample at arbitrary lambda by linear interpolation.
Curve::Sample curve_at(const Curve& curve, double lambda) {
  const auto& v = curve.samples;
  if (lambda <= v.front().lambda) return v.front();
  if (lambda >= v.back().lambda) return v.back();
  std::size_t j = 0;
  while (j + 2 < v.size() && v[j + 1].lambda < lambda) ++j;
  const double t =
      (lambda - v[j].lambda) / (v[j + 1].lambda - v[j].lambda);
  Curve::Sample out;
  out.lambda = lambda;
  out.p = (1.0 - t) * v[j].p + t * v[j + 1].p;
  out.n = ((1.0 - t) * v[j].n + t * v[j + 1].n).normalized();
  return out;
}

int cmd_optimize(const std::string& scenario_file,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  Loaded l = load_inputs(s);
  if (seed) s.evolution.seed = *seed;

  const DualConfig seed_config = scenario_seed_config(s);
  const SearchSpace space = make_search_space(
      l.robot1, l.robot2, s.search.base_x_min, s.search.base_x_max,
      s.search.base_y_min, s.search.base_y_max, s.search.yaw_min,
      s.search.yaw_max, s.search.joint_margin);

  const ConfigOptResult result = optimize_config(
      l.curve, l.robot1, l.robot2, space, seed_config, s.evolution);
  if (result.best_mu <= 0.0) {
    throw CliError{kExitKinematics,
                   "optimize: no feasible configuration found"};
  }

  const fs::path config_dir = subdir(s.out_dir, "config");
  save_dual_config((config_dir / "best_config.json").string(), result.best,
                   result.best_mu);
  write_evolution_csv((config_dir / "evolution.csv").string(), result.report);
  std::cout << "optimize: best mu " << result.best_mu << " mm/s after "
            << result.report.best_per_generation.size() - 1 << " generations ("
            << result.report.evaluation_count << " evaluations)\n"
            << "  config:    " << (config_dir / "best_config.json").string()
            << "\n  evolution: " << (config_dir / "evolution.csv").string()
            << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& scenario_file,
            std::optional<std::string> config_path,
            std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  Loaded l = load_inputs(s);
  const std::string cfg = config_path.value_or(
      (s.out_dir / "config" / "best_config.json").string());
  const DualConfig config = load_config_or_die(cfg, nullptr);
  const RobotModel robot2_placed = place_robot2(l.robot2, config);

  const SolvePathResult solved =
      solve_path(config, l.curve, l.robot1, l.robot2);
  if (std::holds_alternative<IkError>(solved)) {
    const IkError& e = std::get<IkError>(solved);
    throw CliError{kExitKinematics, "fit: IK failed at lambda " +
                                        std::to_string(e.lambda) + ": " +
                                        e.message};
  }
  const JointPath& path = std::get<JointPath>(solved);
  const SpeedProfile profile = max_uniform_speed(path, l.robot1, l.robot2);

  const fs::path program_dir = subdir(s.out_dir, "program");
  write_joint_path_csv((program_dir / "joint_path.csv").string(), path);
  write_speed_profile_csv((program_dir / "speed_profile.csv").string(),
                          profile);

  GreedyFitOptions fit_options = s.fitting;
  fit_options.mu = profile.mu;
  GreedyFitReport report;
  MotionProgram program;
  try {
    program = greedy_fit_dual(path, l.robot1, robot2_placed, l.curve,
                              fit_options, &report);
  } catch (const std::exception& e) {
    throw CliError{kExitTolerance, e.what()};
  }
  save_motion_program((program_dir / "program.txt").string(), program);

  {
    std::ofstream rep(program_dir / "fit_report.txt");
    rep << "interior_segments " << report.interior_segments << "\n";
    rep << "mu " << profile.mu << "\n";
    for (std::size_t i = 0; i < report.interior_segments; ++i) {
      rep << i + 1 << " " << report.kinds1[i] << report.kinds2[i]
          << " deviation_mm " << report.deviations[i] << " end_lambda "
          << path.lambda[report.end_index[i]] << "\n";
    }
  }
  std::cout << "fit: " << report.interior_segments
            << " interior segments at mu " << profile.mu << " mm/s\n"
            << "  program: " << (program_dir / "program.txt").string() << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_file,
                 std::optional<std::string> program_path,
                 std::optional<std::string> config_path,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  Loaded l = load_inputs(s);
  const std::string cfg = config_path.value_or(
      (s.out_dir / "config" / "best_config.json").string());
  const DualConfig config = load_config_or_die(cfg, nullptr);
  const RobotModel robot2_placed = place_robot2(l.robot2, config);
  const std::string prog_file = program_path.value_or(
      (s.out_dir / "program" / "program.txt").string());
  if (!fs::exists(prog_file)) {
    throw CliError{kExitInput, "program file not found: " + prog_file};
  }
  const MotionProgram program = load_motion_program(prog_file);

  ExecOptions exec;
  exec.noise_sigma1 = s.simulator.noise_sigma1;
  exec.noise_sigma2 = s.simulator.noise_sigma2;
  exec.seed = seed.value_or(0);
  ExecutionRecord record;
  try {
    record = average_runs(program, l.robot1, robot2_placed,
                          s.simulator.runs, exec);
  } catch (const SimulationError& e) {
    throw CliError{e.kind() == SimulationError::Kind::kIkFailure
                       ? kExitKinematics
                       : kExitTolerance,
                   e.what()};
  }
  const Metrics metrics =
      compute_metrics(record, l.curve, l.robot1, robot2_placed, s.tol);

  const fs::path exec_dir = subdir(s.out_dir, "exec");
  const fs::path report_dir = subdir(s.out_dir, "report");
  write_execution_record_csv((exec_dir / "record.csv").string(), record);
  write_metrics_csv((report_dir / "metrics.csv").string(), metrics);
  std::cout << "simulate: " << record.size() << " samples, max_pos_err "
            << metrics.max_pos_err << " mm, max_norm_err "
            << metrics.max_norm_err << " deg, mu_avg " << metrics.mu_avg
            << " mm/s, std_ratio " << metrics.speed_std_ratio << "\n";
  return kExitOk;
}

int cmd_tune(const std::string& scenario_file,
             std::optional<std::string> program_path,
             std::optional<std::string> config_path,
             std::optional<std::uint64_t> seed,
             std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  Loaded l = load_inputs(s);
  const std::string cfg = config_path.value_or(
      (s.out_dir / "config" / "best_config.json").string());
  double mu_cfg = 0.0;
  const DualConfig config = load_config_or_die(cfg, &mu_cfg);
  const RobotModel robot2_placed = place_robot2(l.robot2, config);
  const std::string prog_file = program_path.value_or(
      (s.out_dir / "program" / "program.txt").string());
  if (!fs::exists(prog_file)) {
    throw CliError{kExitInput, "program file not found: " + prog_file};
  }
  const MotionProgram program = load_motion_program(prog_file);

  TuneOptions options = s.tuning;
  options.runs = s.simulator.runs;
  options.exec.noise_sigma1 = s.simulator.noise_sigma1;
  options.exec.noise_sigma2 = s.simulator.noise_sigma2;
  options.exec.seed = seed.value_or(0);
  if (mu_cfg <= 0.0) mu_cfg = 100.0;

  const TuneResult result = tune(program, l.curve, l.robot1, robot2_placed,
                                 s.tol, mu_cfg, options);

  const fs::path program_dir = subdir(s.out_dir, "program");
  const fs::path report_dir = subdir(s.out_dir, "report");
  save_motion_program((program_dir / "tuned_program.txt").string(),
                      result.program);
  write_metrics_csv((report_dir / "metrics.csv").string(), result.metrics);
  write_tune_history_csv((report_dir / "history.csv").string(),
                         result.history);
  std::cout << "tune: " << (result.success ? "success" : "FAILURE") << " after "
            << result.history.size() << " iterations, mu_cmd "
            << result.mu_cmd << " mm/s, max_pos_err "
            << result.metrics.max_pos_err << " mm\n";
  return result.success ? kExitOk : kExitTolerance;
}

MotionProgram build_baseline_program(const Curve& curve,
                                     const RobotModel& robot1,
                                     const RobotModel& robot2_placed,
                                     const DualConfig& config, int waypoints,
                                     double speed, double extension,
                                     double blend) {
  const Pose tcp2 = forward_kinematics(robot2_placed, config.q0_2);
  const double lf = curve.total_length();
  const int K = waypoints;

  // World-frame poses along the curve; orientation aligns the tool axis with
  // the inward normal, transporting the x axis for continuity.
  auto pose_at = [&](double lambda, const Vector3& x_hint) {
    const Curve::Sample cs = curve_at(curve, lambda);
    Pose pose;
    pose.p = tcp2.p + tcp2.R * cs.p;
    const Vector3 z = -(tcp2.R * cs.n).normalized();
    Vector3 x = x_hint - x_hint.dot(z) * z;
    if (x.norm() < 1e-6) {
      x = Vector3::UnitX() - Vector3::UnitX().dot(z) * z;
      if (x.norm() < 1e-6) x = Vector3::UnitY() - Vector3::UnitY().dot(z) * z;
    }
    x.normalize();
    pose.R.col(0) = x;
    pose.R.col(1) = z.cross(x);
    pose.R.col(2) = z;
    return pose;
  };

  const Vector3 tan0 =
      (curve.samples[1].p - curve.samples[0].p).normalized();
  const Vector3 tanf =
      (curve.samples.back().p - curve.samples[curve.size() - 2].p)
          .normalized();

  MotionProgram program;
  program.start_q2 = config.q0_2;

  Vector3 x_hint = Vector3::UnitX();
  std::vector<Pose> targets;
  {
    Pose pre = pose_at(0.0, x_hint);
    pre.p -= extension * (tcp2.R * tan0);
    targets.push_back(pre);
    x_hint = pre.R.col(0);
  }
  for (int i = 0; i < K; ++i) {
    const double lambda = lf * i / (K - 1);
    const Pose pose = pose_at(lambda, x_hint);
    targets.push_back(pose);
    x_hint = pose.R.col(0);
  }
  {
    Pose post = pose_at(lf, x_hint);
    post.p += extension * (tcp2.R * tanf);
    targets.push_back(post);
  }

  const auto q_start = single_arm_ik(robot1, targets.front(), config.q0_1);
  if (!q_start) {
    throw CliError{kExitKinematics,
                   "baseline: start pose unreachable for robot 1"};
  }
  program.start_q1 = *q_start;

  const double seg_len = lf / (K - 1);
  const double blend_cap = std::min(blend, 0.4 * seg_len);
  for (std::size_t i = 1; i < targets.size(); ++i) {
    Primitive p1;
    p1.kind = PrimitiveKind::kMoveL;
    p1.target = targets[i];
    p1.speed = speed;
    const bool last = i + 1 == targets.size();
    const bool first = i == 1;
    p1.blend_radius = last ? 0.0 : (first ? blend_cap : blend_cap);
    program.robot1.push_back(p1);

    Primitive p2;
    p2.kind = PrimitiveKind::kMoveJ;
    p2.joint_target = config.q0_2;
    p2.speed = 1.0;
    p2.blend_radius = 0.0;
    program.robot2.push_back(p2);
  }
  return program;
}

int cmd_baseline(const std::string& scenario_file,
                 std::optional<int> waypoints_override,
                 std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  Loaded l = load_inputs(s);
  const DualConfig config = scenario_seed_config(s);
  const RobotModel robot2_placed = place_robot2(l.robot2, config);
  const int waypoints = waypoints_override.value_or(s.baseline_waypoints);
  if (waypoints < 2) {
    throw CliError{kExitInput, "baseline: need at least 2 waypoints"};
  }

  auto evaluate = [&](double speed)
      -> std::optional<std::pair<MotionProgram, Metrics>> {
    MotionProgram program = build_baseline_program(
        l.curve, l.robot1, robot2_placed, config, waypoints, speed,
        s.fitting.extension, s.fitting.default_blend);
    try {
      const ExecutionRecord record =
          execute(program, l.robot1, robot2_placed, {});
      const Metrics metrics =
          compute_metrics(record, l.curve, l.robot1, robot2_placed, s.tol);
      if (!metrics.within(s.tol)) return std::nullopt;
      return std::make_pair(std::move(program), metrics);
    } catch (const SimulationError&) {
      return std::nullopt;
    } catch (const std::runtime_error&) {
      return std::nullopt;
    }
  };

  double lo = 1.0;
  auto lo_result = evaluate(lo);
  if (!lo_result) {
    throw CliError{kExitTolerance,
                   "baseline: infeasible even at 1 mm/s floor"};
  }
  double hi = 50.0;
  while (hi < 5000.0) {
    auto r = evaluate(hi);
    if (!r) break;
    lo_result = r;
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 12 && hi - lo > 1.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    auto r = evaluate(mid);
    if (r) {
      lo_result = r;
      lo = mid;
    } else {
      hi = mid;
    }
  }

  const fs::path program_dir = subdir(s.out_dir, "program");
  const fs::path report_dir = subdir(s.out_dir, "report");
  save_motion_program((program_dir / "baseline_program.txt").string(),
                      lo_result->first);
  write_metrics_csv((report_dir / "baseline_metrics.csv").string(),
                    lo_result->second);
  std::cout << "baseline: " << waypoints << " waypoints, commanded speed "
            << lo << " mm/s, mu_avg " << lo_result->second.mu_avg
            << " mm/s, max_pos_err " << lo_result->second.max_pos_err
            << " mm\n";
  return kExitOk;
}

int cmd_report(const std::string& scenario_file,
               std::optional<std::string> out_override) {
  Scenario s = load_scenario(scenario_file);
  if (out_override) s.out_dir = *out_override;
  const fs::path report_dir = subdir(s.out_dir, "report");
  std::ostringstream summary;

  auto echo_comments = [&](const fs::path& file, const char* title) {
    if (!fs::exists(file)) return;
    summary << "[" << title << "] " << file.string() << "\n";
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '#') summary << "  " << line << "\n";
    }
  };
  echo_comments(report_dir / "metrics.csv", "metrics");
  echo_comments(report_dir / "baseline_metrics.csv", "baseline metrics");

  const fs::path evolution = s.out_dir / "config" / "evolution.csv";
  if (fs::exists(evolution)) {
    const auto rows = read_numeric_csv(evolution.string());
    if (!rows.empty()) {
      summary << "[evolution] " << evolution.string() << "\n"
              << "  generations " << rows.size() << ", first best "
              << rows.front()[1] << " mm/s, final best " << rows.back()[1]
              << " mm/s\n";
    }
  }
  const fs::path history = report_dir / "history.csv";
  if (fs::exists(history)) {
    const auto rows = read_numeric_csv(history.string());
    if (!rows.empty()) {
      summary << "[tuning] " << history.string() << "\n"
              << "  iterations " << rows.size() << ", final max_pos_err "
              << rows.back()[2] << " mm at mu_cmd " << rows.back()[1]
              << " mm/s\n";
    }
  }
  if (summary.str().empty()) {
    throw CliError{kExitInput,
                   "report: no artifacts found under " + s.out_dir.string()};
  }
  std::ofstream out(report_dir / "summary.txt");
  out << summary.str();
  std::cout << summary.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dual-arm curve-tracking toolkit: configuration optimization, "
      "primitive fitting, simulation, and waypoint tuning"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> config_path;
  std::optional<std::string> program_path;
  std::optional<int> waypoints;

  auto add_common = [&](CLI::App* cmd, bool with_seed) {
    cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "output directory override");
    if (with_seed) cmd->add_option("--seed", seed, "random seed");
  };

  CLI::App* optimize = app.add_subcommand(
      "optimize", "search the dual-arm configuration maximizing mu");
  add_common(optimize, true);

  CLI::App* fit = app.add_subcommand(
      "fit", "solve the joint path and fit motion primitives");
  add_common(fit, false);
  fit->add_option("--config", config_path, "DualConfig JSON");

  CLI::App* simulate =
      app.add_subcommand("simulate", "execute a program on the simulator");
  add_common(simulate, true);
  simulate->add_option("--config", config_path, "DualConfig JSON");
  simulate->add_option("--program", program_path, "motion program file");

  CLI::App* tune_cmd =
      app.add_subcommand("tune", "iterate waypoints until tolerances hold");
  add_common(tune_cmd, true);
  tune_cmd->add_option("--config", config_path, "DualConfig JSON");
  tune_cmd->add_option("--program", program_path, "motion program file");

  CLI::App* baseline = app.add_subcommand(
      "baseline", "single-arm moveL baseline at max feasible speed");
  add_common(baseline, false);
  baseline->add_option("--waypoints", waypoints, "number of moveL waypoints");

  CLI::App* report =
      app.add_subcommand("report", "summarize artifacts of a run");
  add_common(report, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return cmd_optimize(scenario, seed, out_dir);
    if (fit->parsed()) return cmd_fit(scenario, config_path, out_dir);
    if (simulate->parsed()) {
      return cmd_simulate(scenario, program_path, config_path, seed, out_dir);
    }
    if (tune_cmd->parsed()) {
      return cmd_tune(scenario, program_path, config_path, seed, out_dir);
    }
    if (baseline->parsed()) return cmd_baseline(scenario, waypoints, out_dir);
    if (report->parsed()) return cmd_report(scenario, out_dir);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
