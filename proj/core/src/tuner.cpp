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

#include "dualtrack/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualtrack/csv.hpp"

namespace dualtrack {

namespace {

struct Waypoint {
  Pose pose1, pose2;
  Vector6 q1 = Vector6::Zero();
  Vector6 q2 = Vector6::Zero();
};

// Commanded state at each segment's terminal waypoint, chained from the
// program start (IK tracks joints through Cartesian segments).
std::vector<Waypoint> chain_waypoints(const MotionProgram& program,
                                      const RobotModel& robot1,
                                      const RobotModel& robot2_placed) {
  std::vector<Waypoint> wps(program.size());
  Vector6 q1 = program.start_q1, q2 = program.start_q2;
  for (std::size_t k = 0; k < program.size(); ++k) {
    auto settle = [](const RobotModel& model, const Primitive& prim,
                     Vector6& q) {
      if (prim.kind == PrimitiveKind::kMoveJ) {
        q = prim.joint_target;
        return forward_kinematics(model, q);
      }
      if (auto sol = single_arm_ik(model, prim.target, q)) q = *sol;
      return prim.target;
    };
    wps[k].pose1 = settle(robot1, program.robot1[k], q1);
    wps[k].pose2 = settle(robot2_placed, program.robot2[k], q2);
    wps[k].q1 = q1;
    wps[k].q2 = q2;
  }
  return wps;
}

std::size_t sample_at_time(const ExecutionRecord& record, double t) {
  if (record.size() < 2) return 0;
  const double dt = record.t[1] - record.t[0];
  const auto idx = static_cast<std::ptrdiff_t>(std::lround(t / dt));
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(idx, 0, record.size() - 1));
}

struct CurvePoint {
  Vector3 p = Vector3::Zero();
  Vector3 n = Vector3::UnitZ();
  double distance = 0.0;
};

CurvePoint closest_curve_point(const Curve& curve, const Vector3& x) {
  CurvePoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < curve.size(); ++j) {
    const Vector3& a = curve.samples[j].p;
    const Vector3& b = curve.samples[j + 1].p;
    const Vector3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t =
        len2 > 1e-24 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vector3 p = a + t * ab;
    const double d = (x - p).norm();
    if (d < best.distance) {
      best.distance = d;
      best.p = p;
      best.n = ((1.0 - t) * curve.samples[j].n + t * curve.samples[j + 1].n)
                   .normalized();
    }
  }
  return best;
}

// Executed relative error terms at one record sample.
struct SampleError {
  Vector3 e_p = Vector3::Zero();  // world mm
  double theta = 0.0;             // rad
  Vector3 axis = Vector3::UnitZ();  // rotation axis closing theta
  bool axis_valid = false;
};

SampleError sample_error(const ExecutionRecord& record, std::size_t idx,
                         const Curve& curve, const RobotModel& robot1,
                         const RobotModel& robot2_placed) {
  const Pose p1 = forward_kinematics(robot1, record.q1[idx]);
  const Pose p2 = forward_kinematics(robot2_placed, record.q2[idx]);
  const Vector3 rel = p2.R.transpose() * (p1.p - p2.p);
  const CurvePoint cp = closest_curve_point(curve, rel);
  SampleError err;
  err.e_p = p1.p - p2.p - p2.R * cp.p;
  const Vector3 a = p1.R.col(2);
  const Vector3 b = -(p2.R * cp.n);
  err.theta = angle_between(a, b);
  const Vector3 cross = a.cross(b);
  if (cross.norm() > 1e-9) {
    err.axis = cross.normalized();
    err.axis_valid = true;
  }
  return err;
}

// Shifts one waypoint: robot-1 target by +dp1 / rotation R(axis, +ang),
// robot-2 by -dp1 / R(axis, -ang). moveJ targets re-solved by IK.
void shift_waypoint(MotionProgram& program, std::size_t k,
                    const std::vector<Waypoint>& wps, const RobotModel& robot1,
                    const RobotModel& robot2_placed, const Vector3& dp1,
                    const Vector3& axis, double ang) {
  auto apply = [&](Primitive& prim, const RobotModel& model, const Pose& pose,
                   const Vector6& q, const Vector3& dp, double rot) {
    Pose target = (prim.kind == PrimitiveKind::kMoveJ) ? pose : prim.target;
    target.p += dp;
    if (std::abs(rot) > 1e-12) {
      target.R = axis_angle_rotation(axis, rot) * target.R;
    }
    if (prim.kind == PrimitiveKind::kMoveJ) {
      if (auto sol = single_arm_ik(model, target, q)) {
        prim.joint_target = *sol;
      }
      return;
    }
    prim.target = target;
    if (prim.kind == PrimitiveKind::kMoveC) prim.via += dp;
  };
  apply(program.robot1[k], robot1, wps[k].pose1, wps[k].q1, dp1, ang);
  apply(program.robot2[k], robot2_placed, wps[k].pose2, wps[k].q2, -dp1,
        -ang);
}

Vector3 catmull_rom(const std::vector<Vector3>& knots, double s) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(knots.size());
  if (n == 1) return knots[0];
  const std::ptrdiff_t i =
      std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(s)),
                                 0, n - 2);
  const double t = s - i;
  auto at = [&](std::ptrdiff_t j) {
    return knots[std::clamp<std::ptrdiff_t>(j, 0, n - 1)];
  };
  const Vector3 p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  const Vector3 m1 = 0.5 * (p2 - p0);
  const Vector3 m2 = 0.5 * (p3 - p1);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + t) * m1 +
         (-2 * t3 + 3 * t2) * p2 + (t3 - t2) * m2;
}

}  // namespace

MotionProgram proportional_adjust(const MotionProgram& program,
                                  const ExecutionRecord& record,
                                  const Curve& curve, const RobotModel& robot1,
                                  const RobotModel& robot2_placed,
                                  double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) {
    throw std::invalid_argument("proportional_adjust: gamma must be in (0,1]");
  }
  MotionProgram out = program;
  const auto wps = chain_waypoints(program, robot1, robot2_placed);
  for (std::size_t k = 0; k + 1 < program.size(); ++k) {
    const double t_k = k < record.segment_switch_times.size()
                           ? record.segment_switch_times[k]
                           : record.t.back() * (k + 1.0) / program.size();
    const std::size_t idx = sample_at_time(record, t_k);
    const SampleError err =
        sample_error(record, idx, curve, robot1, robot2_placed);
    // The relative waypoint moves by -gamma * e_p, split between the arms.
    const Vector3 dp1 = -0.5 * gamma * err.e_p;
    const double ang = err.axis_valid ? 0.5 * gamma * err.theta : 0.0;
    shift_waypoint(out, k, wps, robot1, robot2_placed, dp1, err.axis, ang);
  }
  return out;
}

MotionProgram multipeak_adjust(const MotionProgram& program,
                               const ExecutionRecord& record,
                               const Curve& curve, const RobotModel& robot1,
                               const RobotModel& robot2_placed,
                               const Tolerances& tol) {
  const Metrics m =
      compute_metrics(record, curve, robot1, robot2_placed, tol);

  // Local maxima of the gated position error above tolerance with enough
  // prominence.
  std::vector<std::size_t> peaks;
  const std::size_t n = m.pos_err.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!m.gated[i] || m.pos_err[i] <= tol.eps_pos) continue;
    if (m.pos_err[i] < m.pos_err[i - 1] || m.pos_err[i] < m.pos_err[i + 1]) {
      continue;
    }
    auto valley = [&](std::ptrdiff_t dir) {
      double low = m.pos_err[i];
      for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + dir;
           j >= 0 && j < static_cast<std::ptrdiff_t>(n); j += dir) {
        if (m.pos_err[j] > m.pos_err[i]) break;
        low = std::min(low, m.pos_err[j]);
      }
      return low;
    };
    const double prominence =
        m.pos_err[i] - std::max(valley(-1), valley(+1));
    if (prominence >= 0.05) peaks.push_back(i);
  }
  if (peaks.empty()) return program;

  MotionProgram out = program;
  const auto wps = chain_waypoints(program, robot1, robot2_placed);
  const std::size_t K = program.size();

  // Relative commanded waypoints as spline knots; knot j+1 is segment j's
  // terminal, knot 0 the program start.
  std::vector<Vector3> knots(K + 1);
  {
    const Pose s1 = forward_kinematics(robot1, program.start_q1);
    const Pose s2 = forward_kinematics(robot2_placed, program.start_q2);
    knots[0] = s2.R.transpose() * (s1.p - s2.p);
    for (std::size_t k = 0; k < K; ++k) {
      knots[k + 1] =
          wps[k].pose2.R.transpose() * (wps[k].pose1.p - wps[k].pose2.p);
    }
  }

  std::vector<Vector3> knot_shift(K + 1, Vector3::Zero());
  std::vector<bool> knot_moved(K + 1, false);

  for (const std::size_t peak : peaks) {
    const double t_peak = m.t[peak];
    // Spline parameter of the peak from the segment switch times.
    double s_peak = 0.0;
    {
      std::size_t seg = 0;
      double t_prev = 0.0;
      for (; seg < record.segment_switch_times.size(); ++seg) {
        if (t_peak <= record.segment_switch_times[seg]) break;
        t_prev = record.segment_switch_times[seg];
      }
      seg = std::min(seg, K - 1);
      const double t_next = record.segment_switch_times.empty()
                                ? record.t.back()
                                : record.segment_switch_times[seg];
      const double u =
          t_next > t_prev ? (t_peak - t_prev) / (t_next - t_prev) : 0.0;
      s_peak = seg + std::clamp(u, 0.0, 1.0);
    }

    // 3 nearest adjustable knots (interior waypoints: knots 1 .. K-1).
    std::vector<std::size_t> nearest;
    for (std::size_t j = 1; j < K; ++j) nearest.push_back(j);
    std::sort(nearest.begin(), nearest.end(), [&](std::size_t a,
                                                  std::size_t b) {
      return std::abs(a - s_peak) < std::abs(b - s_peak);
    });
    nearest.resize(std::min<std::size_t>(3, nearest.size()));

    auto predicted_error = [&](const Eigen::Matrix<double, 9, 1>& d) {
      std::vector<Vector3> trial = knots;
      for (std::size_t c = 0; c < nearest.size(); ++c) {
        trial[nearest[c]] += knot_shift[nearest[c]] + d.segment<3>(3 * c);
      }
      return closest_curve_point(curve, catmull_rom(trial, s_peak)).distance;
    };

    const double e0 = predicted_error(Eigen::Matrix<double, 9, 1>::Zero());
    Eigen::Matrix<double, 9, 1> grad = Eigen::Matrix<double, 9, 1>::Zero();
    const double h = 0.01;
    for (int c = 0; c < static_cast<int>(nearest.size()) * 3; ++c) {
      Eigen::Matrix<double, 9, 1> d = Eigen::Matrix<double, 9, 1>::Zero();
      d[c] = h;
      grad[c] = (predicted_error(d) - e0) / h;
    }
    if (grad.norm() < 1e-9) continue;

    const Eigen::Matrix<double, 9, 1> dir = -grad / grad.norm();
    double step = e0;
    bool accepted = false;
    for (int halving = 0; halving <= 8; ++halving) {
      if (predicted_error(dir * step) < e0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) continue;
    for (std::size_t c = 0; c < nearest.size(); ++c) {
      knot_shift[nearest[c]] += step * dir.segment<3>(3 * c);
      knot_moved[nearest[c]] = true;
    }
  }

  for (std::size_t j = 1; j < K; ++j) {
    if (!knot_moved[j]) continue;
    const std::size_t k = j - 1;  // knot j is segment k's terminal
    const Vector3 world = wps[k].pose2.R * knot_shift[j];
    shift_waypoint(out, k, wps, robot1, robot2_placed, 0.5 * world,
                   Vector3::UnitZ(), 0.0);
  }
  return out;
}

TuneResult tune(const MotionProgram& program, const Curve& curve,
                const RobotModel& robot1, const RobotModel& robot2_placed,
                const Tolerances& tol, double mu_start,
                const TuneOptions& options) {
  TuneResult result;
  result.program = program;
  result.mu_cmd = mu_start;

  MotionProgram current = program;
  double mu = mu_start;
  double best_err = std::numeric_limits<double>::infinity();
  double prev_err = std::numeric_limits<double>::infinity();
  int plateau = 0;
  bool blends_frozen = false;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    ExecOptions exec = options.exec;
    exec.seed = options.exec.seed + static_cast<std::uint64_t>(iter) * 1000;
    ExecutionRecord record;
    Metrics metrics;
    try {
      record =
          average_runs(current, robot1, robot2_placed, options.runs, exec);
      metrics = compute_metrics(record, curve, robot1, robot2_placed, tol);
    } catch (const SimulationError&) {
      mu *= options.speed_backoff;
      if (mu < options.mu_floor) break;
      for (auto& p : current.robot1) p.speed *= options.speed_backoff;
      for (auto& p : current.robot2) p.speed *= options.speed_backoff;
      continue;
    }

    result.history.push_back({iter, mu, metrics.max_pos_err,
                              metrics.max_norm_err, metrics.mu_avg,
                              metrics.speed_std_ratio});

    if (metrics.max_pos_err < best_err) {
      best_err = metrics.max_pos_err;
      result.program = current;
      result.metrics = metrics;
      result.mu_cmd = mu;
    }
    if (metrics.within(tol)) {
      result.program = current;
      result.metrics = metrics;
      result.mu_cmd = mu;
      result.success = true;
      return result;
    }

    // Waypoint speed dips show up as a large spread of the relative speed:
    // widen blend zones before touching waypoints or speed.
    if (!blends_frozen && metrics.speed_std_ratio > tol.eps_speed) {
      MotionProgram grown = current;
      for (std::size_t k = 0; k + 1 < grown.size(); ++k) {
        grown.robot1[k].blend_radius *= options.blend_growth;
        grown.robot2[k].blend_radius *= options.blend_growth;
      }
      try {
        (void)execute(grown, robot1, robot2_placed, exec);
        current = grown;
        continue;
      } catch (const SimulationError&) {
        blends_frozen = true;
      }
    }

    const bool err_fail =
        metrics.max_pos_err > tol.eps_pos || metrics.max_norm_err > tol.eps_norm;
    const double improve =
        std::isfinite(prev_err) && prev_err > 0.0
            ? (prev_err - metrics.max_pos_err) / prev_err
            : 1.0;
    prev_err = metrics.max_pos_err;

    if (err_fail) {
      if (improve > 0.01) {
        current = proportional_adjust(current, record, curve, robot1,
                                      robot2_placed, options.gamma);
        plateau = 0;
      } else {
        current = multipeak_adjust(current, record, curve, robot1,
                                   robot2_placed, tol);
        if (++plateau >= 2) {
          mu *= options.speed_backoff;
          for (auto& p : current.robot1) p.speed *= options.speed_backoff;
          for (auto& p : current.robot2) p.speed *= options.speed_backoff;
          plateau = 0;
          prev_err = std::numeric_limits<double>::infinity();
        }
      }
    } else {
      // Only the speed-spread constraint fails and blends are frozen.
      mu *= options.speed_backoff;
      for (auto& p : current.robot1) p.speed *= options.speed_backoff;
      for (auto& p : current.robot2) p.speed *= options.speed_backoff;
    }
    if (mu < options.mu_floor) break;
  }
  return result;
}

void write_tune_history_csv(const std::string& path,
                            const std::vector<TuneHistoryEntry>& history) {
  std::vector<std::vector<double>> rows;
  for (const auto& e : history) {
    rows.push_back({static_cast<double>(e.iteration), e.mu_cmd, e.max_pos_err,
                    e.max_norm_err, e.mu_avg, e.speed_std_ratio});
  }
  write_numeric_csv(path,
                    {"iteration, mu_cmd (mm/s), max_pos_err (mm), "
                     "max_norm_err (deg), mu_avg (mm/s), std_ratio"},
                    rows);
}

}  // namespace dualtrack
