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

#include "dualtrack/exec_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dualtrack/csv.hpp"

namespace dualtrack {

namespace {

constexpr double kTinyLength = 1e-6;  // mm, below this a segment has no corner

struct ArmTrace {
  // Joint samples over the shared global grid sigma = g * h, h = 1/N.
  std::vector<Vector6> q;
  std::vector<double> seg_length;  // mm, Cartesian length per segment
};

ArmTrace sample_arm(const std::vector<Primitive>& prims,
                    const RobotModel& model, const Vector6& start_q, int N) {
  const std::size_t K = prims.size();
  ArmTrace trace;
  trace.q.resize(K * N + 1);
  trace.seg_length.assign(K, 0.0);

  Vector6 cur_q = start_q;
  Pose cur_pose = forward_kinematics(model, cur_q);
  trace.q[0] = cur_q;
  for (std::size_t k = 0; k < K; ++k) {
    const Primitive& prim = prims[k];
    Vector6 seed = cur_q;
    Vector3 prev_p = cur_pose.p;
    for (int i = 1; i <= N; ++i) {
      const double u = static_cast<double>(i) / N;
      Vector6 q;
      Vector3 p;
      if (prim.kind == PrimitiveKind::kMoveJ) {
        q = primitive_joints(prim, cur_q, u);
        p = forward_kinematics(model, q).p;
      } else {
        const Pose pose = primitive_pose(model, prim, cur_pose, cur_q, u);
        const auto sol = single_arm_ik(model, pose, seed);
        if (!sol) {
          throw SimulationError(
              SimulationError::Kind::kIkFailure,
              "unreachable Cartesian target in segment " + std::to_string(k));
        }
        q = *sol;
        // Waypoints are contractual: refine the terminal sample well below
        // the blend-0 exactness budget. Mid-segment samples keep the looser
        // tracking tolerance.
        if (i == N) {
          if (const auto fine = single_arm_ik(model, pose, q, 1e-8, 1e-10)) {
            q = *fine;
          }
        }
        p = pose.p;
      }
      trace.q[k * N + i] = q;
      trace.seg_length[k] += (p - prev_p).norm();
      prev_p = p;
      seed = q;
    }
    cur_q = trace.q[(k + 1) * N];
    cur_pose = (prim.kind == PrimitiveKind::kMoveJ)
                   ? forward_kinematics(model, cur_q)
                   : prim.target;
  }
  return trace;
}

// Replace corners by joint-space cubic Hermite blends inside each blend
// window. Windows live in the shared sigma parameter but are per robot.
// The Hermite runs over elapsed time within the window, not over sigma:
// adjacent segments may map sigma to time at very different rates and a
// sigma-parameterized blend would spike the joint velocity at the corner.
void apply_blends(const std::vector<Primitive>& prims, ArmTrace& trace,
                  int N, const std::vector<double>& duration) {
  const std::size_t K = prims.size();
  const double h = 1.0 / N;
  const std::vector<Vector6> raw = trace.q;

  auto raw_at = [&](double sigma) {
    const double g = std::clamp(sigma / h, 0.0, double(raw.size() - 1));
    const std::size_t lo =
        std::min<std::size_t>(static_cast<std::size_t>(g), raw.size() - 2);
    const double f = g - lo;
    return Vector6((1.0 - f) * raw[lo] + f * raw[lo + 1]);
  };
  auto raw_slope = [&](std::size_t g, int dir) {
    // One-sided slope in sigma staying on one side of a boundary.
    if (dir < 0) return Vector6((raw[g] - raw[g - 1]) / h);
    return Vector6((raw[g + 1] - raw[g]) / h);
  };

  for (std::size_t k = 1; k < K; ++k) {
    const double b = prims[k - 1].blend_radius;
    const double len_in = trace.seg_length[k - 1];
    const double len_out = trace.seg_length[k];
    if (b <= 0.0 || len_in < kTinyLength || len_out < kTinyLength) continue;
    if (b >= 0.5 * len_in || b >= 0.5 * len_out) {
      throw SimulationError(
          SimulationError::Kind::kCornerPath,
          "corner path failure: blend radius " + std::to_string(b) +
              " mm vs segment lengths " + std::to_string(len_in) + "/" +
              std::to_string(len_out) + " mm at waypoint " +
              std::to_string(k));
    }
    const double din = std::min(b / len_in, 0.49);
    const double dout = std::min(b / len_out, 0.49);
    const double sa = k - din;
    const double sb = k + dout;
    const double t_in = duration[k - 1];
    const double t_out = duration[k];
    const double window_time = din * t_in + dout * t_out;
    const Vector6 ya = raw_at(sa);
    const Vector6 yb = raw_at(sb);
    const Vector6 ma = raw_slope(static_cast<std::size_t>(std::ceil(sa / h)),
                                 -1) *
                       (window_time / t_in);
    const Vector6 mb = raw_slope(static_cast<std::size_t>(std::floor(sb / h)),
                                 +1) *
                       (window_time / t_out);
    const std::size_t g0 = static_cast<std::size_t>(std::ceil(sa / h + 1e-12));
    const std::size_t g1 =
        static_cast<std::size_t>(std::floor(sb / h - 1e-12));
    for (std::size_t g = g0; g <= g1; ++g) {
      const double sigma = g * h;
      const double u = sigma <= k ? (sigma - sa) * t_in
                                  : din * t_in + (sigma - k) * t_out;
      const double tau = u / window_time;
      const double t2 = tau * tau;
      const double t3 = t2 * tau;
      trace.q[g] = (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + tau) * ma +
                   (-2 * t3 + 3 * t2) * yb + (t3 - t2) * mb;
    }
  }
}

}  // namespace

ExecutionRecord execute(const MotionProgram& program, const RobotModel& robot1,
                        const RobotModel& robot2_placed,
                        const ExecOptions& options) {
  const std::size_t K = program.size();
  if (K == 0) throw std::invalid_argument("execute: empty program");
  const int N = options.profile_per_segment;
  const double h = 1.0 / N;

  ArmTrace trace1 = sample_arm(program.robot1, robot1, program.start_q1, N);
  ArmTrace trace2 =
      sample_arm(program.robot2, robot2_placed, program.start_q2, N);

  // Segment durations: the slower arm wins.
  std::vector<double> duration(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double t1 = trace1.seg_length[k] / std::max(program.robot1[k].speed,
                                                      1e-9);
    const double t2 = trace2.seg_length[k] / std::max(program.robot2[k].speed,
                                                      1e-9);
    duration[k] = std::max({t1, t2, 1e-3});
  }

  apply_blends(program.robot1, trace1, N, duration);
  apply_blends(program.robot2, trace2, N, duration);

  const std::size_t G = K * N + 1;

  // Stop points: ends, plus corners where some arm has no blend.
  std::vector<bool> stop(G, false);
  stop[0] = stop[G - 1] = true;
  for (std::size_t k = 1; k < K; ++k) {
    auto corner_stop = [&](const std::vector<Primitive>& prims,
                           const ArmTrace& trace) {
      return prims[k - 1].blend_radius <= 0.0 &&
             trace.seg_length[k - 1] > kTinyLength &&
             trace.seg_length[k] > kTinyLength;
    };
    if (corner_stop(program.robot1, trace1) ||
        corner_stop(program.robot2, trace2)) {
      stop[k * N] = true;
    }
  }

  // Nominal time steps: the interval [g, g+1] lies in segment g / N and
  // nominally takes h * T_k seconds.
  std::vector<double> du(G - 1);
  for (std::size_t i = 0; i + 1 < G; ++i) {
    du[i] = h * duration[std::min<std::size_t>(i / N, K - 1)];
  }

  // Joint velocities of the nominal schedule (nonuniform differences).
  std::vector<Vector6> dqu1(G), dqu2(G);
  for (std::size_t g = 0; g < G; ++g) {
    if (g == 0) {
      dqu1[g] = (trace1.q[1] - trace1.q[0]) / du[0];
      dqu2[g] = (trace2.q[1] - trace2.q[0]) / du[0];
    } else if (g + 1 == G) {
      dqu1[g] = (trace1.q[g] - trace1.q[g - 1]) / du[g - 1];
      dqu2[g] = (trace2.q[g] - trace2.q[g - 1]) / du[g - 1];
    } else {
      const double w = du[g - 1] + du[g];
      dqu1[g] = (trace1.q[g + 1] - trace1.q[g - 1]) / w;
      dqu2[g] = (trace2.q[g + 1] - trace2.q[g - 1]) / w;
    }
  }

  // Profile the dimensionless time speed-up s (s = 1 is the commanded
  // schedule) rather than the sigma rate: the sigma rate must jump across
  // segment boundaries with the segment duration, so s is the quantity a
  // controller holds continuous. Caps: commanded speed, then path curvature
  // (q'' s^2 must stay inside the joint acceleration budget, the corner-dip
  // mechanism of a real controller).
  std::vector<double> cap(G), acc(G);
  for (std::size_t g = 0; g < G; ++g) {
    cap[g] = 1.0;
    const Vector6 a1 = accel_limits(robot1, trace1.q[g]);
    const Vector6 a2 = accel_limits(robot2_placed, trace2.q[g]);
    double a = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 6; ++j) {
      a = std::min(a, a1[j] / std::max(std::abs(dqu1[g][j]), 1e-9));
      a = std::min(a, a2[j] / std::max(std::abs(dqu2[g][j]), 1e-9));
    }
    acc[g] = a;
    if (g > 0 && g + 1 < G) {
      const double um = du[g - 1];
      const double up = du[g];
      const double denom = 0.5 * um * up * (um + up);
      const Vector6 c1 = (trace1.q[g + 1] * um + trace1.q[g - 1] * up -
                          trace1.q[g] * (um + up)) /
                         denom;
      const Vector6 c2 = (trace2.q[g + 1] * um + trace2.q[g - 1] * up -
                          trace2.q[g] * (um + up)) /
                         denom;
      for (int j = 0; j < 6; ++j) {
        cap[g] = std::min(
            cap[g], std::sqrt(a1[j] / std::max(std::abs(c1[j]), 1e-12)));
        cap[g] = std::min(
            cap[g], std::sqrt(a2[j] / std::max(std::abs(c2[j]), 1e-12)));
      }
    }
  }

  // Trapezoidal profile: forward/backward acceleration-limited passes over
  // nominal time (s * ds/du bounded by the ramp budget).
  std::vector<double> v(G);
  for (std::size_t g = 0; g < G; ++g) v[g] = stop[g] ? 0.0 : cap[g];
  for (std::size_t g = 1; g < G; ++g) {
    const double a = std::min(acc[g - 1], acc[g]);
    v[g] = std::min(v[g],
                    std::sqrt(v[g - 1] * v[g - 1] + 2.0 * a * du[g - 1]));
  }
  for (std::size_t g = G - 1; g > 0; --g) {
    const double a = std::min(acc[g - 1], acc[g]);
    v[g - 1] =
        std::min(v[g - 1], std::sqrt(v[g] * v[g] + 2.0 * a * du[g - 1]));
  }

  // Global velocity-limit scaling and saturation bookkeeping.
  double rho = 1.0;
  std::vector<int> saturated;
  {
    std::vector<bool> seg_hit(K, false);
    for (std::size_t g = 0; g < G; ++g) {
      double r = 0.0;
      for (int j = 0; j < 6; ++j) {
        const double qd1 = dqu1[g][j] * v[g];
        const double qd2 = dqu2[g][j] * v[g];
        r = std::max(r, qd1 > 0 ? qd1 / robot1.qd_max[j]
                                : qd1 / robot1.qd_min[j]);
        r = std::max(r, qd2 > 0 ? qd2 / robot2_placed.qd_max[j]
                                : qd2 / robot2_placed.qd_min[j]);
      }
      if (r > 1.0) seg_hit[std::min<std::size_t>(g / N, K - 1)] = true;
      rho = std::max(rho, r);
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (seg_hit[k]) saturated.push_back(static_cast<int>(k));
    }
  }

  const double out_dt = 1.0 / options.output_rate;
  const int decim = std::max(
      1, static_cast<int>(std::lround(options.internal_rate /
                                      options.output_rate)));
  const double int_dt = out_dt / decim;

  ExecutionRecord record;
  record.saturated_segments = saturated;

  // A global stretch keeps velocity limits; a second pass (squared effect on
  // acceleration) keeps the finite-difference acceleration of the output
  // compliant as well.
  double scale = rho;
  for (int attempt = 0; attempt < 4; ++attempt) {
    // Time integration over the grid, dwelling at stop points so they land
    // exactly on output samples.
    std::vector<double> tg(G);
    tg[0] = 0.0;
    for (std::size_t g = 1; g < G; ++g) {
      const double vm = 0.5 * (v[g - 1] + v[g]) / scale;
      tg[g] = tg[g - 1] + du[g - 1] / std::max(vm, 1e-9);
      if (stop[g]) {
        tg[g] = std::ceil(tg[g] / out_dt - 1e-9) * out_dt;
      }
    }
    const double total = tg[G - 1];

    record.t.clear();
    record.q1.clear();
    record.q2.clear();
    record.segment_switch_times.assign(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
      record.segment_switch_times[k - 1] = tg[std::min(k * N, G - 1)];
    }

    const int steps = static_cast<int>(std::lround(total / int_dt));
    std::size_t g = 0;
    for (int j = 0; j <= steps; j += decim) {
      const double t = std::min(j * int_dt, total);
      while (g + 1 < G && tg[g + 1] <= t + 1e-12) ++g;
      double sigma;
      if (g + 1 >= G) {
        sigma = (G - 1) * h;
      } else {
        const double span = tg[g + 1] - tg[g];
        const double f = span > 1e-12 ? (t - tg[g]) / span : 0.0;
        sigma = (g + f) * h;
      }
      const double gpos = sigma / h;
      const std::size_t lo =
          std::min<std::size_t>(static_cast<std::size_t>(gpos), G - 2);
      const double f = gpos - lo;
      record.t.push_back(t);
      record.q1.push_back((1.0 - f) * trace1.q[lo] + f * trace1.q[lo + 1]);
      record.q2.push_back((1.0 - f) * trace2.q[lo] + f * trace2.q[lo + 1]);
      g = std::min<std::size_t>(g, G - 2);
    }
    // Snap stop points onto the nearest output sample: dwell guarantees one
    // exists.
    for (std::size_t gg = 0; gg < G; ++gg) {
      if (!stop[gg]) continue;
      const std::size_t idx = std::min<std::size_t>(
          static_cast<std::size_t>(std::lround(tg[gg] / out_dt)),
          record.size() - 1);
      record.q1[idx] = trace1.q[gg];
      record.q2[idx] = trace2.q[gg];
    }

    // Verify finite-difference limits of the produced record.
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < record.size(); ++i) {
      const Vector6 qd1 = (record.q1[i + 1] - record.q1[i]) / out_dt;
      const Vector6 qd2 = (record.q2[i + 1] - record.q2[i]) / out_dt;
      for (int j = 0; j < 6; ++j) {
        worst = std::max(worst, qd1[j] > 0 ? qd1[j] / robot1.qd_max[j]
                                           : qd1[j] / robot1.qd_min[j]);
        worst = std::max(worst, qd2[j] > 0 ? qd2[j] / robot2_placed.qd_max[j]
                                           : qd2[j] / robot2_placed.qd_min[j]);
      }
    }
    double worst_acc = 0.0;
    for (std::size_t i = 1; i + 1 < record.size(); ++i) {
      const Vector6 qdd1 = (record.q1[i + 1] - 2.0 * record.q1[i] +
                            record.q1[i - 1]) /
                           (out_dt * out_dt);
      const Vector6 qdd2 = (record.q2[i + 1] - 2.0 * record.q2[i] +
                            record.q2[i - 1]) /
                           (out_dt * out_dt);
      const Vector6 lim1 = accel_limits(robot1, record.q1[i]);
      const Vector6 lim2 = accel_limits(robot2_placed, record.q2[i]);
      for (int j = 0; j < 6; ++j) {
        worst_acc = std::max(worst_acc, std::abs(qdd1[j]) / lim1[j]);
        worst_acc = std::max(worst_acc, std::abs(qdd2[j]) / lim2[j]);
      }
    }
    const double need =
        std::max(worst, worst_acc > 1.0 ? std::sqrt(worst_acc) : 1.0);
    if (need <= 1.0 + 1e-9) break;
    scale *= need * (1.0 + 1e-6);
  }
  record.time_scale = scale;

  // Repeatability: one constant Cartesian offset per arm per run, mapped to
  // a joint offset at the start configuration.
  if (options.noise_sigma1 > 0.0 || options.noise_sigma2 > 0.0) {
    std::mt19937_64 rng(options.seed);
    auto joint_offset = [&rng](const RobotModel& model, const Vector6& q,
                               double sigma) {
      std::normal_distribution<double> dist(0.0, sigma / 3.0);
      Vector3 dx;
      for (int j = 0; j < 3; ++j) dx[j] = dist(rng);
      const Matrix6 J = jacobian(model, q);
      const Eigen::Matrix<double, 3, 6> Jv = J.bottomRows<3>();
      const Matrix3 JJt =
          Jv * Jv.transpose() + 1e-6 * Matrix3::Identity();
      return Vector6(Jv.transpose() * JJt.ldlt().solve(dx));
    };
    const Vector6 d1 = options.noise_sigma1 > 0.0
                           ? joint_offset(robot1, program.start_q1,
                                          options.noise_sigma1)
                           : Vector6::Zero();
    const Vector6 d2 = options.noise_sigma2 > 0.0
                           ? joint_offset(robot2_placed, program.start_q2,
                                          options.noise_sigma2)
                           : Vector6::Zero();
    for (std::size_t i = 0; i < record.size(); ++i) {
      record.q1[i] += d1;
      record.q2[i] += d2;
    }
  }
  return record;
}

ExecutionRecord average_runs(const MotionProgram& program,
                             const RobotModel& robot1,
                             const RobotModel& robot2_placed, int n,
                             const ExecOptions& options) {
  if (n < 1) throw std::invalid_argument("average_runs: n must be >= 1");
  const bool noisy =
      options.noise_sigma1 > 0.0 || options.noise_sigma2 > 0.0;
  if (n == 1 || !noisy) return execute(program, robot1, robot2_placed, options);

  ExecutionRecord mean;
  for (int run = 0; run < n; ++run) {
    ExecOptions per_run = options;
    per_run.seed = options.seed + static_cast<std::uint64_t>(run);
    ExecutionRecord rec = execute(program, robot1, robot2_placed, per_run);
    if (run == 0) {
      mean = rec;
      continue;
    }
    // Noise does not change the timing, so records share the grid.
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean.q1[i] += rec.q1[i];
      mean.q2[i] += rec.q2[i];
    }
  }
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean.q1[i] /= n;
    mean.q2[i] /= n;
  }
  return mean;
}

void write_execution_record_csv(const std::string& path,
                                const ExecutionRecord& record) {
  std::vector<std::vector<double>> rows;
  rows.reserve(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    std::vector<double> row;
    row.push_back(record.t[i]);
    for (int j = 0; j < 6; ++j) row.push_back(record.q1[i][j]);
    for (int j = 0; j < 6; ++j) row.push_back(record.q2[i][j]);
    rows.push_back(std::move(row));
  }
  write_numeric_csv(path, {"t (s), q1[1..6] (rad), q2[1..6] (rad)"}, rows);
}

ExecutionRecord read_execution_record_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  ExecutionRecord record;
  for (const auto& row : rows) {
    if (row.size() != 13) {
      throw std::runtime_error("execution record: expected 13 columns in " +
                               path);
    }
    record.t.push_back(row[0]);
    Vector6 q1, q2;
    for (int j = 0; j < 6; ++j) {
      q1[j] = row[1 + j];
      q2[j] = row[7 + j];
    }
    record.q1.push_back(q1);
    record.q2.push_back(q2);
  }
  return record;
}

}  // namespace dualtrack
