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

#include "dualtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dualtrack/csv.hpp"

namespace dualtrack {

namespace {

struct ClosestPoint {
  double param = 0.0;  // fractional curve-sample index
  double distance = 0.0;
  Vector3 point = Vector3::Zero();
  Vector3 normal = Vector3::UnitZ();
};

ClosestPoint closest_on_curve(const Curve& curve, const Vector3& p,
                              std::size_t hint, std::size_t window) {
  const std::size_t n = curve.size();
  const std::size_t lo = hint > window ? hint - window : 0;
  const std::size_t hi = std::min(n - 1, hint + window);
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t j = lo; j < hi; ++j) {
    const Vector3& a = curve.samples[j].p;
    const Vector3& b = curve.samples[j + 1].p;
    const Vector3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t =
        len2 > 1e-24 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vector3 x = a + t * ab;
    const double d = (p - x).norm();
    if (d < best.distance) {
      best.distance = d;
      best.param = j + t;
      best.point = x;
      best.normal =
          ((1.0 - t) * curve.samples[j].n + t * curve.samples[j + 1].n)
              .normalized();
    }
  }
  return best;
}

}  // namespace

Metrics compute_metrics(const ExecutionRecord& record, const Curve& curve,
                        const RobotModel& robot1,
                        const RobotModel& robot2_placed,
                        const Tolerances& tol) {
  const std::size_t n = record.size();
  if (n < 3) throw std::runtime_error("compute_metrics: record too short");
  if (curve.size() < 2) {
    throw std::invalid_argument("compute_metrics: degenerate curve");
  }

  Metrics m;
  m.t = record.t;
  m.pos_err.resize(n);
  m.norm_err.resize(n);
  m.mu.resize(n);
  m.gated.assign(n, 0);
  m.closest_param.resize(n);

  std::vector<Vector3> rel(n);
  std::size_t hint = 0;
  bool have_hint = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Pose p1 = forward_kinematics(robot1, record.q1[i]);
    const Pose p2 = forward_kinematics(robot2_placed, record.q2[i]);
    rel[i] = p2.R.transpose() * (p1.p - p2.p);
    const Vector3 axis = p2.R.transpose() * p1.R.col(2);

    const std::size_t window = have_hint ? 50 : curve.size();
    ClosestPoint cp = closest_on_curve(curve, rel[i], hint, window);
    if (have_hint && cp.distance > 2.0 * tol.eps_pos) {
      // Fell out of the window (lead-out); re-search globally once.
      cp = closest_on_curve(curve, rel[i], 0, curve.size());
    }
    hint = static_cast<std::size_t>(cp.param);
    have_hint = true;

    m.pos_err[i] = cp.distance;
    m.closest_param[i] = cp.param;
    m.norm_err[i] = angle_between(axis, Vector3(-cp.normal)) * 180.0 / M_PI;

    const bool at_endpoint =
        cp.param <= 1e-9 || cp.param >= curve.size() - 1 - 1e-9;
    m.gated[i] = (at_endpoint && cp.distance > 2.0 * tol.eps_pos) ? 0 : 1;
  }

  // Trim the lead-in/out: contiguous runs at either end of the record whose
  // closest curve point is still an endpoint belong to the approach or the
  // retract (including the dwell at the curve ends), not to the traversal.
  auto at_end = [&](std::size_t i) {
    return m.closest_param[i] <= 1e-9 ||
           m.closest_param[i] >= curve.size() - 1 - 1e-9;
  };
  for (std::size_t i = 0; i < n && at_end(i); ++i) m.gated[i] = 0;
  for (std::size_t i = n; i-- > 0 && at_end(i);) m.gated[i] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i > 0 ? i - 1 : 0;
    const std::size_t b = i + 1 < n ? i + 1 : n - 1;
    const double dt = record.t[b] - record.t[a];
    m.mu[i] = dt > 1e-12 ? (rel[b] - rel[a]).norm() / dt : 0.0;
  }

  std::size_t count = 0;
  double mu_sum = 0.0, mu_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.gated[i]) continue;
    ++count;
    m.max_pos_err = std::max(m.max_pos_err, m.pos_err[i]);
    m.max_norm_err = std::max(m.max_norm_err, m.norm_err[i]);
    mu_sum += m.mu[i];
    mu_sq += m.mu[i] * m.mu[i];
  }
  if (count < 3) {
    throw std::runtime_error(
        "compute_metrics: fewer than 3 samples inside the gate");
  }
  m.mu_avg = mu_sum / count;
  const double var = std::max(0.0, mu_sq / count - m.mu_avg * m.mu_avg);
  m.speed_std_ratio =
      m.mu_avg > 1e-12 ? std::sqrt(var) / m.mu_avg : 0.0;
  return m;
}

void write_metrics_csv(const std::string& path, const Metrics& metrics) {
  std::vector<std::vector<double>> rows;
  rows.reserve(metrics.t.size());
  for (std::size_t i = 0; i < metrics.t.size(); ++i) {
    rows.push_back({metrics.t[i], metrics.pos_err[i], metrics.norm_err[i],
                    metrics.mu[i], static_cast<double>(metrics.gated[i]),
                    metrics.closest_param[i]});
  }
  write_numeric_csv(
      path,
      {"max_pos_err (mm) = " + std::to_string(metrics.max_pos_err),
       "max_norm_err (deg) = " + std::to_string(metrics.max_norm_err),
       "mu_avg (mm/s) = " + std::to_string(metrics.mu_avg),
       "speed_std_ratio = " + std::to_string(metrics.speed_std_ratio),
       "t (s), pos_err (mm), norm_err (deg), mu (mm/s), gated, closest_param"},
      rows);
}

}  // namespace dualtrack
