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

#include "dualtrack/speed_bound.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dualtrack {

namespace {

constexpr double kDerivEps = 1e-12;

Vector12 stack(const Vector6& a, const Vector6& b) {
  Vector12 v;
  v << a, b;
  return v;
}

}  // namespace

PathDerivatives path_derivatives(const JointPath& path) {
  const std::size_t n = path.size();
  if (n < 3) {
    throw std::invalid_argument("path_derivatives: need at least 3 samples");
  }
  const double step = path.lambda[1] - path.lambda[0];
  for (std::size_t i = 1; i + 2 < n; ++i) {
    if (std::abs((path.lambda[i + 1] - path.lambda[i]) - step) > 1e-6) {
      throw std::invalid_argument("path_derivatives: non-uniform lambda grid");
    }
  }
  std::vector<Vector12> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = stack(path.q1[i], path.q2[i]);

  PathDerivatives d;
  d.dq.resize(n);
  d.ddq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (i == 0) ? 0 : i - 1;
    const std::size_t b = (i + 1 == n) ? i : i + 1;
    d.dq[i] = (q[b] - q[a]) / (path.lambda[b] - path.lambda[a]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i + 1 == n) {
      // One-sided second difference from neighboring first differences.
      const std::size_t j = (i == 0) ? 1 : n - 2;
      d.ddq[i] = (d.dq[j] - d.dq[i]) / (path.lambda[j] - path.lambda[i]);
    } else {
      const double h1 = path.lambda[i] - path.lambda[i - 1];
      const double h2 = path.lambda[i + 1] - path.lambda[i];
      d.ddq[i] = 2.0 * (h1 * q[i + 1] - (h1 + h2) * q[i] + h2 * q[i - 1]) /
                 (h1 * h2 * (h1 + h2));
    }
  }
  return d;
}

SpeedProfile max_uniform_speed(const JointPath& path, const RobotModel& robot1,
                               const RobotModel& robot2) {
  if (path.size() == 0 || path.lambda.back() <= path.lambda.front()) {
    throw std::invalid_argument("max_uniform_speed: path has zero length");
  }
  const PathDerivatives d = path_derivatives(path);
  const std::size_t n = path.size();

  SpeedProfile profile;
  profile.lambda = path.lambda;
  profile.vel_bound.assign(n, kUnbounded);
  profile.acc_bound.assign(n, kUnbounded);
  profile.combined.assign(n, kUnbounded);

  for (std::size_t i = 0; i < n; ++i) {
    double vb = kUnbounded;
    for (int c = 0; c < 12; ++c) {
      const double qp = d.dq[i][c];
      if (std::abs(qp) < kDerivEps) continue;
      const RobotModel& m = (c < 6) ? robot1 : robot2;
      const int j = c % 6;
      // qd_min <= qp * ldot <= qd_max with ldot > 0.
      const double bound = (qp > 0.0) ? m.qd_max[j] / qp : m.qd_min[j] / qp;
      vb = std::min(vb, bound);
    }
    profile.vel_bound[i] = vb;

    // One-sided q'' at the ends is noise; a ramp-up path covers the start.
    if (i > 0 && i + 1 < n) {
      const Vector6 amax1 = accel_limits(robot1, path.q1[i]);
      const Vector6 amax2 = accel_limits(robot2, path.q2[i]);
      double ab = kUnbounded;
      for (int c = 0; c < 12; ++c) {
        const double qpp = d.ddq[i][c];
        if (std::abs(qpp) < kDerivEps) continue;
        const double amax = (c < 6) ? amax1[c] : amax2[c - 6];
        // Symmetric limits: |qpp| * ldot^2 <= amax.
        ab = std::min(ab, std::sqrt(amax / std::abs(qpp)));
      }
      profile.acc_bound[i] = ab;
    }
    profile.combined[i] = std::min(profile.vel_bound[i], profile.acc_bound[i]);
  }

  double mu = kUnbounded;
  for (const double c : profile.combined) mu = std::min(mu, c);
  profile.mu = mu;
  return profile;
}

void write_speed_profile_csv(const std::string& path,
                             const SpeedProfile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "# lambda, vel_bound, acc_bound, combined (mm/s)\n";
  auto put = [&out](double v) {
    if (std::isinf(v)) out << "unbounded";
    else out << v;
  };
  for (std::size_t i = 0; i < profile.lambda.size(); ++i) {
    out << profile.lambda[i] << ",";
    put(profile.vel_bound[i]);
    out << ",";
    put(profile.acc_bound[i]);
    out << ",";
    put(profile.combined[i]);
    out << "\n";
  }
}

}  // namespace dualtrack
