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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dualtrack/speed_bound.hpp"
#include "test_util.hpp"

namespace dualtrack {
namespace {

using testing::compact_model;
using testing::heavy_model;

JointPath sinusoid_path(std::mt19937& rng, int samples, double step) {
  std::uniform_real_distribution<double> amp(0.05, 0.3);
  std::uniform_real_distribution<double> freq(0.02, 0.08);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  double a1[6], w1[6], f1[6], a2[6], w2[6], f2[6];
  for (int j = 0; j < 6; ++j) {
    a1[j] = amp(rng);
    w1[j] = freq(rng);
    f1[j] = phase(rng);
    a2[j] = amp(rng);
    w2[j] = freq(rng);
    f2[j] = phase(rng);
  }
  JointPath path;
  for (int i = 0; i < samples; ++i) {
    const double lambda = step * i;
    Vector6 q1, q2;
    for (int j = 0; j < 6; ++j) {
      q1[j] = a1[j] * std::sin(w1[j] * lambda + f1[j]);
      q2[j] = a2[j] * std::sin(w2[j] * lambda + f2[j]);
    }
    path.lambda.push_back(lambda);
    path.q1.push_back(q1);
    path.q2.push_back(q2);
    path.residual_p.push_back(0.0);
    path.residual_n.push_back(0.0);
  }
  return path;
}

// Brute-force feasibility scan on a 0.1 mm/s grid, written against the same
// uniform-speed model but with its own differences: the largest mu for which
// every joint velocity and interior acceleration stays inside the limits.
double brute_force_mu(const JointPath& path, const RobotModel& r1,
                      const RobotModel& r2, double grid) {
  const std::size_t n = path.size();
  const double dl = path.lambda[1] - path.lambda[0];
  auto dq_at = [&](const std::vector<Vector6>& q, std::size_t i) {
    if (i == 0) return Vector6((q[1] - q[0]) / dl);
    if (i + 1 == n) return Vector6((q[n - 1] - q[n - 2]) / dl);
    return Vector6((q[i + 1] - q[i - 1]) / (2.0 * dl));
  };
  auto ddq_at = [&](const std::vector<Vector6>& q, std::size_t i) {
    return Vector6((q[i + 1] - 2.0 * q[i] + q[i - 1]) / (dl * dl));
  };
  auto feasible = [&](double mu) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vector6 d1 = dq_at(path.q1, i);
      const Vector6 d2 = dq_at(path.q2, i);
      for (int j = 0; j < 6; ++j) {
        const double v1 = d1[j] * mu;
        const double v2 = d2[j] * mu;
        if (v1 > r1.qd_max[j] || v1 < r1.qd_min[j]) return false;
        if (v2 > r2.qd_max[j] || v2 < r2.qd_min[j]) return false;
      }
      if (i == 0 || i + 1 == n) continue;
      const Vector6 s1 = ddq_at(path.q1, i);
      const Vector6 s2 = ddq_at(path.q2, i);
      const Vector6 l1 = accel_limits(r1, path.q1[i]);
      const Vector6 l2 = accel_limits(r2, path.q2[i]);
      for (int j = 0; j < 6; ++j) {
        if (std::abs(s1[j]) * mu * mu > l1[j]) return false;
        if (std::abs(s2[j]) * mu * mu > l2[j]) return false;
      }
    }
    return true;
  };
  double mu = 0.0;
  while (feasible(mu + grid)) mu += grid;
  return mu;
}

TEST_CASE("constant-slope path has an analytic velocity bound") {
  JointPath path;
  const double slope = 0.01;  // rad/mm, joint 1 of arm 1 only
  for (int i = 0; i < 51; ++i) {
    path.lambda.push_back(1.0 * i);
    Vector6 q1 = Vector6::Zero();
    q1[0] = slope * path.lambda.back();
    path.q1.push_back(q1);
    path.q2.push_back(Vector6::Zero());
    path.residual_p.push_back(0.0);
    path.residual_n.push_back(0.0);
  }
  const SpeedProfile profile =
      max_uniform_speed(path, heavy_model(), compact_model());
  const double expected = heavy_model().qd_max[0] / slope;
  CHECK(profile.mu == doctest::Approx(expected).epsilon(1e-6));
  // No curvature anywhere: the acceleration bound never binds.
  for (double a : profile.acc_bound) CHECK(a == kUnbounded);
}

TEST_CASE("max_uniform_speed agrees with the brute-force scan") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const JointPath path = sinusoid_path(rng, 61, 1.0);
    const SpeedProfile profile =
        max_uniform_speed(path, heavy_model(), compact_model());
    const double bf = brute_force_mu(path, heavy_model(), compact_model(), 0.1);
    CHECK(std::abs(profile.mu - bf) <= 0.1 + 1e-9);
  }
}

TEST_CASE("combined profile is the elementwise minimum") {
  std::mt19937 rng(22);
  const JointPath path = sinusoid_path(rng, 41, 1.0);
  const SpeedProfile profile =
      max_uniform_speed(path, heavy_model(), compact_model());
  REQUIRE(profile.combined.size() == path.size());
  double lowest = kUnbounded;
  for (std::size_t i = 0; i < profile.combined.size(); ++i) {
    CHECK(profile.combined[i] ==
          doctest::Approx(std::min(profile.vel_bound[i], profile.acc_bound[i])));
    lowest = std::min(lowest, profile.combined[i]);
  }
  CHECK(profile.mu == doctest::Approx(lowest));
}

TEST_CASE("path_derivatives rejects bad grids") {
  JointPath path;
  for (int i = 0; i < 2; ++i) {
    path.lambda.push_back(i);
    path.q1.push_back(Vector6::Zero());
    path.q2.push_back(Vector6::Zero());
  }
  CHECK_THROWS(path_derivatives(path));
  // Non-uniform interior interval (the final interval may legally be short,
  // so the jump has to sit before it).
  for (double lambda : {5.0, 6.0}) {
    path.lambda.push_back(lambda);
    path.q1.push_back(Vector6::Zero());
    path.q2.push_back(Vector6::Zero());
  }
  CHECK_THROWS(path_derivatives(path));
}

TEST_CASE("speed profile CSV marks unbounded entries") {
  JointPath path;
  for (int i = 0; i < 5; ++i) {
    path.lambda.push_back(i);
    path.q1.push_back(Vector6::Zero());
    path.q2.push_back(Vector6::Zero());
    path.residual_p.push_back(0.0);
    path.residual_n.push_back(0.0);
  }
  const SpeedProfile profile =
      max_uniform_speed(path, heavy_model(), compact_model());
  const std::string file = "/tmp/dualtrack_test_profile.csv";
  write_speed_profile_csv(file, profile);
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  std::remove(file.c_str());
  CHECK(ss.str().find("unbounded") != std::string::npos);
}

}  // namespace
}  // namespace dualtrack
