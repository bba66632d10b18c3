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
#include <variant>

#include "doctest.h"
#include "dualtrack/config_opt.hpp"
#include "dualtrack/metrics.hpp"
#include "test_util.hpp"

namespace dualtrack {
namespace {

using testing::asset_path;
using testing::compact_model;
using testing::heavy_model;
using testing::place_robot2;

constexpr double kStep = 1.0;  // mm, fixture resample step for these tests

struct Tracked {
  DualConfig cfg;
  RobotModel robot2p;
  Curve curve;
  JointPath path;

  Tracked() {
    cfg = load_dual_config(asset_path("configs/seed_curve1.json"));
    robot2p = place_robot2(compact_model(), cfg);
    curve = resample(load_curve(asset_path("curves/curve1.csv")), kStep);
    // A 300 mm stretch keeps the unit test quick.
    if (curve.size() > 301) curve.samples.resize(301);
    const SolvePathResult result =
        solve_path(cfg, curve, heavy_model(), compact_model());
    REQUIRE(std::holds_alternative<JointPath>(result));
    path = std::get<JointPath>(result);
  }

  // Joint state at arc length lambda, linear interpolation between the IK
  // samples; lambda outside the curve extrapolates linearly (synthetic
  // lead-in and lead-out).
  void joints_at(double lambda, Vector6* q1, Vector6* q2) const {
    const double g = lambda / kStep;
    const std::size_t lo = static_cast<std::size_t>(
        std::clamp(g, 0.0, static_cast<double>(path.size() - 2)));
    const double f = g - lo;  // may leave [0, 1]
    *q1 = (1.0 - f) * path.q1[lo] + f * path.q1[lo + 1];
    *q2 = (1.0 - f) * path.q2[lo] + f * path.q2[lo + 1];
  }

  ExecutionRecord record_for(const std::vector<double>& lambda_of_t,
                             double dt) const {
    ExecutionRecord record;
    for (std::size_t i = 0; i < lambda_of_t.size(); ++i) {
      Vector6 q1, q2;
      joints_at(lambda_of_t[i], &q1, &q2);
      record.t.push_back(dt * i);
      record.q1.push_back(q1);
      record.q2.push_back(q2);
    }
    return record;
  }
};

const Tracked& tracked() {
  static const Tracked t;
  return t;
}

TEST_CASE("exact tracking yields near-zero errors and uniform speed") {
  const Tracked& f = tracked();
  const double mu = 200.0;
  const double dt = 1.0 / 250.0;
  const double lf = f.curve.total_length();
  // Constant speed straight through both ends; the over/undershoot is
  // trimmed by the endpoint gate, so the interior statistics stay clean.
  std::vector<double> lam;
  for (double t = 0.0; -2.0 + t * mu < lf + 2.0; t += dt) {
    lam.push_back(-2.0 + t * mu);
  }
  const ExecutionRecord record = f.record_for(lam, dt);
  const Metrics m =
      compute_metrics(record, f.curve, heavy_model(), f.robot2p, {});
  CHECK(m.max_pos_err <= kStep / 2.0);
  CHECK(m.max_norm_err < 0.5);
  CHECK(m.mu_avg == doctest::Approx(mu).epsilon(0.01));
  CHECK(m.speed_std_ratio < 0.005);
}

TEST_CASE("two-level speed signal reproduces the analytic spread") {
  const Tracked& f = tracked();
  const double mu0 = 200.0;
  const double dt = 1.0 / 250.0;
  const double lf = f.curve.total_length();
  const double T = lf / mu0;
  // Equal time at 0.9 mu and 1.1 mu: mean mu0, std 0.1 mu0.
  std::vector<double> lam;
  for (double t = 0.0;; t += dt) {
    const double l = t <= T / 2.0
                         ? 0.9 * mu0 * t
                         : 0.45 * mu0 * T + 1.1 * mu0 * (t - T / 2.0);
    lam.push_back(l);
    if (l >= lf + 2.0) break;
  }
  const ExecutionRecord record = f.record_for(lam, dt);
  const Metrics m =
      compute_metrics(record, f.curve, heavy_model(), f.robot2p, {});
  CHECK(std::abs(m.speed_std_ratio - 0.1) < 0.01);
  CHECK(m.mu_avg == doctest::Approx(mu0).epsilon(0.02));
}

TEST_CASE("lead-in samples are gated out of the statistics") {
  const Tracked& f = tracked();
  const double mu = 200.0;
  const double dt = 1.0 / 250.0;
  const double lf = f.curve.total_length();
  std::vector<double> lam;
  // 20 mm of straight approach before the curve start, short overrun after.
  for (double t = 0.0; -20.0 + t * mu < lf + 2.0; t += dt) {
    lam.push_back(-20.0 + t * mu);
  }
  const ExecutionRecord record = f.record_for(lam, dt);
  const Metrics m =
      compute_metrics(record, f.curve, heavy_model(), f.robot2p, {});
  CHECK(m.gated.front() == 0);
  CHECK(m.gated.back() == 0);
  // The approach is excluded, so the stats match on-curve tracking.
  CHECK(m.max_pos_err <= kStep / 2.0);
  int gated_in = 0;
  for (int g : m.gated) gated_in += g;
  CHECK(gated_in > 100);
}

TEST_CASE("compute_metrics rejects too-short records") {
  const Tracked& f = tracked();
  ExecutionRecord record;
  record.t = {0.0, 0.004};
  record.q1 = {f.path.q1[0], f.path.q1[0]};
  record.q2 = {f.path.q2[0], f.path.q2[0]};
  CHECK_THROWS(
      compute_metrics(record, f.curve, heavy_model(), f.robot2p, {}));
}

TEST_CASE("within applies all three tolerances") {
  Metrics m;
  m.max_pos_err = 0.4;
  m.max_norm_err = 2.0;
  m.speed_std_ratio = 0.04;
  Tolerances tol;
  CHECK(m.within(tol));
  m.max_pos_err = 0.6;
  CHECK_FALSE(m.within(tol));
  m.max_pos_err = 0.4;
  m.max_norm_err = 3.5;
  CHECK_FALSE(m.within(tol));
  m.max_norm_err = 2.0;
  m.speed_std_ratio = 0.08;
  CHECK_FALSE(m.within(tol));
}

}  // namespace
}  // namespace dualtrack
