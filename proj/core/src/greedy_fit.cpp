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

#include "dualtrack/motion_program.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace dualtrack {

namespace {

double point_segment_distance(const Vector3& p, const Vector3& a,
                              const Vector3& b) {
  const Vector3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double distance_to_curve(const Curve& curve, const Vector3& p,
                         std::size_t window_begin, std::size_t window_end) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = window_begin; j + 1 <= window_end; ++j) {
    best = std::min(best,
                    point_segment_distance(p, curve.samples[j].p,
                                           curve.samples[j + 1].p));
  }
  return best;
}

struct ArmState {
  Pose pose;
  Vector6 joints = Vector6::Zero();
};

// Candidate fit of one robot's samples over a span, anchored at the arm's
// current state so consecutive primitives chain exactly.
std::optional<Primitive> fit_candidate(PrimitiveKind kind,
                                       const ArmState& state,
                                       std::span<const Pose> poses,
                                       std::span<const Vector6> joints) {
  std::vector<Pose> anchored_poses(poses.begin(), poses.end());
  anchored_poses.front() = state.pose;
  switch (kind) {
    case PrimitiveKind::kMoveL:
      return fit_segment_L(anchored_poses).prim;
    case PrimitiveKind::kMoveC: {
      if (anchored_poses.size() < 3) return std::nullopt;
      CartesianFit fit = fit_segment_C(anchored_poses);
      if (fit.degenerate) return std::nullopt;
      return fit.prim;
    }
    case PrimitiveKind::kMoveJ: {
      std::vector<Vector6> anchored_joints(joints.begin(), joints.end());
      anchored_joints.front() = state.joints;
      return fit_segment_J(anchored_joints).prim;
    }
  }
  return std::nullopt;
}

// Max distance between the relative trajectory induced by one primitive pair
// and the curve, densely sampled over the shared parameter.
double pair_relative_deviation(const RobotModel& robot1,
                               const RobotModel& robot2_placed,
                               const Primitive& prim1, const Primitive& prim2,
                               const ArmState& state1, const ArmState& state2,
                               const Curve& curve, std::size_t span_begin,
                               std::size_t span_end, int samples) {
  const std::size_t w0 = (span_begin >= 5) ? span_begin - 5 : 0;
  const std::size_t w1 = std::min(curve.size() - 1, span_end + 5);
  double worst = 0.0;
  for (int s = 0; s <= samples; ++s) {
    const double u = static_cast<double>(s) / samples;
    const Pose p1 = primitive_pose(robot1, prim1, state1.pose, state1.joints, u);
    const Pose p2 =
        primitive_pose(robot2_placed, prim2, state2.pose, state2.joints, u);
    const Vector3 rel = p2.R.transpose() * (p1.p - p2.p);
    worst = std::max(worst, distance_to_curve(curve, rel, w0, w1));
  }
  return worst;
}

struct PairChoice {
  Primitive prim1;
  Primitive prim2;
  double deviation = 0.0;
};

// Kind pairs in preference order: straighter primitives first.
constexpr PrimitiveKind kPairOrder[9][2] = {
    {PrimitiveKind::kMoveL, PrimitiveKind::kMoveL},
    {PrimitiveKind::kMoveL, PrimitiveKind::kMoveC},
    {PrimitiveKind::kMoveC, PrimitiveKind::kMoveL},
    {PrimitiveKind::kMoveC, PrimitiveKind::kMoveC},
    {PrimitiveKind::kMoveL, PrimitiveKind::kMoveJ},
    {PrimitiveKind::kMoveJ, PrimitiveKind::kMoveL},
    {PrimitiveKind::kMoveC, PrimitiveKind::kMoveJ},
    {PrimitiveKind::kMoveJ, PrimitiveKind::kMoveC},
    {PrimitiveKind::kMoveJ, PrimitiveKind::kMoveJ},
};

std::optional<PairChoice> try_span(
    const RobotModel& robot1, const RobotModel& robot2_placed,
    const Curve& curve, const std::vector<Pose>& pose1,
    const std::vector<Pose>& pose2, const std::vector<Vector6>& q1,
    const std::vector<Vector6>& q2, const ArmState& state1,
    const ArmState& state2, std::size_t begin, std::size_t end, double tol,
    int dense_per_index) {
  const std::size_t count = end - begin + 1;
  const int samples =
      std::max<int>(8, static_cast<int>(count) * dense_per_index);
  auto span_of = [&](const std::vector<Pose>& v) {
    return std::span<const Pose>(v.data() + begin, count);
  };
  auto jspan_of = [&](const std::vector<Vector6>& v) {
    return std::span<const Vector6>(v.data() + begin, count);
  };
  for (const auto& pair : kPairOrder) {
    const auto c1 =
        fit_candidate(pair[0], state1, span_of(pose1), jspan_of(q1));
    const auto c2 =
        fit_candidate(pair[1], state2, span_of(pose2), jspan_of(q2));
    if (!c1 || !c2) continue;
    const double dev =
        pair_relative_deviation(robot1, robot2_placed, *c1, *c2, state1,
                                state2, curve, begin, end, samples);
    if (dev <= tol) return PairChoice{*c1, *c2, dev};
  }
  return std::nullopt;
}

void advance_state(const RobotModel& model, const Primitive& prim,
                   ArmState& state, const Vector6& path_end_joints) {
  if (prim.kind == PrimitiveKind::kMoveJ) {
    state.joints = prim.joint_target;
    state.pose = forward_kinematics(model, state.joints);
  } else {
    state.pose = prim.target;
    // Joint state after a Cartesian segment is tracked approximately by the
    // path sample; only used as the anchor of a following joint fit.
    state.joints = path_end_joints;
  }
}

Primitive make_lead(const RobotModel& model, const Vector6& q_from,
                    const Vector6& q_to, double duration, double blend) {
  Primitive prim;
  prim.kind = PrimitiveKind::kMoveJ;
  prim.joint_target = model.clamp_to_limits(q_to);
  const Pose a = forward_kinematics(model, q_from);
  const Pose b = forward_kinematics(model, prim.joint_target);
  prim.speed = std::max((b.p - a.p).norm() / duration, 1e-6);
  prim.blend_radius = blend;
  return prim;
}

}  // namespace

MotionProgram greedy_fit_dual(const JointPath& path, const RobotModel& robot1,
                              const RobotModel& robot2_placed,
                              const Curve& curve,
                              const GreedyFitOptions& options,
                              GreedyFitReport* report) {
  const std::size_t n = path.size();
  if (n < 2 || curve.size() != n) {
    throw std::invalid_argument(
        "greedy_fit_dual: path and curve must share a sample grid");
  }
  std::vector<Pose> pose1(n), pose2(n);
  for (std::size_t i = 0; i < n; ++i) {
    pose1[i] = forward_kinematics(robot1, path.q1[i]);
    pose2[i] = forward_kinematics(robot2_placed, path.q2[i]);
  }

  MotionProgram program;
  GreedyFitReport local_report;

  ArmState state1{pose1[0], path.q1[0]};
  ArmState state2{pose2[0], path.q2[0]};

  struct Interior {
    Primitive prim1, prim2;
    double dlambda = 0.0;
    std::size_t end = 0;
    double deviation = 0.0;
  };
  std::vector<Interior> interior;

  std::size_t begin = 0;
  while (begin + 1 < n) {
    std::size_t lo = begin + 1;
    auto lo_choice =
        try_span(robot1, robot2_placed, curve, pose1, pose2, path.q1, path.q2,
                 state1, state2, begin, lo, options.tol,
                 options.dense_samples_per_index);
    if (!lo_choice) {
      throw std::runtime_error(
          "greedy_fit_dual: single-step span exceeds fitting tolerance at "
          "lambda " +
          std::to_string(path.lambda[begin]));
    }
    std::size_t hi = n - 1;
    if (hi > lo) {
      auto hi_choice =
          try_span(robot1, robot2_placed, curve, pose1, pose2, path.q1,
                   path.q2, state1, state2, begin, hi, options.tol,
                   options.dense_samples_per_index);
      if (hi_choice) {
        lo = hi;
        lo_choice = hi_choice;
      } else {
        // lo feasible, hi infeasible: bisection on the furthest end index.
        while (hi - lo > 1) {
          const std::size_t mid = lo + (hi - lo) / 2;
          auto mid_choice =
              try_span(robot1, robot2_placed, curve, pose1, pose2, path.q1,
                       path.q2, state1, state2, begin, mid, options.tol,
                       options.dense_samples_per_index);
          if (mid_choice) {
            lo = mid;
            lo_choice = mid_choice;
          } else {
            hi = mid;
          }
        }
      }
    }
    Interior seg;
    seg.prim1 = lo_choice->prim1;
    seg.prim2 = lo_choice->prim2;
    seg.end = lo;
    seg.deviation = lo_choice->deviation;
    seg.dlambda = path.lambda[lo] - path.lambda[begin];
    interior.push_back(seg);
    advance_state(robot1, seg.prim1, state1, path.q1[lo]);
    advance_state(robot2_placed, seg.prim2, state2, path.q2[lo]);
    begin = lo;
  }

  // Speeds: both controllers must spend dlambda / mu on the segment.
  std::vector<double> lens1, lens2;
  {
    ArmState s1{pose1[0], path.q1[0]};
    ArmState s2{pose2[0], path.q2[0]};
    for (auto& seg : interior) {
      const double duration = seg.dlambda / options.mu;
      const double len1 = primitive_length(robot1, seg.prim1, s1.pose,
                                           s1.joints);
      const double len2 = primitive_length(robot2_placed, seg.prim2, s2.pose,
                                           s2.joints);
      seg.prim1.speed = std::max(len1 / duration, 1e-6);
      seg.prim2.speed = std::max(len2 / duration, 1e-6);
      seg.prim1.blend_radius = options.default_blend;
      seg.prim2.blend_radius = options.default_blend;
      lens1.push_back(len1);
      lens2.push_back(len2);
      advance_state(robot1, seg.prim1, s1, path.q1[seg.end]);
      advance_state(robot2_placed, seg.prim2, s2, path.q2[seg.end]);
    }
  }

  // Lead-in: joint extrapolation backwards over `extension` mm of lambda.
  const double dl0 = path.lambda[1] - path.lambda[0];
  const double dl1 = path.lambda[n - 1] - path.lambda[n - 2];
  const double lead_duration = options.extension / options.mu;
  const Vector6 pre1 =
      path.q1[0] - (options.extension / dl0) * (path.q1[1] - path.q1[0]);
  const Vector6 pre2 =
      path.q2[0] - (options.extension / dl0) * (path.q2[1] - path.q2[0]);
  program.start_q1 = robot1.clamp_to_limits(pre1);
  program.start_q2 = robot2_placed.clamp_to_limits(pre2);

  Primitive lead_in1;
  lead_in1.kind = PrimitiveKind::kMoveJ;
  lead_in1.joint_target = path.q1[0];
  Primitive lead_in2 = lead_in1;
  lead_in2.joint_target = path.q2[0];
  {
    const Pose a1 = forward_kinematics(robot1, program.start_q1);
    const Pose a2 = forward_kinematics(robot2_placed, program.start_q2);
    lead_in1.speed =
        std::max((pose1[0].p - a1.p).norm() / lead_duration, 1e-6);
    lead_in2.speed =
        std::max((pose2[0].p - a2.p).norm() / lead_duration, 1e-6);
    lead_in1.blend_radius = options.default_blend;
    lead_in2.blend_radius = options.default_blend;
  }
  program.robot1.push_back(lead_in1);
  program.robot2.push_back(lead_in2);

  for (const auto& seg : interior) {
    program.robot1.push_back(seg.prim1);
    program.robot2.push_back(seg.prim2);
    local_report.kinds1.push_back(primitive_kind_letter(seg.prim1.kind));
    local_report.kinds2.push_back(primitive_kind_letter(seg.prim2.kind));
    local_report.deviations.push_back(seg.deviation);
    local_report.end_index.push_back(seg.end);
  }
  local_report.interior_segments = interior.size();

  // Lead-out: forward extrapolation, terminal blend zero (full stop).
  const Vector6 post1 =
      path.q1[n - 1] +
      (options.extension / dl1) * (path.q1[n - 1] - path.q1[n - 2]);
  const Vector6 post2 =
      path.q2[n - 1] +
      (options.extension / dl1) * (path.q2[n - 1] - path.q2[n - 2]);
  program.robot1.push_back(
      make_lead(robot1, path.q1[n - 1], post1, lead_duration, 0.0));
  program.robot2.push_back(
      make_lead(robot2_placed, path.q2[n - 1], post2, lead_duration, 0.0));

  // Keep blend zones clear of the controller's corner-path limit: a blend
  // radius must stay below half of either adjacent segment length.
  {
    auto seg_lengths = [&](const std::vector<Primitive>& prims,
                           const RobotModel& model, const Vector6& start_q,
                           const Vector6& path_end_q,
                           const std::vector<double>& interior_lens) {
      std::vector<double> lens(prims.size(), 0.0);
      lens.front() = primitive_length(
          model, prims.front(), forward_kinematics(model, start_q), start_q);
      for (std::size_t k = 0; k < interior_lens.size(); ++k) {
        lens[k + 1] = interior_lens[k];
      }
      lens.back() =
          primitive_length(model, prims.back(),
                           forward_kinematics(model, path_end_q), path_end_q);
      return lens;
    };
    auto clamp_blends = [](std::vector<Primitive>& prims,
                           const std::vector<double>& lens) {
      for (std::size_t k = 0; k + 1 < prims.size(); ++k) {
        if (lens[k] < 1e-6 || lens[k + 1] < 1e-6) continue;
        prims[k].blend_radius = std::min(
            prims[k].blend_radius, 0.4 * std::min(lens[k], lens[k + 1]));
      }
    };
    clamp_blends(program.robot1,
                 seg_lengths(program.robot1, robot1, program.start_q1,
                             path.q1[n - 1], lens1));
    clamp_blends(program.robot2,
                 seg_lengths(program.robot2, robot2_placed, program.start_q2,
                             path.q2[n - 1], lens2));
  }

  if (report) *report = local_report;
  return program;
}

double program_relative_deviation(const MotionProgram& program,
                                  const RobotModel& robot1,
                                  const RobotModel& robot2_placed,
                                  const Curve& curve, bool skip_lead,
                                  int samples_per_segment) {
  if (program.size() == 0) return 0.0;
  ArmState state1{forward_kinematics(robot1, program.start_q1),
                  program.start_q1};
  ArmState state2{forward_kinematics(robot2_placed, program.start_q2),
                  program.start_q2};
  double worst = 0.0;
  for (std::size_t k = 0; k < program.size(); ++k) {
    const Primitive& prim1 = program.robot1[k];
    const Primitive& prim2 = program.robot2[k];
    const bool lead = skip_lead && (k == 0 || k + 1 == program.size());
    if (!lead) {
      for (int s = 0; s <= samples_per_segment; ++s) {
        const double u = static_cast<double>(s) / samples_per_segment;
        const Pose p1 =
            primitive_pose(robot1, prim1, state1.pose, state1.joints, u);
        const Pose p2 = primitive_pose(robot2_placed, prim2, state2.pose,
                                       state2.joints, u);
        const Vector3 rel = p2.R.transpose() * (p1.p - p2.p);
        worst = std::max(worst,
                         distance_to_curve(curve, rel, 0, curve.size() - 1));
      }
    }
    auto settle = [](const RobotModel& model, const Primitive& prim,
                     ArmState& state) {
      if (prim.kind == PrimitiveKind::kMoveJ) {
        state.joints = prim.joint_target;
        state.pose = forward_kinematics(model, state.joints);
      } else {
        state.pose = prim.target;
        if (auto q = single_arm_ik(model, prim.target, state.joints)) {
          state.joints = *q;
        }
      }
    };
    settle(robot1, prim1, state1);
    settle(robot2_placed, prim2, state2);
  }
  return worst;
}

}  // namespace dualtrack
