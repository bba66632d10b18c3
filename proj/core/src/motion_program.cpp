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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dualtrack {

char primitive_kind_letter(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kMoveL: return 'L';
    case PrimitiveKind::kMoveC: return 'C';
    case PrimitiveKind::kMoveJ: return 'J';
  }
  return '?';
}

namespace {

struct ArcGeometry {
  Vector3 center = Vector3::Zero();
  Vector3 axis = Vector3::UnitZ();
  double radius = 0.0;
  double sweep = 0.0;  // rad, start -> end through the circlepoint
  bool valid = false;
};

// Circle through three points; sweep measured from start through via to end.
ArcGeometry arc_through(const Vector3& start, const Vector3& via,
                        const Vector3& end) {
  ArcGeometry arc;
  const Vector3 u = via - start;
  const Vector3 v = end - start;
  const Vector3 w = u.cross(v);
  const double w2 = w.squaredNorm();
  if (w2 < 1e-18) return arc;  // collinear
  // Circumcenter of the triangle (start, via, end).
  const Vector3 offset =
      (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) /
      (2.0 * w2);
  arc.center = start + offset;
  arc.radius = offset.norm();
  arc.axis = w.normalized();
  auto angle_of = [&](const Vector3& x) {
    const Vector3 r0 = start - arc.center;
    const Vector3 rx = x - arc.center;
    double ang = std::atan2(arc.axis.dot(r0.cross(rx)), r0.dot(rx));
    if (ang < 0.0) ang += 2.0 * M_PI;
    return ang;
  };
  const double ang_via = angle_of(via);
  double ang_end = angle_of(end);
  if (ang_end < 1e-12) ang_end = 2.0 * M_PI;
  if (ang_via > ang_end) {
    // The short way from start to end does not pass the circlepoint; go the
    // other way around.
    arc.axis = -arc.axis;
    ang_end = 2.0 * M_PI - ang_end;
  }
  arc.sweep = ang_end;
  arc.valid = true;
  return arc;
}

Vector3 arc_point(const ArcGeometry& arc, const Vector3& start, double u) {
  const Vector3 r0 = start - arc.center;
  return arc.center + axis_angle_rotation(arc.axis, u * arc.sweep) * r0;
}

double point_segment_distance(const Vector3& p, const Vector3& a,
                              const Vector3& b) {
  const Vector3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

Pose primitive_pose(const RobotModel& model, const Primitive& prim,
                    const Pose& start_pose, const Vector6& start_joints,
                    double u) {
  switch (prim.kind) {
    case PrimitiveKind::kMoveL: {
      Pose out;
      out.p = (1.0 - u) * start_pose.p + u * prim.target.p;
      out.R = slerp_rotation(start_pose.R, prim.target.R, u);
      return out;
    }
    case PrimitiveKind::kMoveC: {
      const ArcGeometry arc =
          arc_through(start_pose.p, prim.via, prim.target.p);
      Pose out;
      out.p = arc.valid
                  ? arc_point(arc, start_pose.p, u)
                  : (1.0 - u) * start_pose.p + u * prim.target.p;
      out.R = slerp_rotation(start_pose.R, prim.target.R, u);
      return out;
    }
    case PrimitiveKind::kMoveJ:
      return forward_kinematics(model,
                                primitive_joints(prim, start_joints, u));
  }
  return start_pose;
}

Vector6 primitive_joints(const Primitive& prim, const Vector6& start_joints,
                         double u) {
  return (1.0 - u) * start_joints + u * prim.joint_target;
}

double primitive_length(const RobotModel& model, const Primitive& prim,
                        const Pose& start_pose, const Vector6& start_joints,
                        int samples) {
  double len = 0.0;
  Vector3 prev =
      primitive_pose(model, prim, start_pose, start_joints, 0.0).p;
  for (int i = 1; i <= samples; ++i) {
    const double u = static_cast<double>(i) / samples;
    const Vector3 p = primitive_pose(model, prim, start_pose, start_joints, u).p;
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

CartesianFit fit_segment_L(std::span<const Pose> poses) {
  if (poses.size() < 2) {
    throw std::invalid_argument("fit_segment_L: need at least 2 poses");
  }
  const Vector3 p0 = poses.front().p;
  // Chord-fraction parameterization of the samples.
  std::vector<double> t(poses.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    total += (poses[i].p - poses[i - 1].p).norm();
    t[i] = total;
  }
  CartesianFit fit;
  fit.prim.kind = PrimitiveKind::kMoveL;
  if (total < 1e-12) {
    fit.prim.target = poses.back();
    fit.prim.target.p = p0;
    return fit;
  }
  for (auto& ti : t) ti /= total;
  double den = 0.0;
  Vector3 num = Vector3::Zero();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    num += t[i] * (poses[i].p - p0);
    den += t[i] * t[i];
  }
  const Vector3 end = p0 + num / den;
  fit.prim.target.p = end;
  fit.prim.target.R = poses.back().R;
  for (const auto& pose : poses) {
    fit.deviation =
        std::max(fit.deviation, point_segment_distance(pose.p, p0, end));
  }
  return fit;
}

CartesianFit fit_segment_C(std::span<const Pose> poses) {
  if (poses.size() < 3) {
    throw std::invalid_argument("fit_segment_C: need at least 3 poses");
  }
  const std::size_t n = poses.size();
  Vector3 centroid = Vector3::Zero();
  for (const auto& pose : poses) centroid += pose.p;
  centroid /= static_cast<double>(n);
  Matrix3 cov = Matrix3::Zero();
  for (const auto& pose : poses) {
    const Vector3 d = pose.p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(cov);
  const Vector3 normal = eig.eigenvectors().col(0);  // smallest spread

  CartesianFit fit;
  fit.prim.kind = PrimitiveKind::kMoveC;
  // Collinear input has no in-plane spread direction: fall back to a line.
  const double lateral_rms =
      std::sqrt(std::max(0.0, eig.eigenvalues()[1]) / n);
  if (lateral_rms < 1e-9) {
    CartesianFit line = fit_segment_L(poses);
    line.prim.kind = PrimitiveKind::kMoveC;
    line.prim.via = 0.5 * (poses.front().p + line.prim.target.p);
    line.degenerate = true;
    return line;
  }

  // In-plane frame anchored at the start point.
  const Vector3 p0 = poses.front().p;
  const Vector3 ex = (eig.eigenvectors().col(2)).normalized();
  const Vector3 ey = normal.cross(ex).normalized();
  auto project2 = [&](const Vector3& p) {
    const Vector3 d = p - p0;
    return Eigen::Vector2d(d.dot(ex), d.dot(ey));
  };
  // Circle through the origin (anchored start):
  // ||x - c||^2 = ||c||^2  =>  2 x.c = x.x, linear in c.
  Eigen::MatrixXd A(n - 1, 2);
  Eigen::VectorXd b(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const Eigen::Vector2d x = project2(poses[i].p);
    A.row(i - 1) = 2.0 * x.transpose();
    b[i - 1] = x.squaredNorm();
  }
  const Eigen::Vector2d c2 =
      (A.transpose() * A).ldlt().solve(A.transpose() * b);
  const double radius = c2.norm();
  if (radius > 1e7 || !std::isfinite(radius)) {
    CartesianFit line = fit_segment_L(poses);
    line.prim.kind = PrimitiveKind::kMoveC;
    line.prim.via = 0.5 * (poses.front().p + line.prim.target.p);
    line.degenerate = true;
    return line;
  }
  const Vector3 center = p0 + c2.x() * ex + c2.y() * ey;

  // End point: last sample projected radially onto the fitted circle.
  // Explicit return type: an Eigen expression here would dangle.
  auto to_circle = [&](const Vector3& p) -> Vector3 {
    const Vector3 d = p - center;
    const Vector3 in_plane = d - normal.dot(d) * normal;
    return center + radius * in_plane.normalized();
  };
  const Vector3 end = to_circle(poses.back().p);
  const Vector3 mid_data = to_circle(poses[n / 2].p);

  fit.prim.target.p = end;
  fit.prim.target.R = poses.back().R;
  fit.prim.via = mid_data;

  // Replace the circlepoint by the true arc midpoint for a symmetric
  // parameterization.
  const ArcGeometry arc = arc_through(p0, mid_data, end);
  if (arc.valid) fit.prim.via = arc_point(arc, p0, 0.5);

  for (const auto& pose : poses) {
    const Vector3 d = pose.p - center;
    const double off_plane = normal.dot(d);
    const Vector3 in_plane = d - off_plane * normal;
    const double radial = in_plane.norm() - radius;
    fit.deviation = std::max(
        fit.deviation, std::sqrt(off_plane * off_plane + radial * radial));
  }
  return fit;
}

JointFit fit_segment_J(std::span<const Vector6> joints) {
  if (joints.size() < 2) {
    throw std::invalid_argument("fit_segment_J: need at least 2 samples");
  }
  const std::size_t n = joints.size();
  const Vector6 q0 = joints.front();
  JointFit fit;
  fit.prim.kind = PrimitiveKind::kMoveJ;
  // Anchored least squares per channel over normalized index.
  double den = 0.0;
  Vector6 num = Vector6::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    num += t * (joints[i] - q0);
    den += t * t;
  }
  const Vector6 end = q0 + num / den;
  fit.prim.joint_target = end;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const Vector6 lerp = (1.0 - t) * q0 + t * end;
    fit.deviation =
        std::max(fit.deviation, (joints[i] - lerp).cwiseAbs().maxCoeff());
  }
  return fit;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_primitive(std::string& out, const Primitive& prim) {
  out += primitive_kind_letter(prim.kind);
  out += ' ';
  if (prim.kind == PrimitiveKind::kMoveJ) {
    for (int i = 0; i < 6; ++i) {
      append_number(out, prim.joint_target[i]);
      out += ' ';
    }
  } else {
    // Row-major rotation entries at full precision keep the round trip
    // bit-exact; a quaternion re-derivation would drift by an ulp.
    for (int i = 0; i < 3; ++i) {
      append_number(out, prim.target.p[i]);
      out += ' ';
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        append_number(out, prim.target.R(r, c));
        out += ' ';
      }
    }
    if (prim.kind == PrimitiveKind::kMoveC) {
      for (int i = 0; i < 3; ++i) {
        append_number(out, prim.via[i]);
        out += ' ';
      }
    }
  }
  append_number(out, prim.speed);
  out += ' ';
  append_number(out, prim.blend_radius);
}

Primitive parse_primitive(std::istringstream& in, const std::string& line) {
  Primitive prim;
  std::string kind;
  if (!(in >> kind) || kind.size() != 1) {
    throw std::runtime_error("motion program: bad primitive in line: " + line);
  }
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  switch (kind[0]) {
    case 'L': prim.kind = PrimitiveKind::kMoveL; break;
    case 'C': prim.kind = PrimitiveKind::kMoveC; break;
    case 'J': prim.kind = PrimitiveKind::kMoveJ; break;
    default:
      throw std::runtime_error("motion program: unknown primitive kind '" +
                               kind + "'");
  }
  const std::size_t expect = (prim.kind == PrimitiveKind::kMoveJ)   ? 8
                             : (prim.kind == PrimitiveKind::kMoveC) ? 17
                                                                    : 14;
  if (vals.size() != expect) {
    throw std::runtime_error("motion program: wrong field count in line: " +
                             line);
  }
  std::size_t i = 0;
  if (prim.kind == PrimitiveKind::kMoveJ) {
    for (int k = 0; k < 6; ++k) prim.joint_target[k] = vals[i++];
  } else {
    prim.target.p = Vector3(vals[0], vals[1], vals[2]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        prim.target.R(r, c) = vals[3 + 3 * r + c];
      }
    }
    i = 12;
    if (prim.kind == PrimitiveKind::kMoveC) {
      prim.via = Vector3(vals[12], vals[13], vals[14]);
      i = 15;
    }
  }
  prim.speed = vals[i++];
  prim.blend_radius = vals[i++];
  return prim;
}

}  // namespace

std::string serialize_motion_program(const MotionProgram& program) {
  std::string out = "# dualtrack motion program v1\n";
  out += "start";
  for (int i = 0; i < 6; ++i) {
    out += ' ';
    append_number(out, program.start_q1[i]);
  }
  for (int i = 0; i < 6; ++i) {
    out += ' ';
    append_number(out, program.start_q2[i]);
  }
  out += '\n';
  for (std::size_t k = 0; k < program.size(); ++k) {
    out += std::to_string(k + 1);
    out += " | robot1: ";
    append_primitive(out, program.robot1[k]);
    out += " | robot2: ";
    append_primitive(out, program.robot2[k]);
    out += '\n';
  }
  return out;
}

MotionProgram parse_motion_program(const std::string& text) {
  MotionProgram program;
  std::istringstream in(text);
  std::string line;
  bool have_start = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("start", 0) == 0) {
      std::istringstream ss(line.substr(5));
      for (int i = 0; i < 6; ++i) {
        if (!(ss >> program.start_q1[i])) {
          throw std::runtime_error("motion program: bad start line");
        }
      }
      for (int i = 0; i < 6; ++i) {
        if (!(ss >> program.start_q2[i])) {
          throw std::runtime_error("motion program: bad start line");
        }
      }
      have_start = true;
      continue;
    }
    const auto bar1 = line.find('|');
    const auto bar2 = line.find('|', bar1 + 1);
    if (bar1 == std::string::npos || bar2 == std::string::npos) {
      throw std::runtime_error("motion program: malformed line: " + line);
    }
    auto strip_tag = [&line](std::size_t from, std::size_t to,
                             const char* tag) {
      std::string part = line.substr(from, to - from);
      const auto pos = part.find(tag);
      if (pos == std::string::npos) {
        throw std::runtime_error("motion program: missing robot tag: " + part);
      }
      return part.substr(pos + std::strlen(tag));
    };
    std::istringstream s1(strip_tag(bar1 + 1, bar2, "robot1:"));
    std::istringstream s2(strip_tag(bar2 + 1, line.size(), "robot2:"));
    program.robot1.push_back(parse_primitive(s1, line));
    program.robot2.push_back(parse_primitive(s2, line));
  }
  if (!have_start) {
    throw std::runtime_error("motion program: missing start line");
  }
  if (program.robot1.size() != program.robot2.size()) {
    throw std::runtime_error("motion program: unsynchronized segment counts");
  }
  return program;
}

void save_motion_program(const std::string& path,
                         const MotionProgram& program) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_motion_program(program);
}

MotionProgram load_motion_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open motion program: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_motion_program(ss.str());
}

}  // namespace dualtrack
