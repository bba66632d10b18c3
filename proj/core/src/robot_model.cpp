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

#include "dualtrack/robot_model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "dualtrack/csv.hpp"

namespace dualtrack {

namespace {

using nlohmann::json;

Vector3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("robot model: " + what + " must be a 3-vector");
  }
  return Vector3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Vector6 parse_vec6(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 6) {
    throw std::runtime_error("robot model: " + what + " must have 6 entries");
  }
  Vector6 v;
  for (int i = 0; i < 6; ++i) v[i] = j[i].get<double>();
  return v;
}

Pose parse_pose(const json& j, const std::string& what) {
  Pose pose;
  if (j.contains("R")) {
    const auto& r = j.at("R");
    if (!r.is_array() || r.size() != 3) {
      throw std::runtime_error("robot model: " + what + ".R must be 3x3");
    }
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) pose.R(i, k) = r[i][k].get<double>();
    }
  }
  if (j.contains("p")) pose.p = parse_vec3(j.at("p"), what + ".p");
  if (!is_rotation(pose.R)) {
    throw std::runtime_error("robot model: " + what + ".R is not a rotation");
  }
  return pose;
}

void check_dim(const RobotModel& model, const Vector6& q) {
  if (q.size() != model.joint_count) {
    throw std::invalid_argument("joint vector size mismatch for " + model.name);
  }
}

}  // namespace

const AccelTable::Node& AccelTable::nearest(double q2, double q3) const {
  if (nodes.empty()) throw std::runtime_error("acceleration table is empty");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double dq2 = nodes[i].q2 - q2;
    const double dq3 = nodes[i].q3 - q3;
    const double d = dq2 * dq2 + dq3 * dq3;
    if (d < best_d - 1e-15) {  // strict improvement keeps lower-index ties
      best_d = d;
      best = i;
    }
  }
  return nodes[best];
}

bool RobotModel::within_limits(const Vector6& q, double tol) const {
  for (int i = 0; i < 6; ++i) {
    if (q[i] < q_min[i] - tol || q[i] > q_max[i] + tol) return false;
  }
  return true;
}

Vector6 RobotModel::clamp_to_limits(const Vector6& q) const {
  return q.cwiseMax(q_min).cwiseMin(q_max);
}

RobotModel load_robot_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open robot model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("robot model " + path + ": " + e.what());
  }

  RobotModel model;
  model.name = j.value("name", "unnamed");
  model.joint_count = j.value("joint_count", 6);
  if (model.joint_count != 6) {
    throw std::runtime_error("robot model " + path + ": joint_count must be 6");
  }

  const auto& axes = j.at("joint_axes");
  const auto& origins = j.at("joint_origins");
  if (axes.size() != 6 || origins.size() != 6) {
    throw std::runtime_error("robot model " + path +
                             ": need 6 joint_axes and 6 joint_origins");
  }
  for (int i = 0; i < 6; ++i) {
    Vector3 a = parse_vec3(axes[i], "joint_axes");
    if (std::abs(a.norm() - 1.0) > 1e-12) {
      throw std::runtime_error("robot model " + path +
                               ": joint axis is not unit norm");
    }
    model.joint_axes.push_back(a);
    model.joint_origins.push_back(parse_vec3(origins[i], "joint_origins"));
  }

  if (j.contains("tool_transform")) {
    model.tool_transform = parse_pose(j.at("tool_transform"), "tool_transform");
  }
  if (j.contains("base_transform")) {
    model.base_transform = parse_pose(j.at("base_transform"), "base_transform");
  }

  model.q_min = parse_vec6(j.at("q_min"), "q_min");
  model.q_max = parse_vec6(j.at("q_max"), "q_max");
  model.qd_min = parse_vec6(j.at("qd_min"), "qd_min");
  model.qd_max = parse_vec6(j.at("qd_max"), "qd_max");
  for (int i = 0; i < 6; ++i) {
    if (!(model.q_min[i] < model.q_max[i])) {
      throw std::runtime_error("robot model " + path + ": q_min >= q_max");
    }
    if (!(model.qd_min[i] < 0.0 && model.qd_max[i] > 0.0)) {
      throw std::runtime_error("robot model " + path +
                               ": qd limits must straddle zero");
    }
  }

  const std::string table_rel = j.at("accel_table").get<std::string>();
  const auto table_path =
      std::filesystem::path(path).parent_path() / table_rel;
  for (const auto& row : read_numeric_csv(table_path.string())) {
    if (row.size() != 8) {
      throw std::runtime_error("accel table " + table_path.string() +
                               ": rows must be q2,q3,a1..a6");
    }
    AccelTable::Node node;
    node.q2 = row[0];
    node.q3 = row[1];
    for (int i = 0; i < 6; ++i) {
      node.accel[i] = row[2 + i];
      if (!(node.accel[i] > 0.0)) {
        throw std::runtime_error("accel table " + table_path.string() +
                                 ": values must be strictly positive");
      }
    }
    model.accel_table.nodes.push_back(node);
  }
  if (model.accel_table.empty()) {
    throw std::runtime_error("accel table " + table_path.string() +
                             ": no rows");
  }
  return model;
}

Pose forward_kinematics(const RobotModel& model, const Vector6& q) {
  check_dim(model, q);
  Pose T = model.base_transform;
  for (int i = 0; i < 6; ++i) {
    T = T * Pose(axis_angle_rotation(model.joint_axes[i], q[i]),
                 model.joint_origins[i]);
  }
  return T * model.tool_transform;
}

Matrix6 jacobian(const RobotModel& model, const Vector6& q) {
  check_dim(model, q);
  Matrix6 J;
  // World-frame joint axes and origins accumulated along the chain.
  Pose T = model.base_transform;
  std::array<Vector3, 6> axes_w;
  std::array<Vector3, 6> origins_w;
  for (int i = 0; i < 6; ++i) {
    T = T * Pose(Matrix3::Identity(), model.joint_origins[i]);
    origins_w[i] = T.p;
    axes_w[i] = T.R * model.joint_axes[i];
    T = T * Pose(axis_angle_rotation(model.joint_axes[i], q[i]), Vector3::Zero());
  }
  const Vector3 p_tcp = (T * model.tool_transform).p;
  for (int i = 0; i < 6; ++i) {
    J.block<3, 1>(0, i) = axes_w[i];
    J.block<3, 1>(3, i) = axes_w[i].cross(p_tcp - origins_w[i]);
  }
  return J;
}

Vector6 accel_limits(const RobotModel& model, const Vector6& q) {
  check_dim(model, q);
  return model.accel_table.nearest(q[1], q[2]).accel;
}

std::optional<Vector6> single_arm_ik(const RobotModel& model,
                                     const Pose& target, const Vector6& seed,
                                     double tol_p, double tol_r,
                                     int max_iters) {
  Vector6 q = seed;
  constexpr double kDamping = 0.01;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Pose pose = forward_kinematics(model, q);
    const Vector3 ep = target.p - pose.p;
    const Vector3 er = rotation_log(target.R * pose.R.transpose());
    if (ep.norm() <= tol_p && er.norm() <= tol_r) return q;
    Vector6 nu;
    nu << er, ep;
    const Matrix6 J = jacobian(model, q);
    const Matrix6 H = J.transpose() * J + kDamping * Matrix6::Identity();
    q += H.ldlt().solve(J.transpose() * nu);
    q = model.clamp_to_limits(q);
  }
  return std::nullopt;
}

}  // namespace dualtrack
