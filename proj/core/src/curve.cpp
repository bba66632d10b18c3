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

#include "dualtrack/curve.hpp"

#include <cmath>
#include <stdexcept>

#include "dualtrack/csv.hpp"

namespace dualtrack {

Curve make_curve(const std::vector<Vector3>& points,
                 const std::vector<Vector3>& normals) {
  if (points.size() != normals.size()) {
    throw std::invalid_argument("curve: points/normals size mismatch");
  }
  if (points.size() < 2) {
    throw std::invalid_argument("curve: need at least 2 samples");
  }
  Curve curve;
  double lambda = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (normals[i].norm() < 1e-12) {
      throw std::runtime_error("curve: degenerate normal at row " +
                               std::to_string(i));
    }
    if (i > 0) {
      const double chord = (points[i] - points[i - 1]).norm();
      if (chord < 1e-12) {
        throw std::runtime_error("curve: duplicate consecutive points at row " +
                                 std::to_string(i));
      }
      lambda += chord;
    }
    curve.samples.push_back({lambda, points[i], normals[i].normalized()});
  }
  return curve;
}

Curve load_curve(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.size() < 2) {
    throw std::runtime_error("curve " + path + ": need at least 2 rows");
  }
  std::vector<Vector3> points, normals;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 6) {
      throw std::runtime_error("curve " + path + ": row " + std::to_string(i) +
                               " must have 6 columns (px,py,pz,nx,ny,nz)");
    }
    points.emplace_back(rows[i][0], rows[i][1], rows[i][2]);
    normals.emplace_back(rows[i][3], rows[i][4], rows[i][5]);
  }
  return make_curve(points, normals);
}

namespace {

Curve::Sample interpolate(const Curve& curve, double lambda) {
  const auto& s = curve.samples;
  if (lambda <= s.front().lambda) return s.front();
  if (lambda >= s.back().lambda) return s.back();
  // Binary search for the segment containing lambda.
  std::size_t lo = 0, hi = s.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (s[mid].lambda <= lambda) lo = mid;
    else hi = mid;
  }
  const double t = (lambda - s[lo].lambda) / (s[hi].lambda - s[lo].lambda);
  Curve::Sample out;
  out.lambda = lambda;
  out.p = (1.0 - t) * s[lo].p + t * s[hi].p;
  out.n = slerp_direction(s[lo].n, s[hi].n, t);
  return out;
}

}  // namespace

Curve resample(const Curve& curve, double step) {
  const double lf = curve.total_length();
  if (!(step > 0.0) || step >= lf) {
    throw std::invalid_argument("resample: step must be in (0, total_length)");
  }
  Curve out;
  double lambda = 0.0;
  while (lambda < lf - 1e-9) {
    out.samples.push_back(interpolate(curve, lambda));
    lambda += step;
  }
  Curve::Sample last = curve.samples.back();
  out.samples.push_back(last);
  // Re-anchor lambda on the new chord lengths so the grid is exact.
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i].lambda = std::min(static_cast<double>(i) * step, lf);
  }
  return out;
}

CurveDerivatives curve_derivatives(const Curve& curve) {
  const auto& s = curve.samples;
  if (s.size() < 3) {
    throw std::invalid_argument("curve_derivatives: need at least 3 samples");
  }
  const double step = s[1].lambda - s[0].lambda;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (std::abs((s[i + 1].lambda - s[i].lambda) - step) > 1e-6 &&
        i + 2 < s.size()) {
      throw std::invalid_argument("curve_derivatives: non-uniform grid");
    }
  }
  CurveDerivatives d;
  const std::size_t n = s.size();
  d.dp.resize(n);
  d.dn.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = (i == 0) ? 0 : i - 1;
    std::size_t b = (i + 1 == n) ? i : i + 1;
    const double h = s[b].lambda - s[a].lambda;
    d.dp[i] = (s[b].p - s[a].p) / h;
    d.dn[i] = (s[b].n - s[a].n) / h;
  }
  return d;
}

}  // namespace dualtrack
