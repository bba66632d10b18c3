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

#ifndef DUALTRACK_CURVE_HPP_
#define DUALTRACK_CURVE_HPP_

#include <string>
#include <vector>

#include "dualtrack/geometry.hpp"

namespace dualtrack {

/// Arc-length-parameterized 5-dof target curve: position and outward surface
/// normal in the frame of the part-holding arm's TCP. Tool spin about the
/// normal is left free.
struct Curve {
  struct Sample {
    double lambda = 0.0;  // mm, cumulative chordal arc length
    Vector3 p = Vector3::Zero();
    Vector3 n = Vector3::UnitZ();  // unit
  };
  std::vector<Sample> samples;

  double total_length() const {
    return samples.empty() ? 0.0 : samples.back().lambda;
  }
  std::size_t size() const { return samples.size(); }
};

/// Per-sample arc-length derivatives of a uniformly resampled curve.
struct CurveDerivatives {
  std::vector<Vector3> dp;  // unit tangent, per mm
  std::vector<Vector3> dn;  // normal rate, per mm
};

/// Loads a 6-column CSV (px,py,pz,nx,ny,nz in mm), '#' lines skipped.
/// Normals are renormalized; lambda is cumulative chord length from 0.
/// Throws on malformed rows, zero-norm normals, or duplicate consecutive
/// points.
Curve load_curve(const std::string& path);

/// Builds a curve directly from samples (positions and normals).
Curve make_curve(const std::vector<Vector3>& points,
                 const std::vector<Vector3>& normals);

/// Uniform resampling in lambda by linear position interpolation and
/// constant-rate rotation of normals. Endpoints preserved exactly; the
/// final segment may be shorter than step.
Curve resample(const Curve& curve, double step);

/// Central finite differences (one-sided at the ends) on a uniform grid.
/// Throws when the grid is non-uniform or has fewer than 3 samples.
CurveDerivatives curve_derivatives(const Curve& curve);

}  // namespace dualtrack

#endif  // DUALTRACK_CURVE_HPP_
