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

#ifndef DUALTRACK_EVOLUTION_HPP_
#define DUALTRACK_EVOLUTION_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dualtrack {

/// Bound-constrained search box; lower < upper per parameter.
struct SearchSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dimension() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

struct EvolutionOptions {
  int population = 30;
  double weight_f = 0.8;       // differential weight
  double crossover_cr = 0.9;   // binomial crossover rate
  int max_generations = 300;
  std::uint64_t seed = 0;
  int threads = 1;
  // Early stop: best score stagnant within stagnation_rel for this many
  // generations. Zero disables.
  int stagnation_generations = 50;
  double stagnation_rel = 1e-3;
};

struct EvolutionReport {
  std::vector<double> best_per_generation;  // non-decreasing
  Eigen::VectorXd best_member;
  double best_score = 0.0;
  long evaluation_count = 0;
  bool converged_early = false;
};

/// DE/rand/1/bin maximizing `objective` over the box. Bounds are enforced by
/// reflection. Deterministic for a fixed seed and thread count-independent
/// (all random draws happen before any evaluation in a generation).
/// `initial_seeds` members are injected into the initial population.
EvolutionReport evolve(
    const SearchSpace& space,
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const EvolutionOptions& options,
    const std::vector<Eigen::VectorXd>& initial_seeds = {});

}  // namespace dualtrack

#endif  // DUALTRACK_EVOLUTION_HPP_
