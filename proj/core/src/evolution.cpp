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

#include "dualtrack/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace dualtrack {

bool SearchSpace::contains(const Eigen::VectorXd& x, double tol) const {
  for (int i = 0; i < dimension(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

namespace {

double reflect(double v, double lo, double hi) {
  const double range = hi - lo;
  if (range <= 0.0) return lo;
  // Fold into [lo, lo + 2*range) then mirror the upper half.
  double t = std::fmod(v - lo, 2.0 * range);
  if (t < 0.0) t += 2.0 * range;
  return (t <= range) ? lo + t : hi - (t - range);
}

void evaluate_all(const std::function<double(const Eigen::VectorXd&)>& f,
                  const std::vector<Eigen::VectorXd>& xs,
                  std::vector<double>& scores, int threads) {
  scores.resize(xs.size());
  if (threads <= 1 || xs.size() < 2) {
    for (std::size_t i = 0; i < xs.size(); ++i) scores[i] = f(xs[i]);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (xs.size() + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(xs.size(), begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) scores[i] = f(xs[i]);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

EvolutionReport evolve(
    const SearchSpace& space,
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const EvolutionOptions& options,
    const std::vector<Eigen::VectorXd>& initial_seeds) {
  const int dim = space.dimension();
  if (dim == 0) throw std::invalid_argument("evolve: empty search space");
  for (int i = 0; i < dim; ++i) {
    if (!(space.lower[i] < space.upper[i])) {
      throw std::invalid_argument("evolve: lower must be < upper");
    }
  }
  const int np = options.population;
  if (np < 4) throw std::invalid_argument("evolve: population must be >= 4");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::VectorXd> pop(np, Eigen::VectorXd(dim));
  for (int i = 0; i < np; ++i) {
    if (i < static_cast<int>(initial_seeds.size())) {
      pop[i] = initial_seeds[i];
      for (int d = 0; d < dim; ++d) {
        pop[i][d] = std::clamp(pop[i][d], space.lower[d], space.upper[d]);
      }
    } else {
      for (int d = 0; d < dim; ++d) {
        pop[i][d] =
            space.lower[d] + unit(rng) * (space.upper[d] - space.lower[d]);
      }
    }
  }

  EvolutionReport report;
  std::vector<double> scores;
  evaluate_all(objective, pop, scores, options.threads);
  report.evaluation_count += np;

  int best_idx = static_cast<int>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  report.best_score = scores[best_idx];
  report.best_member = pop[best_idx];
  report.best_per_generation.push_back(report.best_score);

  int stagnant = 0;
  double stagnation_ref = report.best_score;

  std::uniform_int_distribution<int> pick(0, np - 1);
  std::uniform_int_distribution<int> pick_dim(0, dim - 1);

  for (int gen = 0; gen < options.max_generations; ++gen) {
    // Draw all randomness up front so evaluation order cannot matter.
    std::vector<Eigen::VectorXd> trials(np, Eigen::VectorXd(dim));
    for (int i = 0; i < np; ++i) {
      int a, b, c;
      do { a = pick(rng); } while (a == i);
      do { b = pick(rng); } while (b == i || b == a);
      do { c = pick(rng); } while (c == i || c == a || c == b);
      const int forced = pick_dim(rng);
      for (int d = 0; d < dim; ++d) {
        const bool cross = unit(rng) < options.crossover_cr || d == forced;
        double v = cross
                       ? pop[a][d] + options.weight_f * (pop[b][d] - pop[c][d])
                       : pop[i][d];
        trials[i][d] = reflect(v, space.lower[d], space.upper[d]);
      }
    }
    std::vector<double> trial_scores;
    evaluate_all(objective, trials, trial_scores, options.threads);
    report.evaluation_count += np;
    for (int i = 0; i < np; ++i) {
      if (trial_scores[i] >= scores[i]) {
        pop[i] = trials[i];
        scores[i] = trial_scores[i];
        if (scores[i] > report.best_score) {
          report.best_score = scores[i];
          report.best_member = pop[i];
        }
      }
    }
    report.best_per_generation.push_back(report.best_score);

    if (options.stagnation_generations > 0) {
      const double rel_gain =
          (report.best_score - stagnation_ref) /
          std::max(1e-30, std::abs(stagnation_ref));
      if (rel_gain <= options.stagnation_rel) {
        if (++stagnant >= options.stagnation_generations) {
          report.converged_early = true;
          break;
        }
      } else {
        stagnant = 0;
        stagnation_ref = report.best_score;
      }
    }
  }
  return report;
}

}  // namespace dualtrack
