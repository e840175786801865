// Copyright 2026 The CAFFEINE Authors
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

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace caffeine {

using Objective = std::function<double(const Eigen::VectorXd&)>;

class Bounds {
 public:
  Bounds() = default;
  explicit Bounds(std::vector<std::pair<double, double>> limits);
  /// Same interval for every one of `dim` parameters.
  static Bounds uniform(std::size_t dim, double lo, double hi);

  std::size_t dimension() const { return limits_.size(); }
  double lower(std::size_t i) const { return limits_[i].first; }
  double upper(std::size_t i) const { return limits_[i].second; }
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(Eigen::VectorXd x) const;

 private:
  std::vector<std::pair<double, double>> limits_;
};

enum class TerminationReason { budget_exhausted, converged, user_abort };

std::string to_string(TerminationReason r);

struct DualAnnealingConfig {
  std::size_t max_function_evals = 100'000;
  std::size_t max_global_iterations = 1'000;
  double initial_temperature = 5230.0;
  double visiting_param = 2.62;
  double acceptance_param = -5.0;
  double restart_temp_ratio = 2e-5;
  bool local_search_enabled = true;
  /// Evaluations per local search; 0 selects min(max(6·dim, 100), 1000) iterations' worth.
  std::size_t local_search_max_evals = 0;
  std::uint64_t rng_seed = 1234;
  /// Starting point; drawn uniformly in the box when absent.
  std::optional<Eigen::VectorXd> x0;
  /// Stop with `converged` once best cost ≤ target.
  std::optional<double> target_cost;
  /// Polled between evaluations; set to request `user_abort`.
  const std::atomic<bool>* abort_flag = nullptr;

  void validate() const;
};

struct OptimizationResult {
  Eigen::VectorXd best_params;
  double best_cost = 0.0;
  std::size_t evaluation_count = 0;
  std::size_t global_iterations = 0;
  std::size_t nonfinite_evaluations = 0;
  std::vector<double> cost_trace;  // every evaluation in order; non-finite values as +inf
  TerminationReason termination_reason = TerminationReason::budget_exhausted;
  std::uint64_t seed = 0;
};

/// Generalized simulated annealing with local refinement (dual annealing).
OptimizationResult dual_anneal(const Objective& cost, const Bounds& bounds,
                               const DualAnnealingConfig& cfg);

/// Bounded Nelder–Mead from `x0`; `max_evals` counts objective calls.
struct LocalSearchResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t evaluations = 0;
};
LocalSearchResult nelder_mead(const Objective& cost, const Bounds& bounds, Eigen::VectorXd x0,
                              std::size_t max_evals, double ftol = 1e-14, double xtol = 1e-12);

struct LandscapeRow {
  Eigen::VectorXd params;
  double cost = 0.0;
  std::string error;  // empty on success
};

struct LandscapeTable {
  std::vector<LandscapeRow> rows;
  std::size_t min_row = 0;
};

/// Exhaustive scan over the Cartesian product of the axes; the last axis varies
/// fastest. Rows are independent and evaluated on up to `jobs` threads.
LandscapeTable landscape_scan(const Objective& cost, const std::vector<std::vector<double>>& axes,
                              std::size_t max_points = 1'000'000, std::size_t jobs = 1);

/// `count` equally spaced values from `start` to `stop` inclusive.
std::vector<double> linspace(double start, double stop, std::size_t count);

}  // namespace caffeine
