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
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "caffeine/dynamics.hpp"
#include "caffeine/models.hpp"
#include "caffeine/optimize.hpp"
#include "caffeine/schedules.hpp"

namespace caffeine {

enum class CostKind { infidelity, final_energy, segment_energy };

std::string to_string(CostKind k);

struct CostSpec {
  CostKind kind = CostKind::infidelity;
  /// Target state for `infidelity`.
  std::optional<QuantumState> target;
  /// Observable for `final_energy`; H(1) when absent.
  std::optional<OperatorMatrix> observable;
};

/// How a parameter vector maps onto the drive.
enum class ControlKind {
  /// Flattened β table (harmonic-major within a segment), units of ω₀.
  floquet_beta,
  /// One segment of a β table: the vector holds β_1..β_Nk of `segment`.
  floquet_segment,
  /// γ_1..γ_K of the sinusoidal control term, units of ω₀.
  anneal_gamma,
};

/// Everything a cost evaluation needs beside the parameter vector.
struct ExperimentContext {
  ExperimentContext(ParametricHamiltonian m, Schedule s)
      : model(std::move(m)), schedule(s) {}

  ParametricHamiltonian model;
  Schedule schedule;
  ControlKind control = ControlKind::floquet_beta;
  std::size_t num_harmonics = 1;
  std::size_t num_segments = 1;
  double omega = 0.0;
  double omega0 = 0.0;
  double min_oscillations = 100.0;
  PropagatorConfig propagator;
  QuantumState initial_state;
  /// Propagation window; [0, τ] unless a segment is being learned.
  double t_start = 0.0;
  std::optional<double> t_end;
  /// For floquet_segment: the table whose `segment` column is replaced.
  std::optional<PiecewiseBeta> base_table;
  std::size_t segment = 1;
};

/// Pure map from parameters to the drive actually applied.
PiecewiseBeta beta_table_for(const ExperimentContext& ctx, const Eigen::VectorXd& params);
TimeDependentHamiltonian hamiltonian_for(const ExperimentContext& ctx,
                                         const Eigen::VectorXd& params);

/// Final state of the context's propagation for `params`.
QuantumState evolve(const ExperimentContext& ctx, const Eigen::VectorXd& params);

/// Cost callable. Propagation failures score +∞ and are counted in `failures`.
struct CostFunction {
  Objective evaluate;
  std::shared_ptr<std::atomic<std::size_t>> failures;
  double operator()(const Eigen::VectorXd& x) const { return evaluate(x); }
};

CostFunction make_cost(const CostSpec& spec, const ExperimentContext& ctx);

}  // namespace caffeine
