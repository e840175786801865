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

#include "caffeine/cost.hpp"

#include <cmath>
#include <limits>

#include "caffeine/errors.hpp"

namespace caffeine {

std::string to_string(CostKind k) {
  switch (k) {
    case CostKind::infidelity:
      return "infidelity";
    case CostKind::final_energy:
      return "final_energy";
    case CostKind::segment_energy:
      return "segment_energy";
  }
  return "unknown";
}

PiecewiseBeta beta_table_for(const ExperimentContext& ctx, const Eigen::VectorXd& params) {
  if (ctx.control == ControlKind::floquet_beta) {
    return PiecewiseBeta::from_flat(ctx.num_harmonics, ctx.num_segments, ctx.schedule.tau, params,
                                    -std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity());
  }
  if (ctx.control == ControlKind::floquet_segment) {
    if (!ctx.base_table) throw DomainError("segment cost needs a base beta table");
    PiecewiseBeta table = *ctx.base_table;
    if (static_cast<std::size_t>(params.size()) != table.num_harmonics()) {
      throw DimensionError("segment parameter count does not match N_k");
    }
    for (std::size_t k = 1; k <= table.num_harmonics(); ++k) {
      table.set(k, ctx.segment, params(static_cast<Eigen::Index>(k - 1)));
    }
    return table;
  }
  throw DomainError("context does not describe a Floquet drive");
}

TimeDependentHamiltonian hamiltonian_for(const ExperimentContext& ctx,
                                         const Eigen::VectorXd& params) {
  if (ctx.control == ControlKind::anneal_gamma) {
    ControlTermSpec control;
    control.gammas.assign(params.data(), params.data() + params.size());
    control.tau = ctx.schedule.tau;
    control.omega0 = ctx.omega0;
    return controlled_hamiltonian(ctx.model, ctx.schedule, control);
  }
  FloquetDriveSpec drive =
      FloquetDriveSpec::piecewise(ctx.omega, ctx.omega0, beta_table_for(ctx, params));
  drive.min_oscillations = ctx.min_oscillations;
  return floquet_hamiltonian(ctx.model, ctx.schedule, std::move(drive));
}

QuantumState evolve(const ExperimentContext& ctx, const Eigen::VectorXd& params) {
  const TimeDependentHamiltonian h = hamiltonian_for(ctx, params);
  const double t_end = ctx.t_end.value_or(ctx.schedule.tau);
  return propagate(h, ctx.initial_state, ctx.t_start, t_end, ctx.propagator).state;
}

CostFunction make_cost(const CostSpec& spec, const ExperimentContext& ctx) {
  if (static_cast<std::size_t>(ctx.initial_state.size()) != ctx.model.dimension()) {
    throw DimensionError("initial state dimension does not match the model");
  }
  if (spec.kind == CostKind::infidelity) {
    if (!spec.target) throw ConfigError("infidelity cost needs a target state");
    if (static_cast<std::size_t>(spec.target->size()) != ctx.model.dimension()) {
      throw DimensionError("target state dimension does not match the model");
    }
  }
  const double t_end = ctx.t_end.value_or(ctx.schedule.tau);
  OperatorMatrix observable;
  if (spec.kind == CostKind::final_energy) {
    observable = spec.observable ? *spec.observable : ctx.model.at(1.0);
  } else if (spec.kind == CostKind::segment_energy) {
    observable = ctx.model.at(lambda_at(ctx.schedule, t_end));
  }
  auto failures = std::make_shared<std::atomic<std::size_t>>(0);
  CostFunction out;
  out.failures = failures;
  out.evaluate = [spec, ctx, observable, failures](const Eigen::VectorXd& x) -> double {
    try {
      const QuantumState psi = evolve(ctx, x);
      if (spec.kind == CostKind::infidelity) return 1.0 - fidelity(*spec.target, psi);
      return expectation(observable, psi);
    } catch (const NumericalError&) {
      failures->fetch_add(1);
      return std::numeric_limits<double>::infinity();
    }
  };
  return out;
}

}  // namespace caffeine
