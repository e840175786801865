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

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caffeine/models.hpp"
#include "caffeine/operators.hpp"
#include "caffeine/schedules.hpp"

namespace caffeine {

struct CompressedCache;

/// H(t) either as Σ_i c_i(t)·M_i over fixed matrices or as a dense callback.
///
/// `breakpoints` lists interior times where the coefficients jump; integrators
/// never step across one and report the index of the current piece to the
/// coefficient function, so a piecewise-constant parameter is evaluated on the
/// correct side of its discontinuity.
class TimeDependentHamiltonian {
 public:
  using CoefficientFn = std::function<void(double t, std::size_t piece, std::span<double> out)>;
  using MatrixFn = std::function<OperatorMatrix(double t)>;

  TimeDependentHamiltonian(std::vector<OperatorMatrix> terms, CoefficientFn coefficients);
  explicit TimeDependentHamiltonian(MatrixFn matrix, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }

  /// out = H(t)·psi.
  void apply(double t, std::size_t piece, const QuantumState& psi, QuantumState& out) const;
  OperatorMatrix matrix(double t, std::size_t piece) const;
  /// Piece index of t (number of breakpoints ≤ t).
  std::size_t piece_of(double t) const;

  std::vector<double> breakpoints;
  /// Shortest oscillation period present in H(t); 0 when not oscillating.
  double oscillation_period = 0.0;

 private:
  std::size_t dimension_ = 0;
  std::vector<OperatorMatrix> terms_;
  CoefficientFn coefficients_;
  MatrixFn matrix_fn_;
  mutable std::shared_ptr<CompressedCache> compressed_;
};

/// dop853 and dp54 are adaptive embedded Runge–Kutta pairs (orders 8(5,3) and
/// 5(4)); magnus4 is the fixed-step fourth-order commutator Magnus scheme.
enum class Integrator { dop853, dp54, magnus4 };

std::string to_string(Integrator method);
Integrator integrator_from_string(const std::string& s);

struct PropagatorConfig {
  Integrator method = Integrator::dop853;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Step cap (2π/ω)/min_steps_per_oscillation for oscillating Hamiltonians.
  int min_steps_per_oscillation = 20;
  std::size_t max_steps = 200'000'000;
  /// Extra step cap; 0 disables.
  double max_step = 0.0;
  /// magnus4 step; 0 derives it from the oscillation guard or `max_step`.
  double fixed_step = 0.0;
  /// Repeat with halved tolerances and report the change in final fidelity.
  bool self_check = false;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::vector<double> norm_drift;
};

struct PropagationResult {
  QuantumState state;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  double norm_drift = 0.0;  // |‖ψ(t_f)‖ − 1|
  double max_norm_drift = 0.0;
  /// 1 − |⟨ψ|ψ_halved-tolerance⟩|² when self_check is enabled.
  std::optional<double> self_check_delta;
  std::optional<TrajectoryRecord> trajectory;
};

/// Solves i∂_t|ψ⟩ = H(t)|ψ⟩ (ħ = 1) on [t_start, t_end]. States are recorded at
/// `sample_times` (which must lie in the interval) when provided.
PropagationResult propagate(const TimeDependentHamiltonian& h, const QuantumState& psi0,
                            double t_start, double t_end, const PropagatorConfig& cfg,
                            std::span<const double> sample_times = {});

/// Oscillating drive: ω, ω₀ in rad per unit time; β either a piecewise table or
/// a continuous profile β_k(t), both in units of ω₀.
struct FloquetDriveSpec {
  using Profile = std::function<double(std::size_t k, double t)>;

  double omega = 0.0;
  double omega0 = 0.0;
  std::size_t num_harmonics = 1;
  std::optional<PiecewiseBeta> table;
  Profile profile;
  /// Minimum ω·τ/2π, the number of oscillations per protocol.
  double min_oscillations = 100.0;

  static FloquetDriveSpec piecewise(double omega, double omega0, PiecewiseBeta beta);
  static FloquetDriveSpec continuous(double omega, double omega0, std::size_t num_harmonics,
                                     Profile profile);

  /// Defaults ω₀ = 2π/τ and ω = multiplier·ω₀.
  static double default_omega0(double tau) { return 2.0 * 3.14159265358979323846 / tau; }

  double beta(std::size_t k, double t, std::optional<std::size_t> segment = std::nullopt) const;
  void validate(double tau) const;
};

/// λ-dependent AGP supplier used by the CD arm.
using AgpProvider = std::function<OperatorMatrix(double lambda)>;

AgpProvider exact_agp_provider(const ParametricHamiltonian& model);
AgpProvider analytical_agp_provider(const TwoQubitParams& params);

/// H(λ(t)) + λ̇(t)·A_λ(t).
OperatorMatrix assemble_cd_hamiltonian(const ParametricHamiltonian& model,
                                       const Schedule& schedule, const AgpProvider& agp,
                                       double t);

/// (1 + (ω/ω₀)cos ωt)·H(λ) + λ̇·ω₀·Σ_k β_k(t) sin((2k−1)ωt)·D, where D is the
/// model's drive operator.
OperatorMatrix assemble_floquet_hamiltonian(const ParametricHamiltonian& model,
                                            const Schedule& schedule,
                                            const FloquetDriveSpec& drive, double t);

/// H(λ(t)) + H_c(t).
OperatorMatrix assemble_controlled_hamiltonian(const ParametricHamiltonian& model,
                                               const Schedule& schedule,
                                               const ControlTermSpec& control, double t);

// Propagation-ready forms of the same Hamiltonians.
TimeDependentHamiltonian bare_hamiltonian(const ParametricHamiltonian& model,
                                          const Schedule& schedule);
TimeDependentHamiltonian cd_hamiltonian(const ParametricHamiltonian& model,
                                        const Schedule& schedule, AgpProvider agp);
TimeDependentHamiltonian floquet_hamiltonian(const ParametricHamiltonian& model,
                                             const Schedule& schedule, FloquetDriveSpec drive);
TimeDependentHamiltonian controlled_hamiltonian(const ParametricHamiltonian& model,
                                                const Schedule& schedule,
                                                ControlTermSpec control);

struct FidelitySample {
  double t = 0.0;
  double lambda = 0.0;
  double fidelity = 0.0;      // |⟨n(λ(t))|ψ(t)⟩|²
  double energy = 0.0;        // ⟨ψ(t)|H(λ(t))|ψ(t)⟩
  std::size_t level = 0;      // energy index of the tracked eigenstate
  bool ambiguous = false;     // top two overlaps within 1e-3
};

/// Fidelity with the instantaneous eigenstate, tracked from `initial_level` at
/// the first sample by maximal overlap with the previously tracked eigenvector.
std::vector<FidelitySample> instantaneous_fidelity_series(const TrajectoryRecord& record,
                                                          const ParametricHamiltonian& model,
                                                          const Schedule& schedule,
                                                          std::size_t initial_level = 0);

/// n+1 equally spaced times on [t0, t1].
std::vector<double> uniform_samples(double t0, double t1, std::size_t n);

}  // namespace caffeine
