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
#include <vector>

#include "caffeine/cost.hpp"
#include "caffeine/dynamics.hpp"
#include "caffeine/models.hpp"
#include "caffeine/optimize.hpp"
#include "caffeine/schedules.hpp"

namespace caffeine {

enum class Arm { unassisted, optimized_anneal, analytical_floquet, exact_cd, caffeine };

std::string to_string(Arm arm);
/// Accepts both `analytical_floquet` and `analytical-floquet` spellings.
Arm arm_from_string(const std::string& s);

enum class ModelKind { two_qubit, ising };

struct ModelConfig {
  ModelKind kind = ModelKind::two_qubit;
  TwoQubitParams two_qubit;
  /// Ising chain lengths to run.
  std::vector<std::size_t> sizes{2};
  double coupling = 1.0;
  double field = 0.0;
  Boundary boundary = Boundary::open;
  std::size_t max_sites = kDefaultMaxSites;
};

struct DriveConfig {
  /// N_k values; the Ising grid runs every (N_k, N_τ) pair.
  std::vector<std::size_t> harmonics{1};
  /// N_τ values.
  std::vector<std::size_t> segments{1};
  double omega_multiplier = 1000.0;
  /// ω₀; 2π/τ when absent.
  std::optional<double> omega0;
  double beta_lower = -3.0;
  double beta_upper = 3.0;
  double min_oscillations = 100.0;
  /// Start each finer (N_k, N_τ) search from the coarser optimum.
  bool warm_start = true;
};

struct AnnealControlConfig {
  std::size_t num_gammas = 1;
  double gamma_lower = -1.0;
  double gamma_upper = 1.0;
};

struct LearningConfig {
  std::size_t num_segments = 12;
  double beta_lower = 0.0;
  double beta_upper = 1.0;
  /// Smooth schedule: segments ending after tail_cutoff·τ are flagged, not scored.
  double tail_cutoff = 0.8;
};

struct LandscapeAxis {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;
};

enum class LandscapeControl { gamma, beta };

struct LandscapeConfig {
  LandscapeControl control = LandscapeControl::beta;
  std::vector<LandscapeAxis> axes;
  std::size_t max_points = 100'000;
};

struct ExperimentConfig {
  ModelConfig model;
  Schedule schedule;
  DriveConfig drive;
  AnnealControlConfig anneal_control;
  LearningConfig learning;
  LandscapeConfig landscape;
  std::vector<Arm> arms{Arm::unassisted, Arm::optimized_anneal, Arm::analytical_floquet,
                        Arm::exact_cd, Arm::caffeine};
  DualAnnealingConfig optimizer;
  PropagatorConfig propagator;
  std::uint64_t seed = 20240611;
  std::size_t trajectory_samples = 200;
  std::vector<double> cd_taus{0.01, 0.1, 1.0};
  std::size_t jobs = 1;
  /// Polled between jobs and optimizer evaluations.
  const std::atomic<bool>* abort_flag = nullptr;

  double omega0() const;
  double omega() const { return drive.omega_multiplier * omega0(); }
  void validate() const;
};

/// Deterministic per-job seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Coarse optimum re-expressed on a finer (N_k, N_τ) grid: segment j inherits
/// the coarse value at its midpoint, new harmonics start at zero.
PiecewiseBeta refine_table(const PiecewiseBeta& coarse, std::size_t num_harmonics,
                           std::size_t num_segments);

struct TrajectoryRow {
  double t = 0.0;
  double lambda = 0.0;
  double fidelity_target = 0.0;
  double fidelity_instantaneous = 0.0;
  double energy = 0.0;
  double norm_drift = 0.0;
  bool ambiguous = false;
};

/// Propagates `h` from the ground state of H(0) and samples the standard
/// trajectory columns. `target` may be empty (then fidelity_target is NaN).
struct TrajectoryRun {
  QuantumState final_state;
  std::vector<TrajectoryRow> rows;
  double max_norm_drift = 0.0;
  std::size_t steps = 0;
};
TrajectoryRun run_trajectory(const TimeDependentHamiltonian& h, const ParametricHamiltonian& model,
                             const Schedule& schedule, const QuantumState& psi0,
                             const std::optional<QuantumState>& target,
                             const PropagatorConfig& propagator, std::size_t samples);

struct ArmResult {
  Arm arm = Arm::unassisted;
  std::string label;
  double infidelity = 0.0;
  double min_instantaneous_fidelity = 0.0;
  double max_norm_drift = 0.0;
  std::size_t num_harmonics = 0;
  std::size_t num_segments = 0;
  std::optional<PiecewiseBeta> betas;
  std::vector<double> gammas;
  std::optional<OptimizationResult> optimization;
  std::size_t cost_failures = 0;
  std::vector<TrajectoryRow> trajectory;
};

struct StatePrepReport {
  double omega = 0.0;
  double omega0 = 0.0;
  std::vector<ArmResult> arms;
  bool interrupted = false;
};

/// Context for two-qubit infidelity costs under the configured drive.
ExperimentContext state_prep_context(const ExperimentConfig& cfg, ControlKind control,
                                     std::size_t num_harmonics, std::size_t num_segments);

StatePrepReport run_state_prep(const ExperimentConfig& cfg);

struct AnnealRow {
  std::size_t num_sites = 0;
  Arm arm = Arm::unassisted;
  std::size_t num_harmonics = 0;
  std::size_t num_segments = 0;
  double final_energy = 0.0;
  double ground_energy = 0.0;
  double energy_gap = 0.0;  // E − E_T
  std::optional<PiecewiseBeta> betas;
  std::optional<OptimizationResult> optimization;
};

struct AnnealReport {
  double omega = 0.0;
  double omega0 = 0.0;
  std::vector<AnnealRow> rows;
  bool interrupted = false;
};

/// Called with all rows finished so far (sorted) whenever a chain size completes.
using AnnealProgress = std::function<void(const std::vector<AnnealRow>&)>;

AnnealReport run_ising_anneal(const ExperimentConfig& cfg, const AnnealProgress& progress = {});

struct SegmentResult {
  std::size_t index = 0;  // 1-based
  double t_start = 0.0;
  double t_end = 0.0;
  double lambda_end = 0.0;
  std::vector<double> betas;  // β_1..β_Nk, units of ω₀
  double energy = 0.0;        // E_j at t_end
  QuantumState state;         // ψ(t_end)
  OptimizationResult optimization;
  std::optional<double> analytical_average;    // two-qubit only
  std::optional<double> analytical_projected;  // average clipped to the learning bounds
  bool tail = false;
};

struct LearningReport {
  bool two_qubit = false;
  double omega = 0.0;
  double omega0 = 0.0;
  std::vector<SegmentResult> segments;
  std::optional<PiecewiseBeta> table;
  std::size_t scored_segments = 0;
  std::optional<double> rms_projected;
  std::optional<double> rms_raw;
  /// 1 − F between the chained final state and one full propagation.
  std::optional<double> chain_mismatch;
  bool complete = false;
  std::string error;
};

/// Segment average of the analytical β₁(λ(t)) over [t0, t1], in units of ω₀.
double segment_average_beta1(const TwoQubitParams& p, const Schedule& schedule, double t0,
                             double t1);

LearningReport run_agp_learning(const ExperimentConfig& cfg);

struct ExactCdRun {
  double tau = 0.0;
  double infidelity = 0.0;
  double min_instantaneous_fidelity = 0.0;
  double max_norm_drift = 0.0;
  std::vector<TrajectoryRow> trajectory;
};

struct ExactCdReport {
  std::vector<ExactCdRun> runs;
};

ExactCdReport reference_exact_cd(const ExperimentConfig& cfg);

struct LandscapeReport {
  LandscapeControl control = LandscapeControl::beta;
  LandscapeTable table;
  double omega = 0.0;
  double omega0 = 0.0;
};

LandscapeReport run_landscape(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; fn must write only to slot i.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace caffeine
