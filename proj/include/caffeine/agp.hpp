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
#include <limits>
#include <string>
#include <vector>

#include "caffeine/models.hpp"
#include "caffeine/operators.hpp"
#include "caffeine/schedules.hpp"

namespace caffeine {

/// Adiabatic gauge potential at one λ. Diagonal elements in the eigenbasis of
/// H(λ) are fixed to zero.
struct AGPResult {
  OperatorMatrix matrix;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::string gauge = "zero-diagonal";
};

/// Spectral AGP: ⟨m|A|n⟩ = −i⟨m|∂_λH|n⟩/(E_m − E_n) for m ≠ n.
///
/// Pairs closer than `degeneracy_tol`·‖h‖ are skipped when ∂_λH does not
/// couple them and raise DegeneracyError when it does.
AGPResult exact_agp(const OperatorMatrix& h, const OperatorMatrix& dh,
                    double lambda = std::numeric_limits<double>::quiet_NaN(),
                    double degeneracy_tol = 1e-10);

/// Closed-form prefactor J·h_z / (2(J² + 4(λ−1)²h_z²)) of the two-qubit AGP.
double two_qubit_agp_prefactor(const TwoQubitParams& p, double lambda);

/// prefactor(λ) · (σʸ₁σˣ₂ + σˣ₁σʸ₂). Valid for any real λ.
AGPResult analytical_two_qubit_agp(const TwoQubitParams& p, double lambda);

/// Analytical first Floquet coefficient β₁(λ) = 2h_zω₀ / (4J² + 16(λ−1)²h_z²),
/// returned in units of ω₀.
double analytical_beta1(const TwoQubitParams& p, double lambda);

struct AnsatzCoefficients {
  std::vector<double> alphas;  // α_1 … α_Nk
};

/// [H,[H,…[H, ∂_λH]]] with `depth` nested commutators.
OperatorMatrix nested_commutator(const OperatorMatrix& h, const OperatorMatrix& dh,
                                 std::size_t depth);

/// i Σ_k α_k · (2k−1)-fold nested commutator.
OperatorMatrix commutator_ansatz_agp(const OperatorMatrix& h, const OperatorMatrix& dh,
                                     const AnsatzCoefficients& alphas);

struct AnsatzFit {
  AnsatzCoefficients coefficients;
  double residual = 0.0;         // ‖A_exact − A_ansatz‖_F
  bool ill_conditioned = false;  // rank-deficient basis; minimum-norm solution returned
};

/// Least-squares projection of exact_agp onto the first `cutoff` commutator terms.
AnsatzFit fit_ansatz_coefficients(const OperatorMatrix& h, const OperatorMatrix& dh,
                                  std::size_t cutoff);

/// Conversion constants c_k in α_k = c_k · β_k^(j)/ω₀.
struct BetaAlphaCalibration {
  std::vector<double> constants;
  double lambda = 0.0;   // calibration point
  std::string source;    // provenance of the constants
};

/// c₁ from the analytical two-qubit pair (β₁ of analytical_beta1, α₁ fitted to
/// the analytical AGP) at `lambda`.
BetaAlphaCalibration calibrate_two_qubit(const TwoQubitParams& p, double lambda = 0.5);

/// α for segment `segment` (1-based). Throws UnsupportedError when the table
/// has more harmonics than calibrated constants.
AnsatzCoefficients betas_to_alphas(const PiecewiseBeta& beta, std::size_t segment,
                                   const BetaAlphaCalibration& calibration);

/// Inverse of betas_to_alphas; β values in units of ω₀.
std::vector<double> alphas_to_betas(const AnsatzCoefficients& alphas,
                                    const BetaAlphaCalibration& calibration);

}  // namespace caffeine
