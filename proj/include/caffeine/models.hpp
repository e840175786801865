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
#include <string>
#include <vector>

#include "caffeine/operators.hpp"

namespace caffeine {

/// H(λ) = (1−λ)·H_m + λ·H_p.
struct AnnealSpec {
  OperatorSum mixer;
  OperatorSum problem;
};

OperatorMatrix hamiltonian_at(const AnnealSpec& spec, double lambda,
                              std::size_t max_sites = kDefaultMaxSites);

struct TwoQubitParams {
  double coupling = 1.0;  // J
  double field = 5.0;     // h_z
};

enum class Boundary { open, periodic };

struct IsingParams {
  std::size_t num_sites = 2;
  /// Nearest-neighbour J_{i,i+1}; N−1 entries for open chains, N for periodic
  /// (the last entry couples site N−1 to site 0).
  std::vector<double> couplings;
  std::vector<double> fields;  // h_i, N entries
  Boundary boundary = Boundary::open;

  static IsingParams uniform(std::size_t n, double coupling = 1.0,
                             Boundary boundary = Boundary::open);
};

/// H_m = −Σσˣ_i,  H_p = −Σ J_{i,i+1} σᶻ_iσᶻ_{i+1} + Σ h_i σᶻ_i.
AnnealSpec ising_model(const IsingParams& p);

/// Σ_k γ_k sin(2πkt/τ) · Σ_i σᶻ_i, with γ_k given in units of ω₀.
struct ControlTermSpec {
  std::vector<double> gammas;
  double tau = 0.1;
  double omega0 = 0.0;
  std::size_t num_sites = 2;
};

OperatorMatrix control_term_at(const ControlTermSpec& spec, double t);

/// A model whose Hamiltonian is affine in λ, together with the operator that
/// the Floquet drive modulates. For annealing problems `drive` is ∂_λH
/// itself; the two-qubit family drives −(σᶻ₁+σᶻ₂) = −∂_λH/h_z, which is the
/// normalization under which the analytical β₁(λ) realizes the CD term.
class ParametricHamiltonian {
 public:
  ParametricHamiltonian(std::string name, OperatorMatrix at_zero, OperatorMatrix derivative,
                        OperatorMatrix drive, double drive_scale);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return static_cast<std::size_t>(at_zero_.rows()); }
  std::size_t num_sites() const { return sites_for_dimension(dimension()); }

  /// H(λ); λ must lie in [0, 1].
  OperatorMatrix at(double lambda) const;
  /// H(λ) without the protocol-domain check (used by the AGP limit tests).
  OperatorMatrix at_unchecked(double lambda) const;
  const OperatorMatrix& at_zero() const { return at_zero_; }
  /// ∂_λH, independent of λ.
  const OperatorMatrix& derivative() const { return derivative_; }
  const OperatorMatrix& drive() const { return drive_; }
  /// κ with drive = κ·∂_λH.
  double drive_scale() const { return drive_scale_; }

 private:
  std::string name_;
  OperatorMatrix at_zero_;
  OperatorMatrix derivative_;
  OperatorMatrix drive_;
  double drive_scale_;
};

/// H(λ) = −J(σˣ₁σˣ₂ + σᶻ₁σᶻ₂) + h_z(λ−1)(σᶻ₁+σᶻ₂).
ParametricHamiltonian two_qubit_model(const TwoQubitParams& p);

ParametricHamiltonian anneal_family(const AnnealSpec& spec,
                                    std::size_t max_sites = kDefaultMaxSites);

/// (|↑↑⟩ + |↓↓⟩)/√2.
QuantumState bell_state();

}  // namespace caffeine
