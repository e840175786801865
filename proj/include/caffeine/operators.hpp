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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace caffeine {

using Complex = std::complex<double>;

/// Dense operator on the 2^N-dimensional spin Hilbert space. Site 0 is the
/// most significant qubit, and bit value 0 is |↑⟩ (σᶻ = +1).
using OperatorMatrix = Eigen::MatrixXcd;
using QuantumState = Eigen::VectorXcd;

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// 2×2 matrix of a single Pauli.
OperatorMatrix pauli_matrix(Pauli p);

struct SiteOp {
  std::size_t site;
  Pauli label;
};

/// coefficient · ⊗_i σ_i, identity on sites that are not listed.
class PauliTerm {
 public:
  PauliTerm(Complex coefficient, std::vector<SiteOp> ops, std::size_t num_sites);

  Complex coefficient() const { return coefficient_; }
  const std::vector<SiteOp>& ops() const { return ops_; }
  std::size_t num_sites() const { return num_sites_; }

  /// Pauli acting on `site` (I when unlisted).
  Pauli label_at(std::size_t site) const;
  bool is_hermitian() const;
  std::string to_string() const;

 private:
  Complex coefficient_;
  std::vector<SiteOp> ops_;
  std::size_t num_sites_;
};

class OperatorSum {
 public:
  explicit OperatorSum(std::size_t num_sites);

  std::size_t num_sites() const { return num_sites_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  OperatorSum& add(const PauliTerm& term);
  OperatorSum& add(Complex coefficient, std::vector<SiteOp> ops);
  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum scaled(Complex factor) const;

 private:
  std::size_t num_sites_;
  std::vector<PauliTerm> terms_;
};

OperatorSum operator+(OperatorSum a, const OperatorSum& b);
OperatorSum operator*(Complex factor, const OperatorSum& s);

inline constexpr std::size_t kDefaultMaxSites = 12;
inline constexpr std::size_t kHardMaxSites = 14;

/// Tensor-product realization. `max_sites` may be raised up to kHardMaxSites.
OperatorMatrix materialize(const PauliTerm& term, std::size_t max_sites = kDefaultMaxSites);
OperatorMatrix materialize(const OperatorSum& sum, std::size_t max_sites = kDefaultMaxSites);

/// Shorthand for a single Pauli string such as "XZ" (site 0 first).
OperatorMatrix pauli_string(const std::string& labels, Complex coefficient = 1.0);

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Entrywise test max|A − A†| ≤ rel_tol · max(1, max|A|).
bool is_hermitian(const OperatorMatrix& a, double rel_tol = 1e-12);

/// Largest singular value.
double spectral_norm(const OperatorMatrix& a);

struct Eigensystem {
  Eigen::VectorXd energies;  // ascending
  OperatorMatrix vectors;    // orthonormal columns
};

/// Hermitian eigendecomposition. Each eigenvector is rotated so that its
/// largest-magnitude component (lowest index on ties) is real and positive.
Eigensystem eigendecompose(const OperatorMatrix& h, double hermiticity_tol = 1e-12);

/// Ground state of `h`; throws DegeneracyError when the ground level is
/// degenerate to within `gap_tol` · max(1, ‖h‖).
QuantumState ground_state(const OperatorMatrix& h, double gap_tol = 1e-8);

double fidelity(const QuantumState& a, const QuantumState& b);
double expectation(const OperatorMatrix& op, const QuantumState& psi);

bool is_power_of_two(std::size_t d);
std::size_t sites_for_dimension(std::size_t d);

}  // namespace caffeine
