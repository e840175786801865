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

#include "caffeine/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "caffeine/errors.hpp"

namespace caffeine {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_site_cap(std::size_t num_sites, std::size_t max_sites) {
  if (max_sites > kHardMaxSites) {
    throw SizeError("site cap " + std::to_string(max_sites) + " exceeds hard limit " +
                    std::to_string(kHardMaxSites));
  }
  if (num_sites > max_sites) {
    throw SizeError("system of " + std::to_string(num_sites) + " sites exceeds cap of " +
                    std::to_string(max_sites) + " (raise max_sites to override)");
  }
}

// Adds coefficient · (Pauli string) into `out` without forming Kronecker products.
// Basis index bit (N-1-site) holds the spin of `site`; 0 is up.
void accumulate_term(const PauliTerm& term, OperatorMatrix& out) {
  const std::size_t n = term.num_sites();
  const std::size_t dim = std::size_t{1} << n;
  std::size_t flip_mask = 0;
  std::size_t z_mask = 0;
  std::size_t y_mask = 0;
  for (const auto& op : term.ops()) {
    const std::size_t bit = std::size_t{1} << (n - 1 - op.site);
    switch (op.label) {
      case Pauli::I:
        break;
      case Pauli::X:
        flip_mask |= bit;
        break;
      case Pauli::Y:
        flip_mask |= bit;
        y_mask |= bit;
        break;
      case Pauli::Z:
        z_mask |= bit;
        break;
    }
  }
  // Y|0> = i|1>, Y|1> = -i|0>: i^{#Y} times (-1)^{#Y acting on 1}.
  const int num_y = std::popcount(y_mask);
  Complex y_phase = 1.0;
  for (int k = 0; k < num_y; ++k) y_phase *= kI;
  const Complex base = term.coefficient() * y_phase;
  for (std::size_t col = 0; col < dim; ++col) {
    const int minus = std::popcount(col & z_mask) + std::popcount(col & y_mask);
    const Complex amp = (minus % 2 == 0) ? base : -base;
    out(static_cast<Eigen::Index>(col ^ flip_mask), static_cast<Eigen::Index>(col)) += amp;
  }
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I:
      return 'I';
    case Pauli::X:
      return 'X';
    case Pauli::Y:
      return 'Y';
    case Pauli::Z:
      return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I':
      return Pauli::I;
    case 'X':
      return Pauli::X;
    case 'Y':
      return Pauli::Y;
    case 'Z':
      return Pauli::Z;
    default:
      throw DomainError(std::string("unknown Pauli label '") + c + "'");
  }
}

OperatorMatrix pauli_matrix(Pauli p) {
  OperatorMatrix m = OperatorMatrix::Zero(2, 2);
  switch (p) {
    case Pauli::I:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

PauliTerm::PauliTerm(Complex coefficient, std::vector<SiteOp> ops, std::size_t num_sites)
    : coefficient_(coefficient), ops_(std::move(ops)), num_sites_(num_sites) {
  if (num_sites_ == 0) throw DomainError("PauliTerm needs at least one site");
  std::vector<bool> seen(num_sites_, false);
  for (const auto& op : ops_) {
    if (op.site >= num_sites_) {
      throw DomainError("site index " + std::to_string(op.site) + " out of range for N=" +
                        std::to_string(num_sites_));
    }
    if (seen[op.site]) throw DomainError("duplicate site index " + std::to_string(op.site));
    seen[op.site] = true;
  }
  std::sort(ops_.begin(), ops_.end(),
            [](const SiteOp& a, const SiteOp& b) { return a.site < b.site; });
}

Pauli PauliTerm::label_at(std::size_t site) const {
  for (const auto& op : ops_) {
    if (op.site == site) return op.label;
  }
  return Pauli::I;
}

bool PauliTerm::is_hermitian() const { return coefficient_.imag() == 0.0; }

std::string PauliTerm::to_string() const {
  std::ostringstream os;
  os << coefficient_ << "*";
  for (std::size_t i = 0; i < num_sites_; ++i) os << to_char(label_at(i));
  return os.str();
}

OperatorSum::OperatorSum(std::size_t num_sites) : num_sites_(num_sites) {
  if (num_sites_ == 0) throw DomainError("OperatorSum needs at least one site");
}

OperatorSum& OperatorSum::add(const PauliTerm& term) {
  if (term.num_sites() != num_sites_) {
    throw DimensionError("term on " + std::to_string(term.num_sites()) +
                         " sites added to sum on " + std::to_string(num_sites_));
  }
  terms_.push_back(term);
  return *this;
}

OperatorSum& OperatorSum::add(Complex coefficient, std::vector<SiteOp> ops) {
  return add(PauliTerm(coefficient, std::move(ops), num_sites_));
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  for (const auto& t : other.terms()) add(t);
  return *this;
}

OperatorSum OperatorSum::scaled(Complex factor) const {
  OperatorSum out(num_sites_);
  for (const auto& t : terms_) out.add(PauliTerm(factor * t.coefficient(), t.ops(), num_sites_));
  return out;
}

OperatorSum operator+(OperatorSum a, const OperatorSum& b) {
  a += b;
  return a;
}

OperatorSum operator*(Complex factor, const OperatorSum& s) { return s.scaled(factor); }

OperatorMatrix materialize(const PauliTerm& term, std::size_t max_sites) {
  check_site_cap(term.num_sites(), max_sites);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << term.num_sites());
  OperatorMatrix out = OperatorMatrix::Zero(dim, dim);
  accumulate_term(term, out);
  return out;
}

OperatorMatrix materialize(const OperatorSum& sum, std::size_t max_sites) {
  check_site_cap(sum.num_sites(), max_sites);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << sum.num_sites());
  OperatorMatrix out = OperatorMatrix::Zero(dim, dim);
  for (const auto& t : sum.terms()) accumulate_term(t, out);
  return out;
}

OperatorMatrix pauli_string(const std::string& labels, Complex coefficient) {
  std::vector<SiteOp> ops;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Pauli p = pauli_from_char(labels[i]);
    if (p != Pauli::I) ops.push_back({i, p});
  }
  return materialize(PauliTerm(coefficient, std::move(ops), labels.size()), kHardMaxSites);
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("commutator of " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  return a * b - b * a;
}

bool is_hermitian(const OperatorMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double spectral_norm(const OperatorMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<OperatorMatrix> svd(a);
  return svd.singularValues()(0);
}

Eigensystem eigendecompose(const OperatorMatrix& h, double hermiticity_tol) {
  if (h.rows() != h.cols()) throw DimensionError("eigendecompose needs a square matrix");
  if (!is_hermitian(h, hermiticity_tol)) {
    throw DomainError("eigendecompose: matrix is not Hermitian within tolerance");
  }
  const OperatorMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: solver failed");
  Eigensystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index n = 0; n < out.vectors.cols(); ++n) {
    auto v = out.vectors.col(n);
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) >= vmax * (1.0 - 1e-10)) {
        pick = i;
        break;
      }
    }
    const Complex phase = std::conj(v(pick)) / std::abs(v(pick));
    v *= phase;
    v(pick) = std::abs(v(pick));
  }
  return out;
}

QuantumState ground_state(const OperatorMatrix& h, double gap_tol) {
  const Eigensystem es = eigendecompose(h);
  const double scale = std::max(1.0, es.energies.cwiseAbs().maxCoeff());
  if (es.energies.size() > 1 && es.energies(1) - es.energies(0) < gap_tol * scale) {
    throw DegeneracyError("ground level is degenerate (gap " +
                          std::to_string(es.energies(1) - es.energies(0)) + ")");
  }
  return es.vectors.col(0);
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.size() != b.size()) throw DimensionError("fidelity of states of different dimension");
  return std::norm(a.dot(b));
}

double expectation(const OperatorMatrix& op, const QuantumState& psi) {
  return psi.dot(op * psi).real();
}

bool is_power_of_two(std::size_t d) { return d != 0 && (d & (d - 1)) == 0; }

std::size_t sites_for_dimension(std::size_t d) {
  if (!is_power_of_two(d)) throw DimensionError("dimension " + std::to_string(d) + " is not 2^N");
  return static_cast<std::size_t>(std::countr_zero(d));
}

}  // namespace caffeine
