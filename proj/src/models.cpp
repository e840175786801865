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

#include "caffeine/models.hpp"

#include <cmath>

#include "caffeine/errors.hpp"

namespace caffeine {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda " + std::to_string(lambda) + " outside [0, 1]");
  }
}

OperatorSum z_field(std::size_t n, double coefficient) {
  OperatorSum s(n);
  for (std::size_t i = 0; i < n; ++i) s.add(coefficient, {{i, Pauli::Z}});
  return s;
}

}  // namespace

OperatorMatrix hamiltonian_at(const AnnealSpec& spec, double lambda, std::size_t max_sites) {
  check_lambda(lambda);
  if (spec.mixer.num_sites() != spec.problem.num_sites()) {
    throw DimensionError("mixer and problem Hamiltonians act on different site counts");
  }
  return (1.0 - lambda) * materialize(spec.mixer, max_sites) +
         lambda * materialize(spec.problem, max_sites);
}

IsingParams IsingParams::uniform(std::size_t n, double coupling, Boundary boundary) {
  IsingParams p;
  p.num_sites = n;
  p.boundary = boundary;
  const std::size_t bonds = boundary == Boundary::open ? n - 1 : n;
  p.couplings.assign(bonds, coupling);
  p.fields.assign(n, 0.0);
  return p;
}

AnnealSpec ising_model(const IsingParams& p) {
  const std::size_t n = p.num_sites;
  if (n < 2) throw DomainError("Ising chain needs at least two sites");
  const std::size_t bonds = p.boundary == Boundary::open ? n - 1 : n;
  if (p.couplings.size() != bonds) {
    throw DimensionError("expected " + std::to_string(bonds) + " couplings, got " +
                         std::to_string(p.couplings.size()));
  }
  if (p.fields.size() != n) {
    throw DimensionError("expected " + std::to_string(n) + " fields, got " +
                         std::to_string(p.fields.size()));
  }
  if (p.boundary == Boundary::periodic && n < 3) {
    throw DomainError("periodic chain needs at least three sites");
  }
  OperatorSum mixer(n);
  for (std::size_t i = 0; i < n; ++i) mixer.add(-1.0, {{i, Pauli::X}});
  OperatorSum problem(n);
  for (std::size_t b = 0; b < bonds; ++b) {
    problem.add(-p.couplings[b], {{b, Pauli::Z}, {(b + 1) % n, Pauli::Z}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p.fields[i] != 0.0) problem.add(p.fields[i], {{i, Pauli::Z}});
  }
  return {std::move(mixer), std::move(problem)};
}

OperatorMatrix control_term_at(const ControlTermSpec& spec, double t) {
  if (!(t >= 0.0 && t <= spec.tau)) throw DomainError("control term evaluated outside [0, tau]");
  double amplitude = 0.0;
  for (std::size_t k = 1; k <= spec.gammas.size(); ++k) {
    amplitude += spec.gammas[k - 1] * std::sin(2.0 * M_PI * static_cast<double>(k) * t / spec.tau);
  }
  return materialize(z_field(spec.num_sites, amplitude * spec.omega0));
}

ParametricHamiltonian::ParametricHamiltonian(std::string name, OperatorMatrix at_zero,
                                             OperatorMatrix derivative, OperatorMatrix drive,
                                             double drive_scale)
    : name_(std::move(name)),
      at_zero_(std::move(at_zero)),
      derivative_(std::move(derivative)),
      drive_(std::move(drive)),
      drive_scale_(drive_scale) {
  if (at_zero_.rows() != derivative_.rows() || at_zero_.rows() != drive_.rows()) {
    throw DimensionError("parametric Hamiltonian parts differ in dimension");
  }
  sites_for_dimension(static_cast<std::size_t>(at_zero_.rows()));
}

OperatorMatrix ParametricHamiltonian::at(double lambda) const {
  check_lambda(lambda);
  return at_unchecked(lambda);
}

OperatorMatrix ParametricHamiltonian::at_unchecked(double lambda) const {
  return at_zero_ + lambda * derivative_;
}

ParametricHamiltonian two_qubit_model(const TwoQubitParams& p) {
  if (!(p.coupling > 0.0)) throw DomainError("two-qubit coupling J must be positive");
  OperatorSum coupling(2);
  coupling.add(-p.coupling, {{0, Pauli::X}, {1, Pauli::X}});
  coupling.add(-p.coupling, {{0, Pauli::Z}, {1, Pauli::Z}});
  const OperatorMatrix zsum = materialize(z_field(2, 1.0));
  OperatorMatrix at_zero = materialize(coupling) - p.field * zsum;
  OperatorMatrix derivative = p.field * zsum;
  const double kappa = p.field != 0.0 ? -1.0 / p.field : -1.0;
  return {"two_qubit", std::move(at_zero), std::move(derivative), -zsum, kappa};
}

ParametricHamiltonian anneal_family(const AnnealSpec& spec, std::size_t max_sites) {
  const OperatorMatrix hm = materialize(spec.mixer, max_sites);
  const OperatorMatrix hp = materialize(spec.problem, max_sites);
  OperatorMatrix derivative = hp - hm;
  OperatorMatrix drive = derivative;
  return {"anneal", hm, std::move(derivative), std::move(drive), 1.0};
}

QuantumState bell_state() {
  QuantumState psi = QuantumState::Zero(4);
  psi(0) = M_SQRT1_2;
  psi(3) = M_SQRT1_2;
  return psi;
}

}  // namespace caffeine
