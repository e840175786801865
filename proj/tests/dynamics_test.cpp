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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "caffeine/agp.hpp"
#include "caffeine/dynamics.hpp"
#include "caffeine/errors.hpp"
#include "caffeine/models.hpp"
#include "test_util.hpp"

using namespace caffeine;
using caffeine::testing::max_abs_diff;

namespace {

const TwoQubitParams kPair{1.0, 5.0};
const Schedule kSmooth{ScheduleKind::smooth, 0.1};
const Schedule kLinear{ScheduleKind::linear, 0.1};

double omega0() { return FloquetDriveSpec::default_omega0(kSmooth.tau); }

TimeDependentHamiltonian gamma_drive(double gamma) {
  ControlTermSpec c;
  c.gammas = {gamma};
  c.tau = kSmooth.tau;
  c.omega0 = omega0();
  c.num_sites = 2;
  return controlled_hamiltonian(two_qubit_model(kPair), kSmooth, c);
}

QuantumState initial() { return ground_state(two_qubit_model(kPair).at(0.0)); }

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("stationary state picks up a phase") {
    const OperatorMatrix z = pauli_matrix(Pauli::Z);
    const TimeDependentHamiltonian h({z}, [](double, std::size_t, std::span<double> c) { c[0] = 1.0; });
    const QuantumState up = caffeine::testing::basis(2, 0);
    for (Integrator m : {Integrator::dop853, Integrator::dp54, Integrator::magnus4}) {
      PropagatorConfig cfg;
      cfg.method = m;
      cfg.max_step = 0.01;
      const double t = 1.7;
      const PropagationResult r = propagate(h, up, 0.0, t, cfg);
      CHECK(std::abs(r.state(0) - std::exp(Complex(0, -t))) < 1e-9);
      CHECK(fidelity(r.state, up) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("unassisted anneal infidelity") {
    const PropagationResult r =
        propagate(bare_hamiltonian(two_qubit_model(kPair), kSmooth), initial(), 0.0, kSmooth.tau, {});
    CHECK(1.0 - fidelity(r.state, bell_state()) == doctest::Approx(0.448).epsilon(0.005 / 0.448));
  }

  TEST_CASE("exact CD keeps the instantaneous ground state") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const std::vector<double> samples = uniform_samples(0.0, kSmooth.tau, 100);
    const PropagationResult r =
        propagate(cd_hamiltonian(m, kSmooth, exact_agp_provider(m)), initial(), 0.0, kSmooth.tau,
                  {}, samples);
    REQUIRE(r.trajectory);
    for (const FidelitySample& s : instantaneous_fidelity_series(*r.trajectory, m, kSmooth)) {
      CHECK(s.fidelity >= 1.0 - 1e-6);
      CHECK(s.level == 0);
    }
  }

  TEST_CASE("unassisted final instantaneous fidelity sits near the frozen overlap") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    CHECK(fidelity(caffeine::testing::basis(4, 0), bell_state()) ==
          doctest::Approx(0.5).epsilon(1e-14));
    const double frozen = fidelity(initial(), bell_state());
    CHECK(std::abs(frozen - 0.5) < 0.06);
    const std::vector<double> samples = uniform_samples(0.0, kSmooth.tau, 50);
    const PropagationResult r =
        propagate(bare_hamiltonian(m, kSmooth), initial(), 0.0, kSmooth.tau, {}, samples);
    const auto series = instantaneous_fidelity_series(*r.trajectory, m, kSmooth);
    CHECK(series.front().fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(series.back().fidelity - frozen) < 0.06);
    CHECK(series.back().fidelity == doctest::Approx(fidelity(r.state, bell_state())).epsilon(1e-10));
  }

  TEST_CASE("CD assembly") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const AgpProvider agp = exact_agp_provider(m);
    CHECK(max_abs_diff(assemble_cd_hamiltonian(m, kSmooth, agp, 0.0), m.at(0.0)) == 0.0);
    CHECK(max_abs_diff(assemble_cd_hamiltonian(m, kSmooth, agp, kSmooth.tau), m.at(1.0)) < 1e-12);
    const double t = kSmooth.tau / 2;
    const OperatorMatrix h = assemble_cd_hamiltonian(m, kSmooth, agp, t);
    CHECK(is_hermitian(h, 1e-12));
    const double lambda = lambda_at(kSmooth, t);
    CHECK(spectral_norm(h - m.at(lambda)) ==
          doctest::Approx(lambda_dot_at(kSmooth, t) * spectral_norm(agp(lambda))).epsilon(1e-12));
    CHECK_THROWS_AS(assemble_cd_hamiltonian(m, kSmooth, agp, 2 * kSmooth.tau), DomainError);
  }

  TEST_CASE("Floquet assembly") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const double w0 = omega0(), w = 1000.0 * w0;

    PiecewiseBeta zero(2, 1, kSmooth.tau);
    const FloquetDriveSpec bare = FloquetDriveSpec::piecewise(w, w0, zero);
    const double t0 = 0.0371;
    const OperatorMatrix at_t0 = assemble_floquet_hamiltonian(m, kSmooth, bare, t0);
    const double lambda0 = lambda_at(kSmooth, t0);
    CHECK(max_abs_diff(at_t0, (1.0 + (w / w0) * std::cos(w * t0)) * m.at(lambda0)) < 1e-9);

    // Over one period the drive averages out; on a linear ramp the residue is O(1/n).
    const double period = 2.0 * std::numbers::pi / w;
    constexpr int n = 4000;
    OperatorMatrix avg = OperatorMatrix::Zero(4, 4);
    for (int i = 0; i < n; ++i) {
      avg += assemble_floquet_hamiltonian(m, kLinear, bare, t0 + period * i / n) / double(n);
    }
    const OperatorMatrix mid = m.at(lambda_at(kLinear, t0 + period / 2));
    CHECK(max_abs_diff(avg, mid) < 1e-3 * spectral_norm(mid));

    PiecewiseBeta b(2, 1, kLinear.tau);
    b.set(1, 1, 1.3);
    b.set(2, 1, -0.7);
    const FloquetDriveSpec driven = FloquetDriveSpec::piecewise(w, w0, b);
    CHECK(max_abs_diff(assemble_floquet_hamiltonian(m, kLinear, driven, 0.0),
                       (1.0 + w / w0) * m.at(0.0)) < 1e-9);
    const OperatorMatrix end = assemble_floquet_hamiltonian(m, kSmooth, driven, kSmooth.tau);
    CHECK(max_abs_diff(end, (1.0 + (w / w0) * std::cos(w * kSmooth.tau)) * m.at(1.0)) < 1e-9);

    const double t = 0.023;
    const double lam = lambda_at(kLinear, t);
    const OperatorMatrix expected =
        (1.0 + (w / w0) * std::cos(w * t)) * m.at(lam) +
        lambda_dot_at(kLinear, t) * w0 * (1.3 * std::sin(w * t) - 0.7 * std::sin(3 * w * t)) *
            m.drive();
    CHECK(max_abs_diff(assemble_floquet_hamiltonian(m, kLinear, driven, t), expected) < 1e-8);
  }

  TEST_CASE("Floquet drive validation") {
    const double w0 = omega0();
    PiecewiseBeta b(1, 1, kSmooth.tau);
    CHECK_THROWS(FloquetDriveSpec::piecewise(10.0 * w0, w0, b).validate(kSmooth.tau));
    CHECK_NOTHROW(FloquetDriveSpec::piecewise(1000.0 * w0, w0, b).validate(kSmooth.tau));
  }

  TEST_CASE("controlled assembly") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    ControlTermSpec c;
    c.gammas = {0.0, 0.0};
    c.tau = kSmooth.tau;
    c.omega0 = omega0();
    for (double t : {0.0, 0.031, 0.07}) {
      CHECK(max_abs_diff(assemble_controlled_hamiltonian(m, kSmooth, c, t),
                         m.at(lambda_at(kSmooth, t))) == 0.0);
    }
    c.gammas = {0.4, -0.9};
    CHECK(max_abs_diff(assemble_controlled_hamiltonian(m, kSmooth, c, 0.0), m.at(0.0)) == 0.0);

    const PropagationResult r = propagate(gamma_drive(0.22), initial(), 0.0, kSmooth.tau, {});
    CHECK(1.0 - fidelity(r.state, bell_state()) == doctest::Approx(0.397).epsilon(0.01 / 0.397));
  }

  TEST_CASE("norm conservation on sampled trajectories") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    PiecewiseBeta b(1, 2, kSmooth.tau);
    b.set(1, 1, -1.6);
    b.set(1, 2, 2.9);
    const FloquetDriveSpec drive = FloquetDriveSpec::piecewise(500.0 * omega0(), omega0(), b);
    const std::vector<double> samples = uniform_samples(0.0, kSmooth.tau, 200);
    const PropagationResult r =
        propagate(floquet_hamiltonian(m, kSmooth, drive), initial(), 0.0, kSmooth.tau, {}, samples);
    REQUIRE(r.trajectory);
    CHECK(r.trajectory->times.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CHECK(std::abs(r.trajectory->states[i].norm() - 1.0) <= 1e-9);
    }
    CHECK(r.max_norm_drift <= 1e-9);
  }

  TEST_CASE("propagation is linear") {
    std::mt19937_64 rng(17);
    const TimeDependentHamiltonian h = gamma_drive(0.3);
    const QuantumState a = caffeine::testing::random_state(4, rng);
    const QuantumState b = caffeine::testing::random_state(4, rng);
    const Complex ca(0.6, 0.2), cb(-0.3, 0.7);
    QuantumState mix = ca * a + cb * b;
    const double norm = mix.norm();
    mix /= norm;
    PropagatorConfig cfg;
    cfg.method = Integrator::magnus4;
    cfg.fixed_step = kSmooth.tau / 400;
    const QuantumState pa = propagate(h, a, 0.0, kSmooth.tau, cfg).state;
    const QuantumState pb = propagate(h, b, 0.0, kSmooth.tau, cfg).state;
    const QuantumState pm = propagate(h, mix, 0.0, kSmooth.tau, cfg).state;
    CHECK((pm * norm - (ca * pa + cb * pb)).norm() < 1e-8);
  }

  TEST_CASE("fixed-step order is at least four") {
    const TimeDependentHamiltonian h = gamma_drive(0.22);
    PropagatorConfig ref;
    ref.rel_tol = 1e-13;
    ref.abs_tol = 1e-15;
    const QuantumState exact = propagate(h, initial(), 0.0, kSmooth.tau, ref).state;
    std::vector<double> errors;
    for (int steps : {10, 20, 40}) {
      PropagatorConfig cfg;
      cfg.method = Integrator::magnus4;
      cfg.fixed_step = kSmooth.tau / steps;
      errors.push_back((propagate(h, initial(), 0.0, kSmooth.tau, cfg).state - exact).norm());
    }
    const double p1 = std::log2(errors[0] / errors[1]);
    const double p2 = std::log2(errors[1] / errors[2]);
    MESSAGE("observed orders " << p1 << ", " << p2);
    CHECK(p1 >= 3.9);
    CHECK(p2 >= 3.9);
  }

  TEST_CASE("independent integrators agree on a Floquet drive") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    PiecewiseBeta b(1, 2, kSmooth.tau);
    b.set(1, 1, -1.617);
    b.set(1, 2, 2.976);
    const TimeDependentHamiltonian h =
        floquet_hamiltonian(m, kSmooth, FloquetDriveSpec::piecewise(200.0 * omega0(), omega0(), b));
    const QuantumState a = propagate(h, initial(), 0.0, kSmooth.tau, {}).state;
    PropagatorConfig mag;
    mag.method = Integrator::magnus4;
    mag.min_steps_per_oscillation = 80;
    const QuantumState c = propagate(h, initial(), 0.0, kSmooth.tau, mag).state;
    CHECK(1.0 - fidelity(a, c) <= 1e-8);
  }

  TEST_CASE("self check reports a tiny tolerance sensitivity") {
    PropagatorConfig cfg;
    cfg.self_check = true;
    const PropagationResult r = propagate(gamma_drive(0.1), initial(), 0.0, kSmooth.tau, cfg);
    REQUIRE(r.self_check_delta);
    CHECK(*r.self_check_delta < 1e-10);
  }

  TEST_CASE("step budget exhaustion raises a numerical error with diagnostics") {
    PropagatorConfig cfg;
    cfg.max_steps = 3;
    try {
      propagate(gamma_drive(0.1), initial(), 0.0, kSmooth.tau, cfg);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(!e.diagnostics().empty());
    }
  }

  TEST_CASE("breakpoints are respected") {
    // A coefficient that jumps at t=0.5: integrating across it blindly loses accuracy.
    const OperatorMatrix x = pauli_matrix(Pauli::X);
    TimeDependentHamiltonian h({x}, [](double, std::size_t piece, std::span<double> c) {
      c[0] = piece == 0 ? 1.0 : -2.0;
    });
    h.breakpoints = {0.5};
    const QuantumState up = caffeine::testing::basis(2, 0);
    const QuantumState out = propagate(h, up, 0.0, 1.0, {}).state;
    // exp(-i·(−2·0.5)X)·exp(-i·0.5X) = exp(+0.5iX)
    const QuantumState expected(QuantumState{{std::cos(0.5), Complex(0, std::sin(0.5))}});
    CHECK((out - expected).norm() < 1e-10);
  }
}
