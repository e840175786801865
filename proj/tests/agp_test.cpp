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
#include <random>

#include "caffeine/agp.hpp"
#include "caffeine/errors.hpp"
#include "caffeine/models.hpp"
#include "test_util.hpp"

using namespace caffeine;
using caffeine::testing::max_abs;
using caffeine::testing::max_abs_diff;

namespace {

const TwoQubitParams kPair{1.0, 5.0};

OperatorMatrix yx_xy() { return pauli_string("YX") + pauli_string("XY"); }

// Projection coefficient of `a` onto the Pauli string `p` (Hilbert–Schmidt).
Complex pauli_component(const OperatorMatrix& a, const std::string& p) {
  return (pauli_string(p).adjoint() * a).trace() / static_cast<double>(a.rows());
}

}  // namespace

TEST_SUITE("agp") {
  TEST_CASE("commuting derivative gives a zero potential") {
    const OperatorMatrix z = pauli_matrix(Pauli::Z);
    CHECK(max_abs(exact_agp(z, z).matrix) == 0.0);
  }

  TEST_CASE("two-qubit potential at lambda = 1") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const AGPResult a = exact_agp(m.at(1.0), m.derivative(), 1.0);
    const double prefactor = kPair.coupling * kPair.field / (2.0 * kPair.coupling * kPair.coupling);
    CHECK(prefactor == 2.5);
    CHECK(two_qubit_agp_prefactor(kPair, 1.0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(max_abs_diff(a.matrix, prefactor * yx_xy()) < 1e-10);
    CHECK(max_abs_diff(analytical_two_qubit_agp(kPair, 1.0).matrix, prefactor * yx_xy()) < 1e-14);
  }

  TEST_CASE("two-qubit potential at lambda = 0.5") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const double J = kPair.coupling, hz = kPair.field;
    const double prefactor = J * hz / (2.0 * (J * J + hz * hz));
    CHECK(two_qubit_agp_prefactor(kPair, 0.5) == doctest::Approx(prefactor).epsilon(1e-15));
    CHECK(max_abs_diff(exact_agp(m.at(0.5), m.derivative()).matrix, prefactor * yx_xy()) < 1e-10);
  }

  TEST_CASE("analytical potential limits and agreement") {
    CHECK(std::abs(two_qubit_agp_prefactor(kPair, -1e8)) < 1e-15);
    const ParametricHamiltonian m = two_qubit_model(kPair);
    for (int i = 0; i < 25; ++i) {
      const double l = i / 24.0;
      const OperatorMatrix exact = exact_agp(m.at(l), m.derivative(), l).matrix;
      CHECK(max_abs_diff(exact, analytical_two_qubit_agp(kPair, l).matrix) <= 1e-8);
    }
  }

  TEST_CASE("defining identity, hermiticity and trace on random pairs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t d = std::size_t{2} << (trial % 4);
      const OperatorMatrix h = caffeine::testing::random_hermitian(d, rng);
      const OperatorMatrix dh = caffeine::testing::random_hermitian(d, rng);
      const OperatorMatrix a = exact_agp(h, dh).matrix;
      const Eigensystem es = eigendecompose(h);
      const OperatorMatrix dh_e = es.vectors.adjoint() * dh * es.vectors;
      const OperatorMatrix a_e = es.vectors.adjoint() * a * es.vectors;
      double worst = 0.0;
      for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t n = 0; n < d; ++n) {
          if (m == n) continue;
          const Complex r =
              dh_e(m, n) - Complex(0, 1) * (es.energies(m) - es.energies(n)) * a_e(m, n);
          worst = std::max(worst, std::abs(r));
        }
        CHECK(std::abs(a_e(m, m)) < 1e-10);
      }
      CHECK(worst <= 1e-8 * spectral_norm(dh));
      CHECK(is_hermitian(a, 1e-12));
      CHECK(std::abs(a.trace()) < 1e-10);
    }
  }

  TEST_CASE("degenerate levels") {
    OperatorMatrix h = OperatorMatrix::Zero(4, 4);
    h.diagonal() << -1.0, -1.0, 0.5, 2.0;
    OperatorMatrix coupled = OperatorMatrix::Zero(4, 4);
    coupled(0, 1) = coupled(1, 0) = 1.0;
    CHECK_THROWS_AS(exact_agp(h, coupled), DegeneracyError);
    OperatorMatrix uncoupled = OperatorMatrix::Zero(4, 4);
    uncoupled(0, 2) = uncoupled(2, 0) = 1.0;
    const OperatorMatrix a = exact_agp(h, uncoupled).matrix;
    CHECK(std::abs(a(0, 1)) == 0.0);
    CHECK(std::abs(a(0, 2) - Complex(0, -1) / (-1.5)) < 1e-14);
  }

  TEST_CASE("commutator ansatz") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    const OperatorMatrix h = m.at(0.5), dh = m.derivative();
    CHECK(max_abs(commutator_ansatz_agp(h, dh, {{0.0, 0.0}})) == 0.0);
    const OperatorMatrix one = commutator_ansatz_agp(h, dh, {{0.3}});
    CHECK(max_abs_diff(one, Complex(0, 0.3) * commutator(h, dh)) < 1e-14);
    CHECK(max_abs_diff(nested_commutator(h, dh, 3),
                       commutator(h, commutator(h, commutator(h, dh)))) < 1e-10);

    const AnsatzFit fit = fit_ansatz_coefficients(h, dh, 1);
    CHECK(fit.residual < 1e-8);
    CHECK(max_abs_diff(commutator_ansatz_agp(h, dh, fit.coefficients), exact_agp(h, dh).matrix) <
          1e-8);

    std::mt19937_64 rng(5);
    const OperatorMatrix r = caffeine::testing::random_hermitian(8, rng);
    const OperatorMatrix r2 = caffeine::testing::random_hermitian(8, rng);
    const OperatorMatrix ans = commutator_ansatz_agp(r, r2, {{0.7, -0.2, 0.05}});
    const Eigensystem es = eigendecompose(r);
    const OperatorMatrix in_basis = es.vectors.adjoint() * ans * es.vectors;
    CHECK(in_basis.diagonal().cwiseAbs().maxCoeff() < 1e-10 * max_abs(ans));
  }

  TEST_CASE("ansatz cutoff structure") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    for (double l : {0.1, 0.37, 0.5, 0.83}) {
      CHECK(fit_ansatz_coefficients(m.at(l), m.derivative(), 1).residual <= 1e-8);
    }
    const OperatorMatrix zz = pauli_string("ZZ");
    const OperatorMatrix gx = pauli_string("XI") + 0.6 * pauli_string("IX");
    const ParametricHamiltonian chain("chain", -zz, -gx, -gx, 1.0);
    for (double l : {0.3, 0.61}) {
      const OperatorMatrix h = chain.at(l), dh = chain.derivative();
      CHECK(fit_ansatz_coefficients(h, dh, 1).residual > 1e-3);
      CHECK(fit_ansatz_coefficients(h, dh, 2).residual <= 1e-8);
    }
    // Annealing family: parity keeps k=1 exact without a longitudinal field; the symmetric
    // triplet with one needs three gaps.
    const ParametricHamiltonian flat = anneal_family(ising_model(IsingParams::uniform(2)));
    CHECK(fit_ansatz_coefficients(flat.at(0.4), flat.derivative(), 1).residual <= 1e-8);
    IsingParams biased = IsingParams::uniform(2);
    for (double& f : biased.fields) f = 0.3;
    const ParametricHamiltonian tilted = anneal_family(ising_model(biased));
    for (double l : {0.3, 0.61}) {
      const OperatorMatrix h = tilted.at(l), dh = tilted.derivative();
      CHECK(fit_ansatz_coefficients(h, dh, 2).residual > 1e-6);
      CHECK(fit_ansatz_coefficients(h, dh, 3).residual <= 1e-8);
    }
    std::mt19937_64 rng(9);
    const OperatorMatrix h = caffeine::testing::random_hermitian(4, rng);
    const AnsatzFit fit = fit_ansatz_coefficients(h, 0.7 * h, 2);
    CHECK(fit.residual == doctest::Approx(0.0));
    for (double a : fit.coefficients.alphas) CHECK(a == 0.0);
  }

  TEST_CASE("two-qubit operator content is YX + XY") {
    const ParametricHamiltonian m = two_qubit_model(kPair);
    for (double l : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const OperatorMatrix a = exact_agp(m.at(l), m.derivative()).matrix;
      const Complex cyx = pauli_component(a, "YX"), cxy = pauli_component(a, "XY");
      const OperatorMatrix rest = a - cyx * pauli_string("YX") - cxy * pauli_string("XY");
      CHECK(max_abs(rest) < 1e-8);
      CHECK(std::abs(pauli_component(a, "YZ")) < 1e-12);
      CHECK(std::abs(pauli_component(a, "ZY")) < 1e-12);
    }
  }

  TEST_CASE("beta to alpha conversion") {
    const BetaAlphaCalibration cal = calibrate_two_qubit(kPair, 0.5);
    REQUIRE(cal.constants.size() == 1);
    CHECK(cal.constants[0] == doctest::Approx(-1.0 / (2.0 * kPair.field)).epsilon(1e-8));

    PiecewiseBeta zero(1, 3, 0.1);
    CHECK(betas_to_alphas(zero, 2, cal).alphas == std::vector<double>{0.0});

    const ParametricHamiltonian m = two_qubit_model(kPair);
    PiecewiseBeta b(1, 1, 0.1);
    b.set(1, 1, analytical_beta1(kPair, 0.5));
    const double alpha = betas_to_alphas(b, 1, cal).alphas[0];
    const double fitted = fit_ansatz_coefficients(m.at(0.5), m.derivative(), 1)
                              .coefficients.alphas[0];
    CHECK(alpha == doctest::Approx(fitted).epsilon(1e-10));

    for (double beta : {-2.3, 0.0, 0.4, 1.7}) {
      PiecewiseBeta t(1, 1, 0.1);
      t.set(1, 1, beta);
      const std::vector<double> back = alphas_to_betas(betas_to_alphas(t, 1, cal), cal);
      CHECK(std::abs(back[0] - beta) <= 1e-12);
    }

    PiecewiseBeta two(2, 1, 0.1);
    CHECK_THROWS_AS(betas_to_alphas(two, 1, cal), UnsupportedError);
    CHECK_THROWS_AS(betas_to_alphas(zero, 4, cal), DomainError);
  }
}
