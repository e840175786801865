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

#include <cmath>
#include <complex>
#include <random>

#include "caffeine/operators.hpp"

namespace caffeine::testing {

inline double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs(const OperatorMatrix& a) { return a.cwiseAbs().maxCoeff(); }

inline OperatorMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  OperatorMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

inline QuantumState random_state(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  QuantumState v(d);
  for (std::size_t i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

inline QuantumState basis(std::size_t d, std::size_t i) {
  QuantumState v = QuantumState::Zero(d);
  v(i) = 1.0;
  return v;
}

}  // namespace caffeine::testing
