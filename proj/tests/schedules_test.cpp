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

#include "caffeine/errors.hpp"
#include "caffeine/schedules.hpp"

using namespace caffeine;

TEST_SUITE("schedules") {
  const Schedule smooth{ScheduleKind::smooth, 0.1};
  const Schedule linear{ScheduleKind::linear, 0.1};

  TEST_CASE("lambda values") {
    CHECK(lambda_at(smooth, 0.0) == 0.0);
    CHECK(lambda_at(smooth, smooth.tau) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lambda_at(smooth, smooth.tau / 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lambda_at(linear, 0.3 * linear.tau) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(lambda_at(smooth, -1e-3), DomainError);
    CHECK_THROWS_AS(lambda_at(smooth, 0.2), DomainError);
  }

  TEST_CASE("lambda derivative") {
    CHECK(lambda_dot_at(smooth, 0.0) == 0.0);
    CHECK(std::abs(lambda_dot_at(smooth, smooth.tau)) < 1e-12);
    for (double f : {0.0, 0.25, 0.5, 1.0}) {
      CHECK(lambda_dot_at(linear, f * linear.tau) == doctest::Approx(1.0 / linear.tau));
    }
    const double t = 0.37 * smooth.tau, h = 1e-6 * smooth.tau;
    const double fd = (lambda_at(smooth, t + h) - lambda_at(smooth, t - h)) / (2.0 * h);
    CHECK(std::abs(fd - lambda_dot_at(smooth, t)) <= 1e-6 * std::abs(fd));
  }

  TEST_CASE("integral of lambda-dot is one") {
    for (const Schedule& s : {smooth, linear}) {
      constexpr int n = 2000;
      const double h = s.tau / n;
      double sum = lambda_dot_at(s, 0.0) + lambda_dot_at(s, s.tau);
      for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * lambda_dot_at(s, i * h);
      CHECK(std::abs(sum * h / 3.0 - 1.0) < 1e-8);
    }
  }

  TEST_CASE("smooth schedule is monotone") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, smooth.tau);
    for (int i = 0; i < 1000; ++i) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      CHECK(lambda_at(smooth, b) >= lambda_at(smooth, a));
    }
  }

  TEST_CASE("piecewise beta lookup") {
    PiecewiseBeta one(2, 1, 0.1);
    one.set(1, 1, -2.0);
    one.set(2, 1, 0.5);
    for (double t : {0.0, 0.03, 0.1}) {
      CHECK(beta_at(one, 1, t) == -2.0);
      CHECK(beta_at(one, 2, t) == 0.5);
    }

    PiecewiseBeta two(1, 2, 0.1);
    two.set(1, 1, 1.0);
    two.set(1, 2, 2.0);
    CHECK(beta_at(two, 1, std::nextafter(0.05, 0.0)) == 1.0);
    CHECK(beta_at(two, 1, 0.05) == 2.0);
    CHECK(beta_at(two, 1, 0.1) == 2.0);

    PiecewiseBeta twelve(1, 12, 0.1);
    for (std::size_t j = 1; j <= 12; ++j) twelve.set(1, j, 0.1 * static_cast<double>(j));
    CHECK(beta_at(twelve, 1, 0.099) == twelve.value(1, 12));
    CHECK(twelve.segment_of(0.1) == 12);
    for (std::size_t j = 1; j <= 12; ++j) {
      for (double f : {0.0, 0.3, 0.999}) {
        const double t = twelve.segment_start(j) + f * twelve.segment_length();
        if (twelve.segment_of(t) == j) CHECK(beta_at(twelve, 1, t) == twelve.value(1, j));
      }
    }

    CHECK_THROWS_AS(beta_at(two, 2, 0.01), DomainError);
    CHECK_THROWS_AS(beta_at(two, 0, 0.01), DomainError);
    CHECK_THROWS_AS(beta_at(two, 1, 0.2), DomainError);
  }

  TEST_CASE("bounds and flat layout") {
    PiecewiseBeta b(2, 3, 0.1, 0.0, 1.0);
    CHECK_THROWS_AS(b.set(1, 1, 1.5), DomainError);
    Eigen::VectorXd flat(6);
    flat << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    const PiecewiseBeta f = PiecewiseBeta::from_flat(2, 3, 0.1, flat, 0.0, 1.0);
    CHECK(f.value(1, 1) == 0.1);
    CHECK(f.value(2, 1) == 0.2);
    CHECK(f.value(1, 2) == 0.3);
    CHECK(f.value(2, 3) == 0.6);
    CHECK(f.flat() == flat);
    CHECK_THROWS_AS(PiecewiseBeta::from_flat(2, 2, 0.1, flat, 0.0, 1.0), DimensionError);
    CHECK_THROWS_AS(schedule_kind_from_string("cubic"), ConfigError);
  }
}
