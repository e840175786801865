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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "caffeine/cost.hpp"
#include "caffeine/errors.hpp"
#include "caffeine/optimize.hpp"
#include "test_util.hpp"

using namespace caffeine;

namespace {

double bowl(const Eigen::VectorXd& x) { return (x.array() - 0.3).square().sum(); }

DualAnnealingConfig small(std::uint64_t seed, std::size_t evals = 4000) {
  DualAnnealingConfig c;
  c.rng_seed = seed;
  c.max_function_evals = evals;
  c.max_global_iterations = 200;
  return c;
}

ExperimentContext two_qubit_context(ControlKind control, double omega_multiplier = 200.0) {
  ExperimentContext ctx(two_qubit_model({1.0, 5.0}), Schedule{ScheduleKind::smooth, 0.1});
  ctx.control = control;
  ctx.omega0 = FloquetDriveSpec::default_omega0(0.1);
  ctx.omega = omega_multiplier * ctx.omega0;
  ctx.initial_state = ground_state(ctx.model.at(0.0));
  return ctx;
}

int gradient_sign_changes(const LandscapeTable& t) {
  int changes = 0;
  double prev = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double g = t.rows[i].cost - t.rows[i - 1].cost;
    if (g != 0.0 && prev != 0.0 && (g > 0) != (prev > 0)) ++changes;
    if (g != 0.0) prev = g;
  }
  return changes;
}

}  // namespace

TEST_SUITE("optimize") {
  TEST_CASE("convex bowl") {
    const OptimizationResult r = dual_anneal(bowl, Bounds::uniform(4, -1.0, 1.0), small(1234));
    CHECK(r.best_cost < 1e-8);
    CHECK(r.best_params.size() == 4);
    CHECK(Bounds::uniform(4, -1.0, 1.0).contains(r.best_params));
  }

  TEST_CASE("convex bowl across ten seeds") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const OptimizationResult r = dual_anneal(bowl, Bounds::uniform(4, -1.0, 1.0), small(seed));
      CHECK(r.best_cost < 1e-6);
      CHECK(r.seed == seed);
    }
  }

  TEST_CASE("determinism, budget and monotone best-so-far") {
    const Objective rastrigin = [](const Eigen::VectorXd& x) {
      return 10.0 * x.size() +
             (x.array().square() - 10.0 * (2.0 * std::numbers::pi * x.array()).cos()).sum();
    };
    const Bounds b = Bounds::uniform(3, -5.12, 5.12);
    const OptimizationResult a = dual_anneal(rastrigin, b, small(99, 1500));
    const OptimizationResult c = dual_anneal(rastrigin, b, small(99, 1500));
    CHECK(a.best_params == c.best_params);
    CHECK(a.best_cost == c.best_cost);
    CHECK(a.cost_trace == c.cost_trace);
    CHECK(a.evaluation_count == c.evaluation_count);
    CHECK(a.evaluation_count <= 1500);
    CHECK(a.cost_trace.size() == a.evaluation_count);
    double running = std::numeric_limits<double>::infinity();
    std::vector<double> best_so_far;
    for (double v : a.cost_trace) best_so_far.push_back(running = std::min(running, v));
    CHECK(std::is_sorted(best_so_far.rbegin(), best_so_far.rend()));
    CHECK(best_so_far.back() == a.best_cost);
    CHECK(a.termination_reason == TerminationReason::budget_exhausted);
    const OptimizationResult d = dual_anneal(rastrigin, b, small(100, 1500));
    CHECK(d.cost_trace != a.cost_trace);
  }

  TEST_CASE("target cost and abort") {
    DualAnnealingConfig c = small(5);
    c.target_cost = 1e-3;
    const OptimizationResult r = dual_anneal(bowl, Bounds::uniform(2, -1.0, 1.0), c);
    CHECK(r.termination_reason == TerminationReason::converged);
    CHECK(r.best_cost <= 1e-3);

    std::atomic<bool> stop{true};
    c = small(5);
    c.abort_flag = &stop;
    CHECK(dual_anneal(bowl, Bounds::uniform(2, -1.0, 1.0), c).termination_reason ==
          TerminationReason::user_abort);
  }

  TEST_CASE("non-finite costs") {
    const Objective holes = [](const Eigen::VectorXd& x) {
      return x(0) > 0.5 ? std::numeric_limits<double>::quiet_NaN() : bowl(x);
    };
    const OptimizationResult r = dual_anneal(holes, Bounds::uniform(2, -1.0, 1.0), small(3, 2000));
    CHECK(std::isfinite(r.best_cost));
    CHECK(r.nonfinite_evaluations > 0);
    for (double v : r.cost_trace) CHECK(!std::isnan(v));

    const Objective never = [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(dual_anneal(never, Bounds::uniform(2, -1.0, 1.0), small(3, 200)), NumericalError);
  }

  TEST_CASE("invalid configuration") {
    DualAnnealingConfig c;
    c.max_function_evals = 0;
    CHECK_THROWS(c.validate());
    CHECK_THROWS(dual_anneal(bowl, Bounds::uniform(2, -1.0, 1.0), c));
    CHECK_THROWS(Bounds({{1.0, -1.0}}));
  }

  TEST_CASE("bounded Nelder-Mead stays inside the box") {
    const Objective shifted = [](const Eigen::VectorXd& x) { return (x.array() - 2.0).square().sum(); };
    const LocalSearchResult r =
        nelder_mead(shifted, Bounds::uniform(2, -1.0, 1.0), Eigen::VectorXd::Zero(2), 400);
    CHECK(r.evaluations <= 400);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("landscape scan") {
    const LandscapeTable flat =
        landscape_scan([](const Eigen::VectorXd&) { return 0.25; }, {linspace(0, 1, 5), linspace(-1, 1, 3)});
    CHECK(flat.rows.size() == 15);
    for (const auto& row : flat.rows) CHECK(row.cost == 0.25);
    CHECK(flat.rows[1].params(1) == 0.0);
    CHECK(flat.rows[3].params(0) == 0.25);

    const LandscapeTable grid = landscape_scan(bowl, {linspace(-1, 1, 21), linspace(-1, 1, 21)}, 1000, 2);
    CHECK(grid.rows[grid.min_row].params(0) == doctest::Approx(0.3));
    CHECK(grid.rows[grid.min_row].params(1) == doctest::Approx(0.3));

    const LandscapeTable errs = landscape_scan(
        [](const Eigen::VectorXd& x) -> double {
          if (x(0) > 0.0) throw NumericalError("boom");
          return x(0);
        },
        {linspace(-1, 1, 3)});
    CHECK(errs.rows[2].error == "boom");
    CHECK(std::isinf(errs.rows[2].cost));
    CHECK(errs.min_row == 0);

    CHECK_THROWS(landscape_scan(bowl, {linspace(0, 1, 100), linspace(0, 1, 100)}, 5000));
    CHECK(linspace(0, 1, 1) == std::vector<double>{0.0});
  }

  TEST_CASE("costs") {
    ExperimentContext ctx = two_qubit_context(ControlKind::anneal_gamma);
    ctx.num_harmonics = 1;
    CostSpec spec;
    spec.target = bell_state();
    const CostFunction unassisted = make_cost(spec, ctx);
    CHECK(unassisted(Eigen::VectorXd::Zero(1)) == doctest::Approx(0.448).epsilon(0.005 / 0.448));

    const QuantumState reached = evolve(ctx, Eigen::VectorXd::Constant(1, 0.22));
    spec.target = reached;
    // Self-overlap is |⟨ψ|ψ⟩|², so the cost equals the norm drift of the propagated state.
    const double drift = std::abs(reached.squaredNorm() - 1.0);
    CHECK(std::abs(make_cost(spec, ctx)(Eigen::VectorXd::Constant(1, 0.22))) <= 2.0 * drift + 1e-14);

    const ParametricHamiltonian ising = anneal_family(ising_model(IsingParams::uniform(2)));
    const QuantumState plus = QuantumState::Constant(4, 0.5);
    const OperatorMatrix hp = ising.at(1.0);
    CHECK(std::abs(expectation(hp, plus)) < 1e-15);
    CHECK(expectation(hp, plus) - eigendecompose(hp).energies(0) == doctest::Approx(1.0));
  }

  TEST_CASE("propagation failures inside a cost score +inf") {
    ExperimentContext ctx = two_qubit_context(ControlKind::floquet_beta);
    ctx.propagator.max_steps = 5;
    CostSpec spec;
    spec.target = bell_state();
    const CostFunction f = make_cost(spec, ctx);
    CHECK(std::isinf(f(Eigen::VectorXd::Constant(1, 1.0))));
    CHECK(f.failures->load() == 1);
  }

  TEST_CASE("beta landscape is far rougher than the gamma landscape") {
    CostSpec spec;
    spec.target = bell_state();
    const ExperimentContext g = two_qubit_context(ControlKind::anneal_gamma);
    const ExperimentContext b = two_qubit_context(ControlKind::floquet_beta);
    const LandscapeTable gt = landscape_scan(make_cost(spec, g).evaluate, {linspace(-1, 1, 41)});
    const LandscapeTable bt = landscape_scan(make_cost(spec, b).evaluate, {linspace(-3, 3, 61)});
    const int gc = gradient_sign_changes(gt), bc = gradient_sign_changes(bt);
    MESSAGE("gradient sign changes: gamma " << gc << ", beta " << bc);
    CHECK(bc > gc);
    double lo = 1.0, hi = 0.0;
    for (const auto& r : bt.rows) {
      lo = std::min(lo, r.cost);
      hi = std::max(hi, r.cost);
    }
    CHECK(hi - lo > 0.9);
  }
}
