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

#include "caffeine/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "caffeine/errors.hpp"

namespace caffeine {

Bounds::Bounds(std::vector<std::pair<double, double>> limits) : limits_(std::move(limits)) {
  if (limits_.empty()) throw DomainError("bounds need at least one parameter");
  for (std::size_t i = 0; i < limits_.size(); ++i) {
    const auto [lo, hi] = limits_[i];
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw DomainError("invalid bounds for parameter " + std::to_string(i) + ": [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
}

Bounds Bounds::uniform(std::size_t dim, double lo, double hi) {
  return Bounds(std::vector<std::pair<double, double>>(dim, {lo, hi}));
}

bool Bounds::contains(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    const double v = x(static_cast<Eigen::Index>(i));
    if (v < lower(i) || v > upper(i)) return false;
  }
  return true;
}

Eigen::VectorXd Bounds::clamp(Eigen::VectorXd x) const {
  for (std::size_t i = 0; i < dimension(); ++i) {
    auto& v = x(static_cast<Eigen::Index>(i));
    v = std::clamp(v, lower(i), upper(i));
  }
  return x;
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::budget_exhausted:
      return "budget_exhausted";
    case TerminationReason::converged:
      return "converged";
    case TerminationReason::user_abort:
      return "user_abort";
  }
  return "unknown";
}

void DualAnnealingConfig::validate() const {
  if (max_function_evals == 0 || max_global_iterations == 0) {
    throw ConfigError("optimizer budgets must be positive");
  }
  if (!(initial_temperature > 0.01 && initial_temperature <= 5e4)) {
    throw ConfigError("initial_temperature must lie in (0.01, 5e4]");
  }
  if (!(visiting_param > 1.0 && visiting_param <= 3.0)) {
    throw ConfigError("visiting_param must lie in (1, 3]");
  }
  if (!(acceptance_param > -1e4 && acceptance_param <= -5.0)) {
    throw ConfigError("acceptance_param must lie in (-1e4, -5]");
  }
  if (!(restart_temp_ratio > 0.0 && restart_temp_ratio < 1.0)) {
    throw ConfigError("restart_temp_ratio must lie in (0, 1)");
  }
}

LocalSearchResult nelder_mead(const Objective& cost, const Bounds& bounds, Eigen::VectorXd x0,
                              std::size_t max_evals, double ftol, double xtol) {
  const auto n = static_cast<Eigen::Index>(bounds.dimension());
  LocalSearchResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    const double v = cost(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  x0 = bounds.clamp(std::move(x0));
  std::vector<Eigen::VectorXd> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    const auto ui = static_cast<std::size_t>(i);
    const double step = 0.05 * (bounds.upper(ui) - bounds.lower(ui));
    v(i) = (v(i) + step <= bounds.upper(ui)) ? v(i) + step : v(i) - step;
    simplex.push_back(v);
  }
  std::vector<double> f;
  for (const auto& v : simplex) {
    if (res.evaluations >= max_evals) break;
    f.push_back(eval(v));
  }
  if (f.size() < simplex.size()) {
    simplex.resize(f.size());
    const auto best = std::min_element(f.begin(), f.end()) - f.begin();
    res.x = simplex[static_cast<std::size_t>(best)];
    res.value = f[static_cast<std::size_t>(best)];
    return res;
  }

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> f2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(f[i]);
    }
    simplex = std::move(s2);
    f = std::move(f2);
  };

  while (res.evaluations < max_evals) {
    sort_simplex();
    double fspread = 0.0;
    double xspread = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      fspread = std::max(fspread, std::abs(f[i] - f[0]));
      xspread = std::max(xspread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    }
    if (fspread <= ftol && xspread <= xtol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd& worst = simplex.back();

    const Eigen::VectorXd xr = bounds.clamp(centroid + (centroid - worst));
    const double fr = eval(xr);
    if (fr < f[0]) {
      if (res.evaluations >= max_evals) {
        simplex.back() = xr;
        f.back() = fr;
        break;
      }
      const Eigen::VectorXd xe = bounds.clamp(centroid + 2.0 * (centroid - worst));
      const double fe = eval(xe);
      if (fe < fr) {
        simplex.back() = xe;
        f.back() = fe;
      } else {
        simplex.back() = xr;
        f.back() = fr;
      }
      continue;
    }
    if (fr < f[f.size() - 2]) {
      simplex.back() = xr;
      f.back() = fr;
      continue;
    }
    if (res.evaluations >= max_evals) break;
    const bool outside = fr < f.back();
    const Eigen::VectorXd xc = outside ? bounds.clamp(centroid + 0.5 * (xr - centroid))
                                       : bounds.clamp(centroid + 0.5 * (worst - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : f.back())) {
      simplex.back() = xc;
      f.back() = fc;
      continue;
    }
    for (std::size_t i = 1; i < simplex.size() && res.evaluations < max_evals; ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      f[i] = eval(simplex[i]);
    }
  }
  const auto best = std::min_element(f.begin(), f.end()) - f.begin();
  res.x = simplex[static_cast<std::size_t>(best)];
  res.value = f[static_cast<std::size_t>(best)];
  return res;
}

namespace {

constexpr double kTailLimit = 1e8;
constexpr double kMinVisitBound = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Stop {
  TerminationReason reason;
};

// Counts evaluations, records the trace and raises Stop when a budget, target
// or abort request ends the run.
class CountingObjective {
 public:
  CountingObjective(const Objective& f, const DualAnnealingConfig& cfg, OptimizationResult& out)
      : f_(f), cfg_(cfg), out_(out) {}

  double operator()(const Eigen::VectorXd& x) {
    if (cfg_.abort_flag && cfg_.abort_flag->load()) throw Stop{TerminationReason::user_abort};
    if (out_.evaluation_count >= cfg_.max_function_evals) {
      throw Stop{TerminationReason::budget_exhausted};
    }
    double v = f_(x);
    ++out_.evaluation_count;
    if (!std::isfinite(v)) {
      v = kInf;
      ++out_.nonfinite_evaluations;
    }
    out_.cost_trace.push_back(v);
    if (v < out_.best_cost) {
      out_.best_cost = v;
      out_.best_params = x;
    }
    return v;
  }

  void check_target() const {
    if (cfg_.target_cost && out_.best_cost <= *cfg_.target_cost) {
      throw Stop{TerminationReason::converged};
    }
  }

  std::size_t remaining() const { return cfg_.max_function_evals - out_.evaluation_count; }

 private:
  const Objective& f_;
  const DualAnnealingConfig& cfg_;
  OptimizationResult& out_;
};

class VisitingDistribution {
 public:
  VisitingDistribution(const Bounds& b, double q, std::mt19937_64& rng) : bounds_(b), q_(q), rng_(rng) {
    factor2_ = std::exp((4.0 - q) * std::log(q - 1.0));
    factor3_ = std::exp((2.0 - q) * std::log(2.0) / (q - 1.0));
    factor4p_ = std::sqrt(M_PI) * factor2_ / (factor3_ * (3.0 - q));
    factor5_ = 1.0 / (q - 1.0) - 0.5;
    d1_ = 2.0 - factor5_;
    factor6_ = M_PI * (1.0 - factor5_) / std::sin(M_PI * (1.0 - factor5_)) / std::exp(std::lgamma(d1_));
  }

  Eigen::VectorXd visit(const Eigen::VectorXd& x, std::size_t step, double temperature) {
    const auto dim = static_cast<std::size_t>(x.size());
    Eigen::VectorXd out = x;
    if (step < dim) {
      Eigen::VectorXd v = draw(temperature, dim);
      const double upper_sample = uniform_(rng_);
      const double lower_sample = uniform_(rng_);
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) > kTailLimit) v(i) = kTailLimit * upper_sample;
        if (v(i) < -kTailLimit) v(i) = -kTailLimit * lower_sample;
        out(i) = wrap(static_cast<std::size_t>(i), v(i) + x(i));
      }
    } else {
      double v = draw(temperature, 1)(0);
      if (v > kTailLimit) {
        v = kTailLimit * uniform_(rng_);
      } else if (v < -kTailLimit) {
        v = -kTailLimit * uniform_(rng_);
      }
      const std::size_t i = step - dim;
      out(static_cast<Eigen::Index>(i)) = wrap(i, v + x(static_cast<Eigen::Index>(i)));
    }
    return out;
  }

 private:
  double wrap(std::size_t i, double value) const {
    const double lo = bounds_.lower(i);
    const double range = bounds_.upper(i) - lo;
    const double b = std::fmod(value - lo, range) + range;
    double w = std::fmod(b, range) + lo;
    if (std::abs(w - lo) < kMinVisitBound) w += kMinVisitBound;
    return w;
  }

  Eigen::VectorXd draw(double temperature, std::size_t dim) {
    const double factor1 = std::exp(std::log(temperature) / (q_ - 1.0));
    const double factor4 = factor4p_ * factor1;
    const double scale =
        std::exp(-(q_ - 1.0) * std::log(factor6_ / factor4) / (3.0 - q_));
    Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      const double x = normal_(rng_) * scale;
      const double y = normal_(rng_);
      const double den = std::exp((q_ - 1.0) * std::log(std::abs(y)) / (3.0 - q_));
      out(static_cast<Eigen::Index>(i)) = x / den;
    }
    return out;
  }

  const Bounds& bounds_;
  double q_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double factor2_, factor3_, factor4p_, factor5_, d1_, factor6_;
};

}  // namespace

OptimizationResult dual_anneal(const Objective& cost, const Bounds& bounds,
                               const DualAnnealingConfig& cfg) {
  cfg.validate();
  const std::size_t dim = bounds.dimension();
  if (dim == 0) throw DomainError("dual_anneal needs at least one parameter");
  if (cfg.x0 && (static_cast<std::size_t>(cfg.x0->size()) != dim)) {
    throw DimensionError("x0 dimension does not match bounds");
  }

  OptimizationResult res;
  res.seed = cfg.rng_seed;
  res.best_cost = kInf;
  res.best_params = cfg.x0 ? bounds.clamp(*cfg.x0) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CountingObjective f(cost, cfg, res);
  VisitingDistribution visitor(bounds, cfg.visiting_param, rng);

  const std::size_t ls_evals =
      cfg.local_search_max_evals > 0 ? cfg.local_search_max_evals
                                     : std::min<std::size_t>(std::max<std::size_t>(50 * dim, 100), 1000);
  auto random_point = [&] {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      x(static_cast<Eigen::Index>(i)) = bounds.lower(i) + unit(rng) * (bounds.upper(i) - bounds.lower(i));
    }
    return x;
  };

  Eigen::VectorXd current;
  double current_e = kInf;
  bool have_best = false;
  Eigen::VectorXd xbest;
  double ebest = kInf;

  auto reset = [&](bool use_x0) {
    current = (use_x0 && cfg.x0) ? bounds.clamp(*cfg.x0) : random_point();
    for (int attempt = 0;; ++attempt) {
      current_e = f(current);
      if (std::isfinite(current_e)) break;
      if (attempt >= 1000) {
        throw NumericalError("objective is non-finite at every sampled starting point");
      }
      current = random_point();
    }
    if (!have_best) {
      have_best = true;
      xbest = current;
      ebest = current_e;
    }
  };

  auto local_search = [&](const Eigen::VectorXd& x, double e) -> std::pair<double, Eigen::VectorXd> {
    const std::size_t budget = std::min(ls_evals, f.remaining());
    if (budget == 0) return {e, x};
    LocalSearchResult r = nelder_mead([&](const Eigen::VectorXd& p) { return f(p); }, bounds, x, budget);
    if (r.value < e) return {r.value, r.x};
    return {e, x};
  };

  try {
    reset(true);
    f.check_target();

    Eigen::VectorXd xmin = current;
    double emin = current_e;
    std::size_t not_improved_idx = 0;
    std::size_t not_improved_max_idx = 1000;
    const double k_factor = 100.0 * static_cast<double>(dim);
    const double temperature_restart = cfg.initial_temperature * cfg.restart_temp_ratio;
    const double qv = cfg.visiting_param;
    const double qa = cfg.acceptance_param;

    bool need_to_stop = false;
    while (!need_to_stop) {
      for (std::size_t i = 0; i < cfg.max_global_iterations; ++i) {
        const double s = static_cast<double>(i) + 2.0;
        const double t1 = std::exp((qv - 1.0) * std::log(2.0)) - 1.0;
        const double t2 = std::exp((qv - 1.0) * std::log(s)) - 1.0;
        const double temperature = cfg.initial_temperature * t1 / t2;
        if (res.global_iterations >= cfg.max_global_iterations) {
          need_to_stop = true;
          break;
        }
        if (temperature < temperature_restart) {
          reset(false);
          break;
        }

        // Strategy chain.
        const double temperature_step = temperature / static_cast<double>(i + 1);
        ++not_improved_idx;
        bool improved = (i == 0);
        for (std::size_t j = 0; j < 2 * dim; ++j) {
          const Eigen::VectorXd x_visit = visitor.visit(current, j, temperature);
          const double e = f(x_visit);
          if (e < current_e) {
            current = x_visit;
            current_e = e;
            if (e < ebest) {
              ebest = e;
              xbest = x_visit;
              improved = true;
              not_improved_idx = 0;
            }
          } else {
            const double r = unit(rng);
            const double pqv_temp = 1.0 - (1.0 - qa) * (e - current_e) / temperature_step;
            const double pqv = pqv_temp <= 0.0 ? 0.0 : std::exp(std::log(pqv_temp) / (1.0 - qa));
            if (r <= pqv) {
              current = x_visit;
              current_e = e;
              xmin = current;
            }
            if (not_improved_idx >= not_improved_max_idx && (j == 0 || current_e < emin)) {
              emin = current_e;
              xmin = current;
            }
          }
        }
        f.check_target();

        if (cfg.local_search_enabled) {
          if (improved) {
            auto [e, x] = local_search(xbest, ebest);
            if (e < ebest) {
              not_improved_idx = 0;
              ebest = e;
              xbest = x;
              current = x;
              current_e = e;
            }
          }
          bool do_ls = false;
          if (k_factor < 90.0 * static_cast<double>(dim)) {
            const double pls = std::exp(k_factor * (ebest - current_e) / temperature_step);
            if (pls >= unit(rng)) do_ls = true;
          }
          if (not_improved_idx >= not_improved_max_idx) do_ls = true;
          if (do_ls) {
            auto [e, x] = local_search(xmin, emin);
            xmin = x;
            emin = e;
            not_improved_idx = 0;
            not_improved_max_idx = dim;
            if (e < ebest) {
              ebest = e;
              xbest = x;
              current = x;
              current_e = e;
            }
          }
          f.check_target();
        }
        ++res.global_iterations;
      }
    }
    res.termination_reason = TerminationReason::budget_exhausted;
  } catch (const Stop& stop) {
    res.termination_reason = stop.reason;
  }
  if (!std::isfinite(res.best_cost) && res.evaluation_count > 0) {
    throw NumericalError("objective was non-finite at every evaluated point");
  }
  return res;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) throw DomainError("linspace needs at least one point");
  if (count == 1) return {start};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = i + 1 == count ? stop
                            : start + (stop - start) * static_cast<double>(i) /
                                          static_cast<double>(count - 1);
  }
  return out;
}

LandscapeTable landscape_scan(const Objective& cost, const std::vector<std::vector<double>>& axes,
                              std::size_t max_points, std::size_t jobs) {
  if (axes.empty()) throw DomainError("landscape scan needs at least one axis");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.empty()) throw DomainError("landscape axis has no samples");
    total *= a.size();
    if (total > max_points) {
      throw DomainError("landscape grid exceeds the point budget of " + std::to_string(max_points));
    }
  }
  LandscapeTable table;
  table.rows.resize(total);
  for (std::size_t r = 0; r < total; ++r) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(axes.size()));
    std::size_t rem = r;
    for (std::size_t ax = axes.size(); ax-- > 0;) {
      p(static_cast<Eigen::Index>(ax)) = axes[ax][rem % axes[ax].size()];
      rem /= axes[ax].size();
    }
    table.rows[r].params = std::move(p);
  }
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t r = begin; r < total; r += stride) {
      auto& row = table.rows[r];
      try {
        row.cost = cost(row.params);
        if (!std::isfinite(row.cost)) {
          row.error = "non-finite cost";
          row.cost = kInf;
        }
      } catch (const std::exception& e) {
        row.cost = kInf;
        row.error = e.what();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, total);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }
  for (std::size_t r = 1; r < total; ++r) {
    if (table.rows[r].cost < table.rows[table.min_row].cost) table.min_row = r;
  }
  return table;
}

}  // namespace caffeine
