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

#include "caffeine/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "caffeine/agp.hpp"
#include "caffeine/errors.hpp"

namespace caffeine {

std::string to_string(Arm arm) {
  switch (arm) {
    case Arm::unassisted:
      return "unassisted";
    case Arm::optimized_anneal:
      return "optimized_anneal";
    case Arm::analytical_floquet:
      return "analytical_floquet";
    case Arm::exact_cd:
      return "exact_cd";
    case Arm::caffeine:
      return "caffeine";
  }
  return "unknown";
}

Arm arm_from_string(const std::string& s) {
  std::string key = s;
  std::replace(key.begin(), key.end(), '-', '_');
  for (Arm a : {Arm::unassisted, Arm::optimized_anneal, Arm::analytical_floquet, Arm::exact_cd,
                Arm::caffeine}) {
    if (to_string(a) == key) return a;
  }
  throw ConfigError("unknown arm '" + s + "'");
}

double ExperimentConfig::omega0() const {
  return drive.omega0.value_or(FloquetDriveSpec::default_omega0(schedule.tau));
}

void ExperimentConfig::validate() const {
  if (!(schedule.tau > 0.0)) throw ConfigError("schedule.tau must be positive");
  if (!(drive.omega_multiplier > 0.0)) throw ConfigError("drive.omega_multiplier must be positive");
  if (drive.omega0 && !(*drive.omega0 > 0.0)) throw ConfigError("drive.omega0 must be positive");
  if (!(drive.beta_lower < drive.beta_upper)) throw ConfigError("drive beta bounds need lower < upper");
  if (drive.harmonics.empty() || drive.segments.empty()) {
    throw ConfigError("drive.harmonics and drive.segments must be non-empty");
  }
  for (auto v : drive.harmonics) {
    if (v == 0) throw ConfigError("drive.harmonics entries must be >= 1");
  }
  for (auto v : drive.segments) {
    if (v == 0) throw ConfigError("drive.segments entries must be >= 1");
  }
  if (omega() * schedule.tau / (2.0 * M_PI) < drive.min_oscillations) {
    throw ConfigError("omega*tau/2pi below drive.min_oscillations");
  }
  if (!(anneal_control.gamma_lower < anneal_control.gamma_upper) || anneal_control.num_gammas == 0) {
    throw ConfigError("anneal_control needs num_gammas >= 1 and lower < upper");
  }
  if (!(learning.beta_lower < learning.beta_upper) || learning.num_segments == 0) {
    throw ConfigError("learning needs num_segments >= 1 and lower < upper");
  }
  if (!(learning.tail_cutoff > 0.0 && learning.tail_cutoff <= 1.0)) {
    throw ConfigError("learning.tail_cutoff must lie in (0, 1]");
  }
  if (trajectory_samples == 0) throw ConfigError("trajectory_samples must be >= 1");
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
  for (double t : cd_taus) {
    if (!(t > 0.0)) throw ConfigError("cd_taus entries must be positive");
  }
  if (model.kind == ModelKind::ising) {
    if (model.sizes.empty()) throw ConfigError("model.sizes must be non-empty");
    for (auto n : model.sizes) {
      if (n < 2) throw ConfigError("Ising chains need at least 2 sites");
      if (n > model.max_sites) {
        throw ConfigError("chain of " + std::to_string(n) + " sites exceeds max_sites " +
                          std::to_string(model.max_sites));
      }
    }
    for (Arm a : arms) {
      if (a == Arm::analytical_floquet || a == Arm::exact_cd || a == Arm::optimized_anneal) {
        throw ConfigError("arm " + to_string(a) + " is only defined for the two-qubit model");
      }
    }
  }
  optimizer.validate();
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // splitmix64 over the tuple
  std::uint64_t x = base;
  for (std::uint64_t v : {a, b, c}) {
    x += 0x9E3779B97F4A7C15ULL + v;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x ^= x >> 31;
  }
  return x;
}

PiecewiseBeta refine_table(const PiecewiseBeta& coarse, std::size_t num_harmonics,
                           std::size_t num_segments) {
  PiecewiseBeta fine(num_harmonics, num_segments, coarse.tau(), coarse.lower(), coarse.upper());
  for (std::size_t j = 1; j <= num_segments; ++j) {
    const double mid = 0.5 * (fine.segment_start(j) + fine.segment_end(j));
    const std::size_t cj = coarse.segment_of(mid);
    for (std::size_t k = 1; k <= std::min(num_harmonics, coarse.num_harmonics()); ++k) {
      fine.set(k, j, coarse.value(k, cj));
    }
  }
  return fine;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  jobs = std::clamp<std::size_t>(jobs, 1, n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= n || first) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first) std::rethrow_exception(first);
}

namespace {

bool aborted(const ExperimentConfig& cfg) { return cfg.abort_flag && cfg.abort_flag->load(); }

ParametricHamiltonian ising_family(const ExperimentConfig& cfg, std::size_t n) {
  IsingParams p = IsingParams::uniform(n, cfg.model.coupling, cfg.model.boundary);
  p.fields.assign(n, cfg.model.field);
  return anneal_family(ising_model(p), cfg.model.max_sites);
}

ParametricHamiltonian primary_model(const ExperimentConfig& cfg) {
  if (cfg.model.kind == ModelKind::two_qubit) return two_qubit_model(cfg.model.two_qubit);
  return ising_family(cfg, cfg.model.sizes.front());
}

void require_two_qubit(const ExperimentConfig& cfg, const std::string& what) {
  if (cfg.model.kind != ModelKind::two_qubit) {
    throw ConfigError(what + " requires the two-qubit model");
  }
}

DualAnnealingConfig optimizer_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  DualAnnealingConfig o = cfg.optimizer;
  o.rng_seed = seed;
  o.abort_flag = cfg.abort_flag;
  return o;
}

double min_instantaneous(const std::vector<TrajectoryRow>& rows) {
  double m = 1.0;
  for (const auto& r : rows) m = std::min(m, r.fidelity_instantaneous);
  return m;
}

ExperimentContext base_context(const ExperimentConfig& cfg, const ParametricHamiltonian& model) {
  ExperimentContext ctx{model, cfg.schedule};
  ctx.omega = cfg.omega();
  ctx.omega0 = cfg.omega0();
  ctx.min_oscillations = cfg.drive.min_oscillations;
  ctx.propagator = cfg.propagator;
  ctx.initial_state = ground_state(model.at(0.0));
  return ctx;
}

// Best completed optimum from which (nk, nt) can be reached exactly.
template <typename Lookup>
std::optional<PiecewiseBeta> warm_start_table(const Lookup& done, std::size_t nk, std::size_t nt) {
  std::optional<PiecewiseBeta> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& [key, entry] : done) {
    const auto [k, j] = key;
    if (k <= nk && nt % j == 0 && entry.second < best_cost) {
      best_cost = entry.second;
      best = entry.first;
    }
  }
  if (best) return refine_table(*best, nk, nt);
  return std::nullopt;
}

}  // namespace

TrajectoryRun run_trajectory(const TimeDependentHamiltonian& h, const ParametricHamiltonian& model,
                             const Schedule& schedule, const QuantumState& psi0,
                             const std::optional<QuantumState>& target,
                             const PropagatorConfig& propagator, std::size_t samples) {
  const std::vector<double> times = uniform_samples(0.0, schedule.tau, samples);
  const PropagationResult res = propagate(h, psi0, 0.0, schedule.tau, propagator, times);
  TrajectoryRun out;
  out.final_state = res.state;
  out.steps = res.steps;
  out.max_norm_drift = res.max_norm_drift;
  const auto series = instantaneous_fidelity_series(*res.trajectory, model, schedule);
  for (std::size_t i = 0; i < series.size(); ++i) {
    TrajectoryRow row;
    row.t = series[i].t;
    row.lambda = series[i].lambda;
    row.fidelity_target = target ? fidelity(*target, res.trajectory->states[i])
                                 : std::numeric_limits<double>::quiet_NaN();
    row.fidelity_instantaneous = series[i].fidelity;
    row.energy = series[i].energy;
    row.norm_drift = res.trajectory->norm_drift[i];
    row.ambiguous = series[i].ambiguous;
    out.max_norm_drift = std::max(out.max_norm_drift, row.norm_drift);
    out.rows.push_back(row);
  }
  return out;
}

ExperimentContext state_prep_context(const ExperimentConfig& cfg, ControlKind control,
                                     std::size_t num_harmonics, std::size_t num_segments) {
  require_two_qubit(cfg, "state preparation");
  ExperimentContext ctx = base_context(cfg, two_qubit_model(cfg.model.two_qubit));
  ctx.control = control;
  ctx.num_harmonics = num_harmonics;
  ctx.num_segments = num_segments;
  return ctx;
}

StatePrepReport run_state_prep(const ExperimentConfig& cfg) {
  cfg.validate();
  require_two_qubit(cfg, "state preparation");
  const ParametricHamiltonian model = two_qubit_model(cfg.model.two_qubit);
  const QuantumState psi0 = ground_state(model.at(0.0));
  const QuantumState target = bell_state();
  StatePrepReport report;
  report.omega = cfg.omega();
  report.omega0 = cfg.omega0();

  auto finish = [&](ArmResult& r, const TimeDependentHamiltonian& h) {
    const TrajectoryRun run =
        run_trajectory(h, model, cfg.schedule, psi0, target, cfg.propagator, cfg.trajectory_samples);
    r.infidelity = 1.0 - fidelity(target, run.final_state);
    r.trajectory = run.rows;
    r.min_instantaneous_fidelity = min_instantaneous(run.rows);
    r.max_norm_drift = run.max_norm_drift;
  };

  std::vector<std::vector<ArmResult>> slots(cfg.arms.size());
  parallel_for(cfg.arms.size(), cfg.jobs, [&](std::size_t idx) {
    const Arm arm = cfg.arms[idx];
    if (aborted(cfg)) return;
    switch (arm) {
      case Arm::unassisted: {
        ArmResult r;
        r.arm = arm;
        r.label = "unassisted";
        finish(r, bare_hamiltonian(model, cfg.schedule));
        slots[idx].push_back(std::move(r));
        break;
      }
      case Arm::exact_cd: {
        ArmResult r;
        r.arm = arm;
        r.label = "exact_cd";
        finish(r, cd_hamiltonian(model, cfg.schedule, exact_agp_provider(model)));
        slots[idx].push_back(std::move(r));
        break;
      }
      case Arm::analytical_floquet: {
        ArmResult r;
        r.arm = arm;
        r.label = "analytical_floquet";
        r.num_harmonics = 1;
        const TwoQubitParams p = cfg.model.two_qubit;
        const Schedule sched = cfg.schedule;
        FloquetDriveSpec drive = FloquetDriveSpec::continuous(
            cfg.omega(), cfg.omega0(), 1,
            [p, sched](std::size_t, double t) { return analytical_beta1(p, lambda_at(sched, t)); });
        drive.min_oscillations = cfg.drive.min_oscillations;
        finish(r, floquet_hamiltonian(model, cfg.schedule, std::move(drive)));
        slots[idx].push_back(std::move(r));
        break;
      }
      case Arm::optimized_anneal: {
        ArmResult r;
        r.arm = arm;
        r.label = "optimized_anneal";
        const ExperimentContext ctx = state_prep_context(cfg, ControlKind::anneal_gamma, 0, 0);
        CostSpec spec;
        spec.target = target;
        const CostFunction cost = make_cost(spec, ctx);
        const Bounds bounds = Bounds::uniform(cfg.anneal_control.num_gammas,
                                              cfg.anneal_control.gamma_lower,
                                              cfg.anneal_control.gamma_upper);
        OptimizationResult opt =
            dual_anneal(cost.evaluate, bounds, optimizer_for(cfg, derive_seed(cfg.seed, 1)));
        r.gammas.assign(opt.best_params.data(), opt.best_params.data() + opt.best_params.size());
        r.cost_failures = cost.failures->load();
        finish(r, hamiltonian_for(ctx, opt.best_params));
        r.optimization = std::move(opt);
        slots[idx].push_back(std::move(r));
        break;
      }
      case Arm::caffeine: {
        std::vector<std::size_t> nks = cfg.drive.harmonics;
        std::vector<std::size_t> nts = cfg.drive.segments;
        std::sort(nks.begin(), nks.end());
        std::sort(nts.begin(), nts.end());
        std::map<std::pair<std::size_t, std::size_t>, std::pair<PiecewiseBeta, double>> done;
        for (std::size_t nk : nks) {
          for (std::size_t nt : nts) {
            if (aborted(cfg)) return;
            const ExperimentContext ctx = state_prep_context(cfg, ControlKind::floquet_beta, nk, nt);
            CostSpec spec;
            spec.target = target;
            const CostFunction cost = make_cost(spec, ctx);
            DualAnnealingConfig ocfg = optimizer_for(cfg, derive_seed(cfg.seed, 2, nk, nt));
            if (cfg.drive.warm_start) {
              if (auto start = warm_start_table(done, nk, nt)) ocfg.x0 = start->flat();
            }
            OptimizationResult opt = dual_anneal(
                cost.evaluate, Bounds::uniform(nk * nt, cfg.drive.beta_lower, cfg.drive.beta_upper),
                ocfg);
            if (opt.termination_reason == TerminationReason::user_abort) return;
            ArmResult r;
            r.arm = arm;
            r.label = "caffeine_nk" + std::to_string(nk) + "_nt" + std::to_string(nt);
            r.num_harmonics = nk;
            r.num_segments = nt;
            PiecewiseBeta table = PiecewiseBeta::from_flat(nk, nt, cfg.schedule.tau, opt.best_params,
                                                           cfg.drive.beta_lower, cfg.drive.beta_upper);
            r.betas = table;
            r.cost_failures = cost.failures->load();
            finish(r, hamiltonian_for(ctx, opt.best_params));
            done.insert_or_assign({nk, nt}, std::make_pair(table, opt.best_cost));
            r.optimization = std::move(opt);
            slots[idx].push_back(std::move(r));
          }
        }
        break;
      }
    }
  });
  for (auto& s : slots) {
    for (auto& r : s) report.arms.push_back(std::move(r));
  }
  report.interrupted = aborted(cfg);
  return report;
}

AnnealReport run_ising_anneal(const ExperimentConfig& cfg, const AnnealProgress& progress) {
  cfg.validate();
  if (cfg.model.kind != ModelKind::ising) throw ConfigError("anneal requires the Ising model");
  AnnealReport report;
  report.omega = cfg.omega();
  report.omega0 = cfg.omega0();
  const bool want_unassisted =
      std::find(cfg.arms.begin(), cfg.arms.end(), Arm::unassisted) != cfg.arms.end();
  const bool want_caffeine =
      std::find(cfg.arms.begin(), cfg.arms.end(), Arm::caffeine) != cfg.arms.end();

  std::mutex mu;
  std::vector<AnnealRow> finished;
  auto row_order = [](const AnnealRow& a, const AnnealRow& b) {
    return std::tuple(a.num_sites, a.arm != Arm::unassisted, a.num_harmonics, a.num_segments) <
           std::tuple(b.num_sites, b.arm != Arm::unassisted, b.num_harmonics, b.num_segments);
  };

  parallel_for(cfg.model.sizes.size(), cfg.jobs, [&](std::size_t idx) {
    const std::size_t n = cfg.model.sizes[idx];
    if (aborted(cfg)) return;
    const ParametricHamiltonian model = ising_family(cfg, n);
    const OperatorMatrix hp = model.at(1.0);
    const double e_target = eigendecompose(hp).energies(0);
    const ExperimentContext base = base_context(cfg, model);
    std::vector<AnnealRow> rows;
    if (want_unassisted) {
      const PropagationResult res =
          propagate(bare_hamiltonian(model, cfg.schedule), base.initial_state, 0.0,
                    cfg.schedule.tau, cfg.propagator);
      AnnealRow row;
      row.num_sites = n;
      row.arm = Arm::unassisted;
      row.final_energy = expectation(hp, res.state);
      row.ground_energy = e_target;
      row.energy_gap = row.final_energy - e_target;
      rows.push_back(std::move(row));
    }
    if (want_caffeine) {
      std::vector<std::size_t> nks = cfg.drive.harmonics;
      std::vector<std::size_t> nts = cfg.drive.segments;
      std::sort(nks.begin(), nks.end());
      std::sort(nts.begin(), nts.end());
      std::map<std::pair<std::size_t, std::size_t>, std::pair<PiecewiseBeta, double>> done;
      for (std::size_t nk : nks) {
        for (std::size_t nt : nts) {
          if (aborted(cfg)) break;
          ExperimentContext ctx = base;
          ctx.control = ControlKind::floquet_beta;
          ctx.num_harmonics = nk;
          ctx.num_segments = nt;
          CostSpec spec;
          spec.kind = CostKind::final_energy;
          spec.observable = hp;
          const CostFunction cost = make_cost(spec, ctx);
          DualAnnealingConfig ocfg = optimizer_for(cfg, derive_seed(cfg.seed, n, nk, nt));
          if (cfg.drive.warm_start) {
            if (auto start = warm_start_table(done, nk, nt)) ocfg.x0 = start->flat();
          }
          OptimizationResult opt = dual_anneal(
              cost.evaluate, Bounds::uniform(nk * nt, cfg.drive.beta_lower, cfg.drive.beta_upper),
              ocfg);
          if (opt.termination_reason == TerminationReason::user_abort) break;
          PiecewiseBeta table = PiecewiseBeta::from_flat(nk, nt, cfg.schedule.tau, opt.best_params,
                                                         cfg.drive.beta_lower, cfg.drive.beta_upper);
          AnnealRow row;
          row.num_sites = n;
          row.arm = Arm::caffeine;
          row.num_harmonics = nk;
          row.num_segments = nt;
          row.final_energy = opt.best_cost;
          row.ground_energy = e_target;
          row.energy_gap = opt.best_cost - e_target;
          row.betas = table;
          done.insert_or_assign({nk, nt}, std::make_pair(table, opt.best_cost));
          row.optimization = std::move(opt);
          rows.push_back(std::move(row));
        }
      }
    }
    std::lock_guard lock(mu);
    for (auto& r : rows) finished.push_back(std::move(r));
    std::sort(finished.begin(), finished.end(), row_order);
    if (progress) progress(finished);
  });
  report.rows = std::move(finished);
  report.interrupted = aborted(cfg);
  return report;
}

double segment_average_beta1(const TwoQubitParams& p, const Schedule& schedule, double t0,
                             double t1) {
  // composite Simpson
  constexpr int kIntervals = 256;
  const double h = (t1 - t0) / kIntervals;
  double sum = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double t = (i == kIntervals) ? t1 : t0 + i * h;
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * analytical_beta1(p, lambda_at(schedule, t));
  }
  return sum * h / 3.0 / (t1 - t0);
}

LearningReport run_agp_learning(const ExperimentConfig& cfg) {
  cfg.validate();
  const ParametricHamiltonian model = primary_model(cfg);
  LearningReport report;
  report.two_qubit = cfg.model.kind == ModelKind::two_qubit;
  report.omega = cfg.omega();
  report.omega0 = cfg.omega0();
  const std::size_t nk = cfg.drive.harmonics.front();
  const std::size_t nt = cfg.learning.num_segments;
  PiecewiseBeta table(nk, nt, cfg.schedule.tau, cfg.learning.beta_lower, cfg.learning.beta_upper);
  const ExperimentContext base = base_context(cfg, model);
  QuantumState psi = base.initial_state;

  try {
    for (std::size_t j = 1; j <= nt; ++j) {
      if (aborted(cfg)) throw NumericalError("interrupted");
      ExperimentContext ctx = base;
      ctx.control = ControlKind::floquet_segment;
      ctx.num_harmonics = nk;
      ctx.num_segments = nt;
      ctx.base_table = table;
      ctx.segment = j;
      ctx.t_start = table.segment_start(j);
      ctx.t_end = table.segment_end(j);
      ctx.initial_state = psi;
      CostSpec spec;
      spec.kind = CostKind::segment_energy;
      const CostFunction cost = make_cost(spec, ctx);
      OptimizationResult opt =
          dual_anneal(cost.evaluate,
                      Bounds::uniform(nk, cfg.learning.beta_lower, cfg.learning.beta_upper),
                      optimizer_for(cfg, derive_seed(cfg.seed, 3, j)));
      if (opt.termination_reason == TerminationReason::user_abort) {
        throw NumericalError("interrupted");
      }
      SegmentResult seg;
      seg.index = j;
      seg.t_start = table.segment_start(j);
      seg.t_end = table.segment_end(j);
      seg.lambda_end = lambda_at(cfg.schedule, seg.t_end);
      for (std::size_t k = 1; k <= nk; ++k) {
        const double v = opt.best_params(static_cast<Eigen::Index>(k - 1));
        table.set(k, j, v);
        seg.betas.push_back(v);
      }
      ctx.base_table = table;
      seg.state = evolve(ctx, opt.best_params);
      seg.energy = expectation(model.at(seg.lambda_end), seg.state);
      seg.tail = cfg.schedule.kind == ScheduleKind::smooth &&
                 seg.t_end > cfg.learning.tail_cutoff * cfg.schedule.tau * (1.0 + 1e-12);
      if (report.two_qubit) {
        const double avg =
            segment_average_beta1(cfg.model.two_qubit, cfg.schedule, seg.t_start, seg.t_end);
        seg.analytical_average = avg;
        seg.analytical_projected = std::clamp(avg, cfg.learning.beta_lower, cfg.learning.beta_upper);
      }
      seg.optimization = std::move(opt);
      psi = seg.state;
      report.segments.push_back(std::move(seg));
    }
    report.complete = true;
  } catch (const NumericalError& e) {
    report.error = e.what();
  }
  report.table = table;

  if (report.two_qubit && !report.segments.empty()) {
    double sp = 0.0;
    double sr = 0.0;
    std::size_t n = 0;
    for (const auto& s : report.segments) {
      if (s.tail) continue;
      const double dp = s.betas.front() - *s.analytical_projected;
      const double dr = s.betas.front() - *s.analytical_average;
      sp += dp * dp;
      sr += dr * dr;
      ++n;
    }
    report.scored_segments = n;
    if (n > 0) {
      report.rms_projected = std::sqrt(sp / static_cast<double>(n));
      report.rms_raw = std::sqrt(sr / static_cast<double>(n));
    }
  }
  if (report.complete) {
    ExperimentContext full = base;
    full.control = ControlKind::floquet_beta;
    full.num_harmonics = nk;
    full.num_segments = nt;
    const QuantumState whole = evolve(full, table.flat());
    report.chain_mismatch = 1.0 - fidelity(whole, psi);
  }
  return report;
}

ExactCdReport reference_exact_cd(const ExperimentConfig& cfg) {
  cfg.validate();
  require_two_qubit(cfg, "exact CD reference");
  const ParametricHamiltonian model = two_qubit_model(cfg.model.two_qubit);
  const QuantumState psi0 = ground_state(model.at(0.0));
  ExactCdReport report;
  report.runs.resize(cfg.cd_taus.size());
  parallel_for(cfg.cd_taus.size(), cfg.jobs, [&](std::size_t i) {
    Schedule sched = cfg.schedule;
    sched.tau = cfg.cd_taus[i];
    const TrajectoryRun run =
        run_trajectory(cd_hamiltonian(model, sched, exact_agp_provider(model)), model, sched, psi0,
                       bell_state(), cfg.propagator, cfg.trajectory_samples);
    ExactCdRun& r = report.runs[i];
    r.tau = sched.tau;
    r.infidelity = 1.0 - fidelity(bell_state(), run.final_state);
    r.min_instantaneous_fidelity = min_instantaneous(run.rows);
    r.max_norm_drift = run.max_norm_drift;
    r.trajectory = run.rows;
  });
  return report;
}

LandscapeReport run_landscape(const ExperimentConfig& cfg) {
  cfg.validate();
  require_two_qubit(cfg, "landscape scan");
  if (cfg.landscape.axes.empty()) throw ConfigError("landscape.axes must be non-empty");
  LandscapeReport report;
  report.control = cfg.landscape.control;
  report.omega = cfg.omega();
  report.omega0 = cfg.omega0();
  const std::size_t dim = cfg.landscape.axes.size();
  const ExperimentContext ctx =
      cfg.landscape.control == LandscapeControl::gamma
          ? state_prep_context(cfg, ControlKind::anneal_gamma, 0, 0)
          : state_prep_context(cfg, ControlKind::floquet_beta, 1, dim);
  CostSpec spec;
  spec.target = bell_state();
  const CostFunction cost = make_cost(spec, ctx);
  std::vector<std::vector<double>> axes;
  for (const auto& a : cfg.landscape.axes) axes.push_back(linspace(a.start, a.stop, a.count));
  report.table = landscape_scan(cost.evaluate, axes, cfg.landscape.max_points, cfg.jobs);
  return report;
}

}  // namespace caffeine
