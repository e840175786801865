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

#include "caffeine/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace caffeine {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json trajectory_summary(const ArmResult& a) {
  return {{"min_instantaneous_fidelity", a.min_instantaneous_fidelity},
          {"max_norm_drift", a.max_norm_drift},
          {"samples", a.trajectory.size()}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const OptimizationResult& r) {
  json trace = json::array();
  for (double v : r.cost_trace) trace.push_back(number_or_null(v));
  return {{"best_params", std::vector<double>(r.best_params.data(),
                                              r.best_params.data() + r.best_params.size())},
          {"best_cost", number_or_null(r.best_cost)},
          {"evaluation_count", r.evaluation_count},
          {"global_iterations", r.global_iterations},
          {"nonfinite_evaluations", r.nonfinite_evaluations},
          {"termination_reason", to_string(r.termination_reason)},
          {"seed", r.seed},
          {"cost_trace", trace}};
}

json to_json(const PiecewiseBeta& b) {
  json segments = json::array();
  for (std::size_t j = 1; j <= b.num_segments(); ++j) {
    std::vector<double> col;
    for (std::size_t k = 1; k <= b.num_harmonics(); ++k) col.push_back(b.value(k, j));
    segments.push_back(col);
  }
  return {{"num_harmonics", b.num_harmonics()},
          {"num_segments", b.num_segments()},
          {"units", "omega0"},
          {"segments", segments}};
}

json to_json(const StatePrepReport& r) {
  json arms = json::array();
  for (const auto& a : r.arms) {
    json e = {{"arm", to_string(a.arm)},
              {"label", a.label},
              {"infidelity", a.infidelity},
              {"trajectory", trajectory_summary(a)}};
    if (a.num_harmonics) e["num_harmonics"] = a.num_harmonics;
    if (a.num_segments) e["num_segments"] = a.num_segments;
    if (a.betas) e["betas"] = to_json(*a.betas);
    if (!a.gammas.empty()) e["gammas"] = a.gammas;
    if (a.optimization) {
      e["optimization"] = to_json(*a.optimization);
      e["cost_failures"] = a.cost_failures;
    }
    arms.push_back(e);
  }
  return {{"experiment", "state_prep"},
          {"omega", r.omega},
          {"omega0", r.omega0},
          {"interrupted", r.interrupted},
          {"arms", arms}};
}

json to_json(const AnnealReport& r) {
  json rows = json::array();
  for (const auto& a : r.rows) {
    json e = {{"num_sites", a.num_sites},
              {"arm", to_string(a.arm)},
              {"num_harmonics", a.num_harmonics},
              {"num_segments", a.num_segments},
              {"final_energy", a.final_energy},
              {"ground_energy", a.ground_energy},
              {"energy_gap", a.energy_gap}};
    if (a.betas) e["betas"] = to_json(*a.betas);
    if (a.optimization) e["optimization"] = to_json(*a.optimization);
    rows.push_back(e);
  }
  return {{"experiment", "anneal"},
          {"omega", r.omega},
          {"omega0", r.omega0},
          {"interrupted", r.interrupted},
          {"rows", rows}};
}

json to_json(const LearningReport& r) {
  json segs = json::array();
  for (const auto& s : r.segments) {
    json e = {{"index", s.index},
              {"t_start", s.t_start},
              {"t_end", s.t_end},
              {"lambda_end", s.lambda_end},
              {"betas", s.betas},
              {"energy", s.energy},
              {"tail", s.tail},
              {"optimization", to_json(s.optimization)}};
    if (s.analytical_average) e["analytical_beta1_average"] = *s.analytical_average;
    if (s.analytical_projected) e["analytical_beta1_projected"] = *s.analytical_projected;
    segs.push_back(e);
  }
  json out = {{"experiment", "learn_agp"},
              {"two_qubit", r.two_qubit},
              {"omega", r.omega},
              {"omega0", r.omega0},
              {"complete", r.complete},
              {"scored_segments", r.scored_segments},
              {"segments", segs}};
  if (!r.error.empty()) out["error"] = r.error;
  if (r.table) out["betas"] = to_json(*r.table);
  if (r.rms_projected) out["rms_projected"] = *r.rms_projected;
  if (r.rms_raw) out["rms_raw"] = *r.rms_raw;
  if (r.chain_mismatch) out["chain_mismatch"] = *r.chain_mismatch;
  return out;
}

json to_json(const ExactCdReport& r) {
  json runs = json::array();
  for (const auto& c : r.runs) {
    runs.push_back({{"tau", c.tau},
                    {"infidelity", c.infidelity},
                    {"min_instantaneous_fidelity", c.min_instantaneous_fidelity},
                    {"max_norm_drift", c.max_norm_drift},
                    {"samples", c.trajectory.size()}});
  }
  return {{"experiment", "exact_cd"}, {"runs", runs}};
}

json to_json(const LandscapeReport& r) {
  const auto& best = r.table.rows.at(r.table.min_row);
  std::size_t errors = 0;
  for (const auto& row : r.table.rows) errors += row.error.empty() ? 0 : 1;
  return {{"experiment", "landscape"},
          {"control", r.control == LandscapeControl::beta ? "beta" : "gamma"},
          {"omega", r.omega},
          {"omega0", r.omega0},
          {"points", r.table.rows.size()},
          {"failed_points", errors},
          {"min_row", r.table.min_row},
          {"min_params", std::vector<double>(best.params.data(),
                                             best.params.data() + best.params.size())},
          {"min_cost", number_or_null(best.cost)}};
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os << "t,lambda,fidelity_target,fidelity_instantaneous,energy,norm_drift\n";
  for (const auto& r : rows) {
    os << format_number(r.t) << ',' << format_number(r.lambda) << ','
       << format_number(r.fidelity_target) << ',' << format_number(r.fidelity_instantaneous) << ','
       << format_number(r.energy) << ',' << format_number(r.norm_drift) << '\n';
  }
  return os.str();
}

std::string anneal_csv(const std::vector<AnnealRow>& rows) {
  std::ostringstream os;
  os << "N,N_k,N_tau,arm,E_final,E_T,E_minus_E_T\n";
  for (const auto& r : rows) {
    os << r.num_sites << ',' << r.num_harmonics << ',' << r.num_segments << ','
       << to_string(r.arm) << ',' << format_number(r.final_energy) << ','
       << format_number(r.ground_energy) << ',' << format_number(r.energy_gap) << '\n';
  }
  return os.str();
}

std::string learning_csv(const LearningReport& r, double tau) {
  std::ostringstream os;
  const std::size_t nk = r.segments.empty() ? 1 : r.segments.front().betas.size();
  os << "segment,t_start,t_end,t_mid_over_tau,lambda_end";
  for (std::size_t k = 1; k <= nk; ++k) os << ",beta_" << k;
  os << ",energy";
  if (r.two_qubit) os << ",analytical_beta1_average,analytical_beta1_projected";
  os << ",unidentifiable_tail\n";
  for (const auto& s : r.segments) {
    os << s.index << ',' << format_number(s.t_start) << ',' << format_number(s.t_end) << ','
       << format_number(0.5 * (s.t_start + s.t_end) / tau) << ',' << format_number(s.lambda_end);
    for (double b : s.betas) os << ',' << format_number(b);
    os << ',' << format_number(s.energy);
    if (r.two_qubit) {
      os << ',' << format_number(s.analytical_average.value_or(NAN)) << ','
         << format_number(s.analytical_projected.value_or(NAN));
    }
    os << ',' << (s.tail ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string landscape_csv(const LandscapeReport& r) {
  std::ostringstream os;
  const std::string name = r.control == LandscapeControl::beta ? "beta1_seg" : "gamma";
  const std::size_t dim =
      r.table.rows.empty() ? 0 : static_cast<std::size_t>(r.table.rows.front().params.size());
  for (std::size_t i = 1; i <= dim; ++i) {
    os << (r.control == LandscapeControl::gamma ? name + std::to_string(i)
                                                : (dim == 1 ? std::string("beta1")
                                                            : name + std::to_string(i)))
       << ',';
  }
  os << "cost,error\n";
  for (const auto& row : r.table.rows) {
    for (Eigen::Index i = 0; i < row.params.size(); ++i) os << format_number(row.params(i)) << ',';
    std::string err = row.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << format_number(row.cost) << ',' << err << '\n';
  }
  return os.str();
}

}  // namespace caffeine
