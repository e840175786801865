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

#include "caffeine/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "caffeine/errors.hpp"

namespace caffeine {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  ~Section() = default;

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return mark(key, fallback);
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return mark(key, std::move(fallback));
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
    if (!has(key)) return mark(key, std::move(fallback));
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) {
      throw ConfigError(where(key) + ": expected a non-empty array of integers");
    }
    std::vector<std::size_t> out;
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < 1) {
        throw ConfigError(where(key) + ": entries must be positive integers");
      }
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  std::pair<double, double> interval(const std::string& key, std::pair<double, double> fallback) {
    if (!has(key)) return mark(key, fallback);
    const auto v = numbers(key, {});
    if (v.size() != 2 || !(v[0] < v[1])) {
      throw ConfigError(where(key) + ": expected [lower, upper] with lower < upper");
    }
    return {v[0], v[1]};
  }

  std::optional<Section> child(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return Section(raw(key), where(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  template <typename T>
  T mark(const std::string& key, T value) {
    seen_.insert(key);
    return value;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  Section root(j, "");
  const std::size_t version = root.count("schema_version", kConfigSchemaVersion);
  if (version != static_cast<std::size_t>(kConfigSchemaVersion)) {
    throw ConfigError("schema_version: unsupported version " + std::to_string(version));
  }
  cfg.seed = root.count("seed", cfg.seed);
  cfg.jobs = root.count("jobs", cfg.jobs);
  cfg.trajectory_samples = root.count("trajectory_samples", cfg.trajectory_samples);
  if (root.has("arms")) {
    const json& arms = root.raw("arms");
    if (!arms.is_array()) throw ConfigError("arms: expected an array of arm names");
    cfg.arms.clear();
    for (const auto& a : arms) {
      if (!a.is_string()) throw ConfigError("arms: expected an array of arm names");
      cfg.arms.push_back(wrap("arms", [&] { return arm_from_string(a.get<std::string>()); }));
    }
  } else {
    root.text("arms", "");
  }

  if (auto m = root.child("model")) {
    const std::string kind = m->text("kind", "two_qubit");
    if (kind == "two_qubit") {
      cfg.model.kind = ModelKind::two_qubit;
      cfg.model.two_qubit.coupling = m->number("coupling", 1.0);
      cfg.model.two_qubit.field = m->number("field", 5.0);
    } else if (kind == "ising") {
      cfg.model.kind = ModelKind::ising;
      cfg.model.sizes = m->counts("sizes", cfg.model.sizes);
      cfg.model.coupling = m->number("coupling", 1.0);
      cfg.model.field = m->number("field", 0.0);
      const std::string b = m->text("boundary", "open");
      if (b == "open") {
        cfg.model.boundary = Boundary::open;
      } else if (b == "periodic") {
        cfg.model.boundary = Boundary::periodic;
      } else {
        throw ConfigError(m->where("boundary") + ": expected open or periodic");
      }
      cfg.model.max_sites = m->count("max_sites", cfg.model.max_sites);
      if (cfg.model.max_sites > kHardMaxSites) {
        throw ConfigError(m->where("max_sites") + ": above the hard limit of " +
                          std::to_string(kHardMaxSites));
      }
    } else {
      throw ConfigError(m->where("kind") + ": expected two_qubit or ising");
    }
    m->finish();
  }

  if (auto s = root.child("schedule")) {
    const std::string kind = s->text("kind", to_string(cfg.schedule.kind));
    cfg.schedule.kind = wrap(s->where("kind"), [&] { return schedule_kind_from_string(kind); });
    cfg.schedule.tau = s->number("tau", cfg.schedule.tau);
    s->finish();
  }

  if (auto d = root.child("drive")) {
    cfg.drive.harmonics = d->counts("harmonics", cfg.drive.harmonics);
    cfg.drive.segments = d->counts("segments", cfg.drive.segments);
    cfg.drive.omega_multiplier = d->number("omega_multiplier", cfg.drive.omega_multiplier);
    if (d->has("omega0")) {
      cfg.drive.omega0 = d->number("omega0", 0.0);
    } else {
      d->number("omega0", 0.0);
    }
    std::tie(cfg.drive.beta_lower, cfg.drive.beta_upper) =
        d->interval("beta_bounds", {cfg.drive.beta_lower, cfg.drive.beta_upper});
    cfg.drive.min_oscillations = d->number("min_oscillations", cfg.drive.min_oscillations);
    cfg.drive.warm_start = d->flag("warm_start", cfg.drive.warm_start);
    d->finish();
  }

  if (auto a = root.child("anneal_control")) {
    cfg.anneal_control.num_gammas = a->count("num_gammas", cfg.anneal_control.num_gammas);
    std::tie(cfg.anneal_control.gamma_lower, cfg.anneal_control.gamma_upper) = a->interval(
        "gamma_bounds", {cfg.anneal_control.gamma_lower, cfg.anneal_control.gamma_upper});
    a->finish();
  }

  if (auto l = root.child("learning")) {
    cfg.learning.num_segments = l->count("num_segments", cfg.learning.num_segments);
    std::tie(cfg.learning.beta_lower, cfg.learning.beta_upper) =
        l->interval("beta_bounds", {cfg.learning.beta_lower, cfg.learning.beta_upper});
    cfg.learning.tail_cutoff = l->number("tail_cutoff", cfg.learning.tail_cutoff);
    l->finish();
  }

  if (auto l = root.child("landscape")) {
    const std::string control = l->text("control", "beta");
    if (control == "beta") {
      cfg.landscape.control = LandscapeControl::beta;
    } else if (control == "gamma") {
      cfg.landscape.control = LandscapeControl::gamma;
    } else {
      throw ConfigError(l->where("control") + ": expected beta or gamma");
    }
    cfg.landscape.max_points = l->count("max_points", cfg.landscape.max_points);
    if (l->has("axes")) {
      const json& axes = l->raw("axes");
      if (!axes.is_array() || axes.empty()) {
        throw ConfigError(l->where("axes") + ": expected a non-empty array");
      }
      for (std::size_t i = 0; i < axes.size(); ++i) {
        Section ax(axes[i], l->where("axes") + "[" + std::to_string(i) + "]");
        LandscapeAxis axis;
        axis.start = ax.number("start", 0.0);
        axis.stop = ax.number("stop", 0.0);
        axis.count = ax.count("count", 1);
        if (axis.count == 0) throw ConfigError(ax.where("count") + ": must be >= 1");
        ax.finish();
        cfg.landscape.axes.push_back(axis);
      }
    } else {
      l->text("axes", "");
    }
    l->finish();
  }

  if (auto o = root.child("optimizer")) {
    auto& opt = cfg.optimizer;
    opt.max_function_evals = o->count("max_function_evals", opt.max_function_evals);
    opt.max_global_iterations = o->count("max_global_iterations", opt.max_global_iterations);
    opt.initial_temperature = o->number("initial_temperature", opt.initial_temperature);
    opt.visiting_param = o->number("visiting_param", opt.visiting_param);
    opt.acceptance_param = o->number("acceptance_param", opt.acceptance_param);
    opt.restart_temp_ratio = o->number("restart_temp_ratio", opt.restart_temp_ratio);
    opt.local_search_enabled = o->flag("local_search", opt.local_search_enabled);
    opt.local_search_max_evals = o->count("local_search_max_evals", opt.local_search_max_evals);
    if (o->has("target_cost")) {
      opt.target_cost = o->number("target_cost", 0.0);
    } else {
      o->number("target_cost", 0.0);
    }
    o->finish();
    wrap("optimizer", [&] {
      opt.validate();
      return 0;
    });
  }

  if (auto p = root.child("propagator")) {
    auto& prop = cfg.propagator;
    prop.method = wrap(p->where("method"),
                       [&] { return integrator_from_string(p->text("method", to_string(prop.method))); });
    prop.rel_tol = p->number("rel_tol", prop.rel_tol);
    prop.abs_tol = p->number("abs_tol", prop.abs_tol);
    prop.min_steps_per_oscillation = static_cast<int>(
        p->count("min_steps_per_oscillation", static_cast<std::size_t>(prop.min_steps_per_oscillation)));
    prop.max_steps = p->count("max_steps", prop.max_steps);
    prop.fixed_step = p->number("fixed_step", prop.fixed_step);
    prop.self_check = p->flag("self_check", prop.self_check);
    p->finish();
    if (!(prop.rel_tol > 0.0 && prop.abs_tol > 0.0)) {
      throw ConfigError("propagator: tolerances must be positive");
    }
    if (prop.min_steps_per_oscillation < 20) {
      throw ConfigError("propagator.min_steps_per_oscillation: must be >= 20");
    }
  }

  if (auto e = root.child("exact_cd")) {
    cfg.cd_taus = e->numbers("taus", cfg.cd_taus);
    e->finish();
  }
  root.finish();
  wrap("config", [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["trajectory_samples"] = cfg.trajectory_samples;
  j["arms"] = json::array();
  for (Arm a : cfg.arms) j["arms"].push_back(to_string(a));
  if (cfg.model.kind == ModelKind::two_qubit) {
    j["model"] = {{"kind", "two_qubit"},
                  {"coupling", cfg.model.two_qubit.coupling},
                  {"field", cfg.model.two_qubit.field}};
  } else {
    j["model"] = {{"kind", "ising"},
                  {"sizes", cfg.model.sizes},
                  {"coupling", cfg.model.coupling},
                  {"field", cfg.model.field},
                  {"boundary", cfg.model.boundary == Boundary::open ? "open" : "periodic"},
                  {"max_sites", cfg.model.max_sites}};
  }
  j["schedule"] = {{"kind", to_string(cfg.schedule.kind)}, {"tau", cfg.schedule.tau}};
  j["drive"] = {{"harmonics", cfg.drive.harmonics},
                {"segments", cfg.drive.segments},
                {"omega_multiplier", cfg.drive.omega_multiplier},
                {"omega0", cfg.omega0()},
                {"beta_bounds", {cfg.drive.beta_lower, cfg.drive.beta_upper}},
                {"min_oscillations", cfg.drive.min_oscillations},
                {"warm_start", cfg.drive.warm_start}};
  j["anneal_control"] = {
      {"num_gammas", cfg.anneal_control.num_gammas},
      {"gamma_bounds", {cfg.anneal_control.gamma_lower, cfg.anneal_control.gamma_upper}}};
  j["learning"] = {{"num_segments", cfg.learning.num_segments},
                   {"beta_bounds", {cfg.learning.beta_lower, cfg.learning.beta_upper}},
                   {"tail_cutoff", cfg.learning.tail_cutoff}};
  json axes = json::array();
  for (const auto& a : cfg.landscape.axes) {
    axes.push_back({{"start", a.start}, {"stop", a.stop}, {"count", a.count}});
  }
  j["landscape"] = {{"control", cfg.landscape.control == LandscapeControl::beta ? "beta" : "gamma"},
                    {"max_points", cfg.landscape.max_points}};
  if (!axes.empty()) j["landscape"]["axes"] = axes;
  const auto& o = cfg.optimizer;
  j["optimizer"] = {{"max_function_evals", o.max_function_evals},
                    {"max_global_iterations", o.max_global_iterations},
                    {"initial_temperature", o.initial_temperature},
                    {"visiting_param", o.visiting_param},
                    {"acceptance_param", o.acceptance_param},
                    {"restart_temp_ratio", o.restart_temp_ratio},
                    {"local_search", o.local_search_enabled},
                    {"local_search_max_evals", o.local_search_max_evals}};
  if (o.target_cost) j["optimizer"]["target_cost"] = *o.target_cost;
  const auto& p = cfg.propagator;
  j["propagator"] = {{"method", to_string(p.method)},
                     {"rel_tol", p.rel_tol},
                     {"abs_tol", p.abs_tol},
                     {"min_steps_per_oscillation", p.min_steps_per_oscillation},
                     {"max_steps", p.max_steps},
                     {"fixed_step", p.fixed_step},
                     {"self_check", p.self_check}};
  j["exact_cd"] = {{"taus", cfg.cd_taus}};
  return j;
}

}  // namespace caffeine
