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

#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "caffeine/config.hpp"
#include "caffeine/errors.hpp"
#include "caffeine/report.hpp"

namespace caffeine::cli {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef CAFFEINE_VERSION
#define CAFFEINE_VERSION "0.0.0"
#endif

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<double> omega_mult;
  std::string out_dir;
  std::vector<std::string> arms;
  std::vector<std::string> axes;  // landscape: start:stop:count
  std::string control;            // landscape: beta|gamma
};

// Collects output files and writes them plus the manifest.
class Outputs {
 public:
  Outputs(fs::path dir, std::string command, const ExperimentConfig& cfg, const fs::path& config)
      : dir_(std::move(dir)), command_(std::move(command)), started_(utc_now()) {
    echo_ = config_to_json(cfg);
    seed_ = cfg.seed;
    config_path_ = config.string();
    std::ifstream in(config, std::ios::binary);
    std::ostringstream raw;
    raw << in.rdbuf();
    config_file_sha256_ = sha256_hex(raw.str());
  }

  void ensure_dir() { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    ensure_dir();
    write_atomic(dir_ / name, content);
    files_[name] = {sha256_hex(content), content.size()};
  }

  void write_report(const json& results) {
    json report = {{"schema_version", kReportSchemaVersion},
                   {"artifact_version", CAFFEINE_VERSION},
                   {"command", command_},
                   {"seed", seed_},
                   {"config", echo_},
                   {"results", results}};
    write("report.json", report.dump(2) + "\n");
  }

  void write_manifest() {
    json files = json::array();
    for (const auto& [name, info] : files_) {
      files.push_back({{"path", name}, {"sha256", info.first}, {"bytes", info.second}});
    }
    const std::string echo = echo_.dump();
    json manifest = {{"schema_version", 1},
                     {"artifact_version", CAFFEINE_VERSION},
                     {"command", command_},
                     {"seed", seed_},
                     {"config_path", config_path_},
                     {"config_file_sha256", config_file_sha256_},
                     {"config_sha256", sha256_hex(echo)},
                     {"started_at", started_},
                     {"finished_at", utc_now()},
                     {"files", files}};
    ensure_dir();
    write_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string command_;
  std::string started_;
  json echo_;
  std::string config_path_;
  std::string config_file_sha256_;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::pair<std::string, std::size_t>> files_;
};

ExperimentConfig prepare(const Options& opt, std::atomic<bool>* abort_flag) {
  ExperimentConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.jobs) cfg.jobs = *opt.jobs;
  if (opt.omega_mult) cfg.drive.omega_multiplier = *opt.omega_mult;
  if (!opt.arms.empty()) {
    cfg.arms.clear();
    for (const auto& a : opt.arms) cfg.arms.push_back(arm_from_string(a));
  }
  if (!opt.control.empty()) {
    if (opt.control == "beta") {
      cfg.landscape.control = LandscapeControl::beta;
    } else if (opt.control == "gamma") {
      cfg.landscape.control = LandscapeControl::gamma;
    } else {
      throw ConfigError("--control: expected beta or gamma");
    }
  }
  if (!opt.axes.empty()) {
    cfg.landscape.axes.clear();
    for (const auto& spec : opt.axes) {
      LandscapeAxis axis;
      char c1 = 0;
      char c2 = 0;
      std::istringstream is(spec);
      if (!(is >> axis.start >> c1 >> axis.stop >> c2 >> axis.count) || c1 != ':' || c2 != ':' ||
          axis.count == 0 || !is.eof()) {
        throw ConfigError("--axis '" + spec + "': expected start:stop:count");
      }
      cfg.landscape.axes.push_back(axis);
    }
  }
  cfg.validate();
  cfg.abort_flag = abort_flag;
  return cfg;
}

fs::path resolve_out_dir(const Options& opt, const std::string& command) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return fs::path("caffeine-out") / command;
}

bool interrupted(const std::atomic<bool>* flag) { return flag && flag->load(); }

std::string tau_tag(double tau) {
  std::string s = format_number(tau);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

int cmd_state_prep(const Options& opt, std::atomic<bool>* flag) {
  const ExperimentConfig cfg = prepare(opt, flag);
  Outputs out(resolve_out_dir(opt, "state-prep"), "state-prep", cfg, opt.config);
  const StatePrepReport rep = run_state_prep(cfg);
  for (const auto& a : rep.arms) out.write("trajectory_" + a.label + ".csv", trajectory_csv(a.trajectory));
  out.write_report(to_json(rep));
  out.write_manifest();
  for (const auto& a : rep.arms) {
    std::cout << a.label << ": 1-F = " << format_number(a.infidelity) << "\n";
  }
  return rep.interrupted || interrupted(flag) ? kInterrupted : kOk;
}

int cmd_anneal(const Options& opt, std::atomic<bool>* flag) {
  const ExperimentConfig cfg = prepare(opt, flag);
  Outputs out(resolve_out_dir(opt, "anneal"), "anneal", cfg, opt.config);
  const AnnealReport rep = run_ising_anneal(
      cfg, [&](const std::vector<AnnealRow>& rows) { out.write("anneal.csv", anneal_csv(rows)); });
  out.write("anneal.csv", anneal_csv(rep.rows));
  out.write_report(to_json(rep));
  out.write_manifest();
  for (const auto& r : rep.rows) {
    std::cout << "N=" << r.num_sites << " " << to_string(r.arm) << " N_k=" << r.num_harmonics
              << " N_tau=" << r.num_segments << ": E-E_T = " << format_number(r.energy_gap) << "\n";
  }
  return rep.interrupted || interrupted(flag) ? kInterrupted : kOk;
}

int cmd_learn_agp(const Options& opt, std::atomic<bool>* flag) {
  const ExperimentConfig cfg = prepare(opt, flag);
  Outputs out(resolve_out_dir(opt, "learn-agp"), "learn-agp", cfg, opt.config);
  const LearningReport rep = run_agp_learning(cfg);
  out.write("learned_vs_analytical.csv", learning_csv(rep, cfg.schedule.tau));
  out.write_report(to_json(rep));
  out.write_manifest();
  if (rep.rms_projected) {
    std::cout << "scored segments: " << rep.scored_segments
              << ", RMS vs projected analytical: " << format_number(*rep.rms_projected) << "\n";
  }
  if (!rep.complete) {
    if (interrupted(flag)) return kInterrupted;
    std::cerr << "error: " << rep.error << "\n";
    return kNumericalError;
  }
  return kOk;
}

int cmd_landscape(const Options& opt, std::atomic<bool>* flag) {
  const ExperimentConfig cfg = prepare(opt, flag);
  Outputs out(resolve_out_dir(opt, "landscape"), "landscape", cfg, opt.config);
  const LandscapeReport rep = run_landscape(cfg);
  out.write("landscape.csv", landscape_csv(rep));
  out.write_report(to_json(rep));
  out.write_manifest();
  const auto& best = rep.table.rows[rep.table.min_row];
  std::cout << "minimum at row " << rep.table.min_row << ": cost " << format_number(best.cost) << "\n";
  return kOk;
}

int cmd_exact_cd(const Options& opt, std::atomic<bool>* flag) {
  const ExperimentConfig cfg = prepare(opt, flag);
  Outputs out(resolve_out_dir(opt, "exact-cd"), "exact-cd", cfg, opt.config);
  const ExactCdReport rep = reference_exact_cd(cfg);
  for (const auto& r : rep.runs) {
    out.write("trajectory_exact_cd_tau" + tau_tag(r.tau) + ".csv", trajectory_csv(r.trajectory));
  }
  out.write_report(to_json(rep));
  out.write_manifest();
  for (const auto& r : rep.runs) {
    std::cout << "tau=" << format_number(r.tau) << ": 1-F = " << format_number(r.infidelity)
              << ", min instantaneous F = " << format_number(r.min_instantaneous_fidelity) << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::atomic<bool>* abort_flag) {
  CLI::App app{"Floquet-engineered counterdiabatic driving experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CAFFEINE_VERSION));
  Options opt;

  auto add_common = [&](CLI::App* sub, bool with_arm) {
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required();
    sub->add_option("--seed", opt.seed, "Override the RNG seed");
    sub->add_option("--jobs", opt.jobs, "Maximum parallel jobs")->check(CLI::PositiveNumber);
    sub->add_option("--omega-mult", opt.omega_mult, "Drive frequency in units of 2*pi/tau")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", opt.out_dir,
                    std::string("Output directory (default: $") + kOutDirEnv + " or ./caffeine-out)");
    if (with_arm) sub->add_option("--arm", opt.arms, "Restrict to these arms (repeatable)");
  };
  CLI::App* state_prep = app.add_subcommand("state-prep", "Two-qubit Bell-state preparation arms");
  add_common(state_prep, true);
  CLI::App* anneal = app.add_subcommand("anneal", "Ising annealing energy table");
  add_common(anneal, true);
  CLI::App* learn = app.add_subcommand("learn-agp", "Segment-wise learning of the drive coefficients");
  add_common(learn, false);
  CLI::App* landscape = app.add_subcommand("landscape", "Cost-landscape scan");
  add_common(landscape, false);
  landscape->add_option("--axis", opt.axes, "Axis as start:stop:count (repeatable)");
  landscape->add_option("--control", opt.control, "beta or gamma");
  CLI::App* exact_cd = app.add_subcommand("exact-cd", "Exact counterdiabatic reference runs");
  add_common(exact_cd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*state_prep) return cmd_state_prep(opt, abort_flag);
    if (*anneal) return cmd_anneal(opt, abort_flag);
    if (*learn) return cmd_learn_agp(opt, abort_flag);
    if (*landscape) return cmd_landscape(opt, abort_flag);
    if (*exact_cd) return cmd_exact_cd(opt, abort_flag);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what();
    if (!e.diagnostics().empty()) std::cerr << " " << e.diagnostics();
    std::cerr << "\n";
    return kNumericalError;
  } catch (const DegeneracyError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace caffeine::cli
