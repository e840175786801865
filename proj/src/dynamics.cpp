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

#include "caffeine/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "caffeine/agp.hpp"
#include "caffeine/errors.hpp"

namespace caffeine {

namespace {

constexpr Complex kMinusI{0.0, -1.0};
constexpr double kAbortDrift = 1e-6;

// Row-compressed copy of a term for matrix-vector products. Real storage when
// the matrix has no imaginary part, which covers every Pauli-X/Z model.
struct CompressedTerm {
  std::vector<Eigen::Index> row_start;
  std::vector<Eigen::Index> cols;
  std::vector<double> real_vals;
  std::vector<Complex> complex_vals;
  bool real = true;

  static std::optional<CompressedTerm> from_dense(const OperatorMatrix& m) {
    const Eigen::Index d = m.rows();
    Eigen::Index nnz = 0;
    bool real = true;
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) {
        if (m(r, c) != Complex(0.0, 0.0)) {
          ++nnz;
          if (m(r, c).imag() != 0.0) real = false;
        }
      }
    }
    if (nnz * 4 > d * d) return std::nullopt;
    CompressedTerm out;
    out.real = real;
    out.row_start.reserve(static_cast<std::size_t>(d + 1));
    out.row_start.push_back(0);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        if (m(r, c) == Complex(0.0, 0.0)) continue;
        out.cols.push_back(c);
        if (real) {
          out.real_vals.push_back(m(r, c).real());
        } else {
          out.complex_vals.push_back(m(r, c));
        }
      }
      out.row_start.push_back(static_cast<Eigen::Index>(out.cols.size()));
    }
    return out;
  }

  // out += scale * M * psi
  void accumulate(double scale, const QuantumState& psi, QuantumState& out) const {
    const auto d = static_cast<Eigen::Index>(row_start.size()) - 1;
    for (Eigen::Index r = 0; r < d; ++r) {
      Complex acc = 0.0;
      const auto begin = row_start[static_cast<std::size_t>(r)];
      const auto end = row_start[static_cast<std::size_t>(r) + 1];
      if (real) {
        for (auto p = begin; p < end; ++p) {
          acc += real_vals[static_cast<std::size_t>(p)] * psi(cols[static_cast<std::size_t>(p)]);
        }
      } else {
        for (auto p = begin; p < end; ++p) {
          acc += complex_vals[static_cast<std::size_t>(p)] * psi(cols[static_cast<std::size_t>(p)]);
        }
      }
      out(r) += scale * acc;
    }
  }
};

}  // namespace

struct CompressedCache {
  std::vector<std::optional<CompressedTerm>> terms;
};

namespace {

std::vector<std::optional<CompressedTerm>> compress_all(const std::vector<OperatorMatrix>& terms) {
  std::vector<std::optional<CompressedTerm>> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(CompressedTerm::from_dense(t));
  return out;
}

}  // namespace

TimeDependentHamiltonian::TimeDependentHamiltonian(std::vector<OperatorMatrix> terms,
                                                   CoefficientFn coefficients)
    : terms_(std::move(terms)), coefficients_(std::move(coefficients)) {
  if (terms_.empty()) throw DomainError("time-dependent Hamiltonian needs at least one term");
  dimension_ = static_cast<std::size_t>(terms_.front().rows());
  for (const auto& t : terms_) {
    if (static_cast<std::size_t>(t.rows()) != dimension_ || t.rows() != t.cols()) {
      throw DimensionError("time-dependent Hamiltonian terms differ in dimension");
    }
  }
  compressed_ = std::make_shared<CompressedCache>(CompressedCache{compress_all(terms_)});
}

TimeDependentHamiltonian::TimeDependentHamiltonian(MatrixFn matrix, std::size_t dimension)
    : dimension_(dimension), matrix_fn_(std::move(matrix)) {}

std::size_t TimeDependentHamiltonian::piece_of(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints.begin(), breakpoints.end(), t) - breakpoints.begin());
}

OperatorMatrix TimeDependentHamiltonian::matrix(double t, std::size_t piece) const {
  if (matrix_fn_) return matrix_fn_(t);
  std::vector<double> c(terms_.size());
  coefficients_(t, piece, c);
  const auto d = static_cast<Eigen::Index>(dimension_);
  OperatorMatrix out = OperatorMatrix::Zero(d, d);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (c[i] != 0.0) out += c[i] * terms_[i];
  }
  return out;
}

void TimeDependentHamiltonian::apply(double t, std::size_t piece, const QuantumState& psi,
                                     QuantumState& out) const {
  if (matrix_fn_) {
    out.noalias() = matrix_fn_(t) * psi;
    return;
  }
  thread_local std::vector<double> c;
  c.resize(terms_.size());
  coefficients_(t, piece, c);
  out.setZero(psi.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (c[i] == 0.0) continue;
    const auto& ct = compressed_->terms[i];
    if (ct) {
      ct->accumulate(c[i], psi, out);
    } else {
      out.noalias() += c[i] * (terms_[i] * psi);
    }
  }
}

std::string to_string(Integrator method) {
  switch (method) {
    case Integrator::dop853:
      return "dop853";
    case Integrator::dp54:
      return "dp54";
    case Integrator::magnus4:
      return "magnus4";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& s) {
  if (s == "dop853") return Integrator::dop853;
  if (s == "dp54") return Integrator::dp54;
  if (s == "magnus4") return Integrator::magnus4;
  throw ConfigError("unknown integrator '" + s + "' (expected dop853, dp54 or magnus4)");
}

namespace {

// Dormand–Prince 5(4).
constexpr double kDp54C[6] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0};
constexpr double kDp54A[6][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656}};
constexpr double kDp54B[6] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                              11.0 / 84};
// b − b̂ including the FSAL stage.
constexpr double kDp54E[7] = {-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920,
                              17253.0 / 339200, -22.0 / 525, 1.0 / 40};

// Dormand–Prince 8(5,3) (Hairer's DOP853).
constexpr double kDop853C[12] = {0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0};
constexpr double kDop853A[12][12] = {
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0},
    {0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0},
    {0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0},
    {-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0},
    {2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0},
};
constexpr double kDop853B[12] = {0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259};
constexpr double kDop853E3[13] = {-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0};
constexpr double kDop853E5[13] = {0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0};

struct Tableau {
  int stages;
  const double* c;
  const double* a;  // row-major, stride 12
  int a_stride;
  const double* b;
  double error_exponent;
  bool dual_error;  // DOP853's combined 5th/3rd-order estimate
  const double* e;  // DP54 error weights, or DOP853 E5
  const double* e3;
};

constexpr Tableau kDp54{6, kDp54C, &kDp54A[0][0], 6, kDp54B, -1.0 / 5.0, false, kDp54E, nullptr};
constexpr Tableau kDop853{12,  kDop853C, &kDop853A[0][0], 12, kDop853B, -1.0 / 8.0, true,
                          kDop853E5, kDop853E3};

struct StepState {
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

double step_cap(const TimeDependentHamiltonian& h, const PropagatorConfig& cfg) {
  double cap = std::numeric_limits<double>::infinity();
  if (h.oscillation_period > 0.0) {
    cap = h.oscillation_period / static_cast<double>(std::max(1, cfg.min_steps_per_oscillation));
  }
  if (cfg.max_step > 0.0) cap = std::min(cap, cfg.max_step);
  return cap;
}

void check_budget(const StepState& st, const PropagatorConfig& cfg, double t) {
  if (st.steps + st.rejected > cfg.max_steps) {
    std::ostringstream os;
    os << "{\"steps\":" << st.steps << ",\"rejected\":" << st.rejected << ",\"t\":" << t << "}";
    throw NumericalError("propagation step budget exceeded", os.str());
  }
}

// Integrates over [a, b] inside a single coefficient piece. `h_try` carries
// the adaptive step between calls.
void rk_interval(const Tableau& tab, const TimeDependentHamiltonian& ham, std::size_t piece,
                 double a, double b, QuantumState& psi, const PropagatorConfig& cfg, double cap,
                 double& h_try, StepState& st) {
  const auto d = psi.size();
  const auto n = static_cast<std::size_t>(tab.stages);
  std::vector<QuantumState> k(n + 1, QuantumState(d));
  QuantumState tmp(d);
  QuantumState y_new(d);
  QuantumState err5(d);
  QuantumState err3(d);
  auto rhs = [&](double t, const QuantumState& y, QuantumState& out) {
    ham.apply(std::clamp(t, a, b), piece, y, out);
    out *= kMinusI;
  };

  double t = a;
  if (h_try <= 0.0) h_try = std::min(cap, (b - a) / 100.0);
  rhs(t, psi, k[0]);
  bool previous_rejected = false;
  while (t < b) {
    double h = std::min({h_try, cap, b - t});
    const bool last = (t + h >= b) || (b - (t + h)) < 1e-14 * std::max(1.0, std::abs(b));
    if (last) h = b - t;
    for (std::size_t s = 1; s < n; ++s) {
      tmp = psi;
      for (std::size_t j = 0; j < s; ++j) {
        const double aij = tab.a[s * static_cast<std::size_t>(tab.a_stride) + j];
        if (aij != 0.0) tmp.noalias() += (h * aij) * k[j];
      }
      rhs(t + tab.c[s] * h, tmp, k[s]);
    }
    y_new = psi;
    for (std::size_t j = 0; j < n; ++j) {
      if (tab.b[j] != 0.0) y_new.noalias() += (h * tab.b[j]) * k[j];
    }
    rhs(t + h, y_new, k[n]);

    err5.setZero();
    for (std::size_t j = 0; j <= n; ++j) {
      if (tab.e[j] != 0.0) err5.noalias() += tab.e[j] * k[j];
    }
    if (tab.dual_error) {
      err3.setZero();
      for (std::size_t j = 0; j <= n; ++j) {
        if (tab.e3[j] != 0.0) err3.noalias() += tab.e3[j] * k[j];
      }
    }
    double e5_sq = 0.0;
    double e3_sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(psi(i)), std::abs(y_new(i)));
      e5_sq += std::norm(err5(i)) / (scale * scale);
      if (tab.dual_error) e3_sq += std::norm(err3(i)) / (scale * scale);
    }
    double err = 0.0;
    if (tab.dual_error) {
      if (e5_sq > 0.0 || e3_sq > 0.0) {
        err = h * e5_sq / std::sqrt((e5_sq + 0.01 * e3_sq) * static_cast<double>(d));
      }
    } else {
      err = h * std::sqrt(e5_sq / static_cast<double>(d));
    }
    if (!std::isfinite(err)) {
      throw NumericalError("non-finite error estimate during propagation",
                           "{\"t\":" + std::to_string(t) + "}");
    }
    if (err < 1.0) {
      t = last ? b : t + h;
      psi = y_new;
      std::swap(k[0], k[n]);
      ++st.steps;
      double factor = err == 0.0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err, tab.error_exponent));
      if (previous_rejected) factor = std::min(1.0, factor);
      if (!last) h_try = h * factor;
      previous_rejected = false;
    } else {
      ++st.rejected;
      h_try = h * std::max(0.2, 0.9 * std::pow(err, tab.error_exponent));
      previous_rejected = true;
    }
    check_budget(st, cfg, t);
  }
}

void magnus4_interval(const TimeDependentHamiltonian& ham, std::size_t piece, double a, double b,
                      QuantumState& psi, double step, StepState& st, const PropagatorConfig& cfg) {
  const double span = b - a;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / step - 1e-9)));
  const double h = span / static_cast<double>(n);
  const double offset = std::sqrt(3.0) / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a + static_cast<double>(i) * h;
    const OperatorMatrix h1 = ham.matrix(t + (0.5 - offset) * h, piece);
    const OperatorMatrix h2 = ham.matrix(t + (0.5 + offset) * h, piece);
    // exp(−iK), K = (h/2)(H1+H2) − i(√3h²/12)[H2,H1]
    OperatorMatrix k = 0.5 * h * (h1 + h2) +
                       Complex(0.0, -std::sqrt(3.0) * h * h / 12.0) * commutator(h2, h1);
    k = 0.5 * (k + k.adjoint());
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(k);
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * kMinusI).array().exp().matrix();
    psi = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
    ++st.steps;
    check_budget(st, cfg, t);
  }
}

PropagationResult propagate_once(const TimeDependentHamiltonian& h, const QuantumState& psi0,
                                 double t_start, double t_end, const PropagatorConfig& cfg,
                                 std::span<const double> sample_times) {
  if (!(t_end > t_start)) throw DomainError("propagate needs t_end > t_start");
  if (static_cast<std::size_t>(psi0.size()) != h.dimension()) {
    throw DimensionError("initial state dimension does not match Hamiltonian");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw DomainError("initial state is not normalized");
  if (!(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0)) throw DomainError("tolerances must be positive");
  if (cfg.min_steps_per_oscillation < 1) throw DomainError("min_steps_per_oscillation must be >= 1");

  // Stop points: breakpoints and sample times inside (t_start, t_end).
  std::vector<double> stops;
  for (double bp : h.breakpoints) {
    if (bp > t_start && bp < t_end) stops.push_back(bp);
  }
  for (double s : sample_times) {
    if (s < t_start - 1e-12 * std::abs(t_end) || s > t_end + 1e-12 * std::abs(t_end)) {
      throw DomainError("sample time outside the propagation interval");
    }
    if (s > t_start && s < t_end) stops.push_back(s);
  }
  stops.push_back(t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::vector<double> samples(sample_times.begin(), sample_times.end());
  std::sort(samples.begin(), samples.end());
  std::size_t next_sample = 0;

  PropagationResult res;
  QuantumState psi = psi0;
  if (!samples.empty()) res.trajectory.emplace();
  auto record = [&](double t) {
    if (!res.trajectory) return;
    while (next_sample < samples.size() &&
           samples[next_sample] <= t + 1e-12 * std::max(1.0, std::abs(t))) {
      res.trajectory->times.push_back(samples[next_sample]);
      res.trajectory->states.push_back(psi);
      res.trajectory->norm_drift.push_back(std::abs(psi.norm() - 1.0));
      ++next_sample;
    }
  };
  record(t_start);

  const double cap = step_cap(h, cfg);
  double fixed = cfg.fixed_step;
  if (cfg.method == Integrator::magnus4 && fixed <= 0.0) {
    fixed = std::isfinite(cap) ? cap : (t_end - t_start) / 1000.0;
  }
  StepState st;
  double h_try = 0.0;
  double a = t_start;
  for (double b : stops) {
    if (b <= a) continue;
    const std::size_t piece = h.piece_of(0.5 * (a + b));
    switch (cfg.method) {
      case Integrator::dop853:
        rk_interval(kDop853, h, piece, a, b, psi, cfg, cap, h_try, st);
        break;
      case Integrator::dp54:
        rk_interval(kDp54, h, piece, a, b, psi, cfg, cap, h_try, st);
        break;
      case Integrator::magnus4:
        magnus4_interval(h, piece, a, b, psi, fixed, st, cfg);
        break;
    }
    const double drift = std::abs(psi.norm() - 1.0);
    res.max_norm_drift = std::max(res.max_norm_drift, drift);
    if (drift > kAbortDrift) {
      std::ostringstream os;
      os << "{\"t\":" << b << ",\"norm_drift\":" << drift << ",\"steps\":" << st.steps << "}";
      throw NumericalError("norm drift beyond 1e-6", os.str());
    }
    a = b;
    record(b);
  }
  res.state = psi;
  res.steps = st.steps;
  res.rejected_steps = st.rejected;
  res.norm_drift = std::abs(psi.norm() - 1.0);
  return res;
}

}  // namespace

PropagationResult propagate(const TimeDependentHamiltonian& h, const QuantumState& psi0,
                            double t_start, double t_end, const PropagatorConfig& cfg,
                            std::span<const double> sample_times) {
  PropagationResult res = propagate_once(h, psi0, t_start, t_end, cfg, sample_times);
  if (cfg.self_check) {
    PropagatorConfig tighter = cfg;
    tighter.self_check = false;
    tighter.rel_tol *= 0.5;
    tighter.abs_tol *= 0.5;
    if (tighter.method == Integrator::magnus4) {
      const double cap = step_cap(h, cfg);
      const double base = cfg.fixed_step > 0.0 ? cfg.fixed_step
                          : std::isfinite(cap) ? cap
                                               : (t_end - t_start) / 1000.0;
      tighter.fixed_step = 0.5 * base;
    }
    const PropagationResult check = propagate_once(h, psi0, t_start, t_end, tighter, {});
    res.self_check_delta = 1.0 - fidelity(res.state, check.state);
  }
  return res;
}

FloquetDriveSpec FloquetDriveSpec::piecewise(double omega, double omega0, PiecewiseBeta beta) {
  FloquetDriveSpec d;
  d.omega = omega;
  d.omega0 = omega0;
  d.num_harmonics = beta.num_harmonics();
  d.table = std::move(beta);
  return d;
}

FloquetDriveSpec FloquetDriveSpec::continuous(double omega, double omega0,
                                              std::size_t num_harmonics, Profile profile) {
  FloquetDriveSpec d;
  d.omega = omega;
  d.omega0 = omega0;
  d.num_harmonics = num_harmonics;
  d.profile = std::move(profile);
  return d;
}

double FloquetDriveSpec::beta(std::size_t k, double t, std::optional<std::size_t> segment) const {
  if (table) return segment ? table->value(k, *segment) : beta_at(*table, k, t);
  if (profile) return profile(k, t);
  return 0.0;
}

void FloquetDriveSpec::validate(double tau) const {
  if (!(omega > 0.0) || !(omega0 > 0.0)) throw DomainError("omega and omega0 must be positive");
  if (!table && !profile) throw DomainError("Floquet drive needs a beta table or profile");
  if (table && std::abs(table->tau() - tau) > 1e-12 * tau) {
    throw DomainError("beta table tau does not match the schedule");
  }
  if (omega * tau / (2.0 * M_PI) < min_oscillations) {
    throw DomainError("omega*tau/2pi = " + std::to_string(omega * tau / (2.0 * M_PI)) +
                      " below the fast-oscillation floor " + std::to_string(min_oscillations));
  }
}

AgpProvider exact_agp_provider(const ParametricHamiltonian& model) {
  return [model](double lambda) {
    return exact_agp(model.at(lambda), model.derivative(), lambda).matrix;
  };
}

AgpProvider analytical_agp_provider(const TwoQubitParams& params) {
  return [params](double lambda) { return analytical_two_qubit_agp(params, lambda).matrix; };
}

OperatorMatrix assemble_cd_hamiltonian(const ParametricHamiltonian& model,
                                       const Schedule& schedule, const AgpProvider& agp,
                                       double t) {
  const double lambda = lambda_at(schedule, t);
  const double lambda_dot = lambda_dot_at(schedule, t);
  OperatorMatrix h = model.at(lambda);
  if (lambda_dot != 0.0) h += lambda_dot * agp(lambda);
  return h;
}

namespace {

double drive_envelope(const FloquetDriveSpec& drive, double t,
                      std::optional<std::size_t> segment) {
  double sum = 0.0;
  for (std::size_t k = 1; k <= drive.num_harmonics; ++k) {
    const double b = drive.beta(k, t, segment);
    if (b != 0.0) sum += b * std::sin(static_cast<double>(2 * k - 1) * drive.omega * t);
  }
  return sum * drive.omega0;
}

}  // namespace

OperatorMatrix assemble_floquet_hamiltonian(const ParametricHamiltonian& model,
                                            const Schedule& schedule,
                                            const FloquetDriveSpec& drive, double t) {
  drive.validate(schedule.tau);
  const double lambda = lambda_at(schedule, t);
  const double lambda_dot = lambda_dot_at(schedule, t);
  const double a = 1.0 + (drive.omega / drive.omega0) * std::cos(drive.omega * t);
  OperatorMatrix h = a * model.at(lambda);
  const double b = lambda_dot * drive_envelope(drive, t, std::nullopt);
  if (b != 0.0) h += b * model.drive();
  return h;
}

OperatorMatrix assemble_controlled_hamiltonian(const ParametricHamiltonian& model,
                                               const Schedule& schedule,
                                               const ControlTermSpec& control, double t) {
  ControlTermSpec c = control;
  c.num_sites = model.num_sites();
  return model.at(lambda_at(schedule, t)) + control_term_at(c, t);
}

TimeDependentHamiltonian bare_hamiltonian(const ParametricHamiltonian& model,
                                          const Schedule& schedule) {
  return TimeDependentHamiltonian(
      {model.at_zero(), model.derivative()},
      [schedule](double t, std::size_t, std::span<double> c) {
        c[0] = 1.0;
        c[1] = lambda_at(schedule, t);
      });
}

TimeDependentHamiltonian cd_hamiltonian(const ParametricHamiltonian& model,
                                        const Schedule& schedule, AgpProvider agp) {
  return TimeDependentHamiltonian(
      [model, schedule, agp = std::move(agp)](double t) {
        return assemble_cd_hamiltonian(model, schedule, agp, t);
      },
      model.dimension());
}

TimeDependentHamiltonian floquet_hamiltonian(const ParametricHamiltonian& model,
                                             const Schedule& schedule, FloquetDriveSpec drive) {
  drive.validate(schedule.tau);
  std::vector<double> breakpoints;
  if (drive.table) {
    for (std::size_t j = 1; j < drive.table->num_segments(); ++j) {
      breakpoints.push_back(drive.table->segment_end(j));
    }
  }
  const double period = 2.0 * M_PI / (static_cast<double>(2 * drive.num_harmonics - 1) * drive.omega);
  const double ratio = drive.omega / drive.omega0;
  const bool drive_is_derivative = model.drive() == model.derivative();
  const bool piecewise = drive.table.has_value();
  std::vector<OperatorMatrix> terms{model.at_zero(), model.derivative()};
  if (!drive_is_derivative) terms.push_back(model.drive());
  TimeDependentHamiltonian h(
      std::move(terms),
      [schedule, drive = std::move(drive), ratio, drive_is_derivative, piecewise](
          double t, std::size_t piece, std::span<double> c) {
        const double lambda = lambda_at(schedule, t);
        const double a = 1.0 + ratio * std::cos(drive.omega * t);
        const std::optional<std::size_t> segment =
            piecewise ? std::optional<std::size_t>(piece + 1) : std::nullopt;
        const double b = lambda_dot_at(schedule, t) * drive_envelope(drive, t, segment);
        c[0] = a;
        if (drive_is_derivative) {
          c[1] = a * lambda + b;
        } else {
          c[1] = a * lambda;
          c[2] = b;
        }
      });
  h.breakpoints = std::move(breakpoints);
  h.oscillation_period = period;
  return h;
}

TimeDependentHamiltonian controlled_hamiltonian(const ParametricHamiltonian& model,
                                                const Schedule& schedule,
                                                ControlTermSpec control) {
  control.num_sites = model.num_sites();
  OperatorSum zsum(model.num_sites());
  for (std::size_t i = 0; i < model.num_sites(); ++i) zsum.add(1.0, {{i, Pauli::Z}});
  const double tau = control.tau;
  const double omega0 = control.omega0;
  auto gammas = control.gammas;
  TimeDependentHamiltonian h(
      {model.at_zero(), model.derivative(), materialize(zsum)},
      [schedule, tau, omega0, gammas](double t, std::size_t, std::span<double> c) {
        c[0] = 1.0;
        c[1] = lambda_at(schedule, t);
        double amp = 0.0;
        for (std::size_t k = 1; k <= gammas.size(); ++k) {
          amp += gammas[k - 1] * std::sin(2.0 * M_PI * static_cast<double>(k) * t / tau);
        }
        c[2] = amp * omega0;
      });
  if (!gammas.empty()) h.oscillation_period = tau / static_cast<double>(gammas.size());
  return h;
}

std::vector<FidelitySample> instantaneous_fidelity_series(const TrajectoryRecord& record,
                                                          const ParametricHamiltonian& model,
                                                          const Schedule& schedule,
                                                          std::size_t initial_level) {
  std::vector<FidelitySample> out;
  QuantumState tracked;
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    const double t = record.times[i];
    const double lambda = lambda_at(schedule, t);
    const OperatorMatrix h = model.at(lambda);
    const Eigensystem es = eigendecompose(h);
    FidelitySample s;
    s.t = t;
    s.lambda = lambda;
    if (i == 0) {
      if (initial_level >= static_cast<std::size_t>(es.energies.size())) {
        throw DomainError("tracked level index out of range");
      }
      s.level = initial_level;
    } else {
      double best = -1.0;
      double second = -1.0;
      for (Eigen::Index n = 0; n < es.vectors.cols(); ++n) {
        const double ov = std::norm(tracked.dot(es.vectors.col(n)));
        if (ov > best) {
          second = best;
          best = ov;
          s.level = static_cast<std::size_t>(n);
        } else if (ov > second) {
          second = ov;
        }
      }
      s.ambiguous = (best - second) < 1e-3;
    }
    tracked = es.vectors.col(static_cast<Eigen::Index>(s.level));
    s.fidelity = fidelity(tracked, record.states[i]);
    s.energy = expectation(h, record.states[i]);
    out.push_back(s);
  }
  return out;
}

std::vector<double> uniform_samples(double t0, double t1, std::size_t n) {
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    out.push_back(i == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n));
  }
  return out;
}

}  // namespace caffeine
