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

#include "caffeine/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "caffeine/errors.hpp"

namespace caffeine {

namespace {

void check_time(double t, double tau) {
  if (!(tau > 0.0)) throw DomainError("protocol time tau must be positive");
  if (!(t >= 0.0 && t <= tau)) {
    throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(tau) + "]");
  }
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::smooth ? "smooth" : "linear";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "smooth") return ScheduleKind::smooth;
  if (s == "linear") return ScheduleKind::linear;
  throw ConfigError("unknown schedule kind '" + s + "' (expected smooth or linear)");
}

double lambda_at(const Schedule& s, double t) {
  check_time(t, s.tau);
  if (s.kind == ScheduleKind::linear) return t / s.tau;
  const double inner = std::sin(M_PI * t / (2.0 * s.tau));
  const double outer = std::sin(0.5 * M_PI * inner * inner);
  return outer * outer;
}

double lambda_dot_at(const Schedule& s, double t) {
  check_time(t, s.tau);
  if (s.kind == ScheduleKind::linear) return 1.0 / s.tau;
  const double phase = M_PI * t / (2.0 * s.tau);
  const double sn = std::sin(phase);
  const double cs = std::cos(phase);
  const double a = 0.5 * M_PI * sn * sn;
  // d/dt sin²(a) = sin(2a)·ȧ,  ȧ = (π²/2τ)·sin·cos
  return std::sin(2.0 * a) * (M_PI * M_PI / (2.0 * s.tau)) * sn * cs;
}

PiecewiseBeta::PiecewiseBeta(std::size_t num_harmonics, std::size_t num_segments, double tau,
                             double lower, double upper)
    : values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_harmonics),
                                    static_cast<Eigen::Index>(num_segments))),
      tau_(tau),
      lower_(lower),
      upper_(upper) {
  if (num_harmonics == 0 || num_segments == 0) {
    throw DomainError("PiecewiseBeta needs N_k >= 1 and N_tau >= 1");
  }
  if (!(tau > 0.0)) throw DomainError("protocol time tau must be positive");
  if (!(lower < upper)) throw DomainError("PiecewiseBeta bounds need lower < upper");
  const double fill = std::clamp(0.0, lower_, upper_);
  values_.setConstant(fill);
}

PiecewiseBeta PiecewiseBeta::from_flat(std::size_t num_harmonics, std::size_t num_segments,
                                       double tau, const Eigen::VectorXd& flat, double lower,
                                       double upper) {
  PiecewiseBeta b(num_harmonics, num_segments, tau, lower, upper);
  if (static_cast<std::size_t>(flat.size()) != num_harmonics * num_segments) {
    throw DimensionError("flat beta vector has " + std::to_string(flat.size()) +
                         " entries, expected " + std::to_string(num_harmonics * num_segments));
  }
  for (std::size_t j = 1; j <= num_segments; ++j) {
    for (std::size_t k = 1; k <= num_harmonics; ++k) {
      b.set(k, j, flat(static_cast<Eigen::Index>((j - 1) * num_harmonics + (k - 1))));
    }
  }
  return b;
}

double PiecewiseBeta::value(std::size_t k, std::size_t j) const {
  if (k < 1 || k > num_harmonics() || j < 1 || j > num_segments()) {
    throw DomainError("beta index (k=" + std::to_string(k) + ", j=" + std::to_string(j) +
                      ") out of range");
  }
  return values_(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j - 1));
}

void PiecewiseBeta::set(std::size_t k, std::size_t j, double v) {
  if (k < 1 || k > num_harmonics() || j < 1 || j > num_segments()) {
    throw DomainError("beta index (k=" + std::to_string(k) + ", j=" + std::to_string(j) +
                      ") out of range");
  }
  if (!(v >= lower_ && v <= upper_)) {
    throw DomainError("beta value " + std::to_string(v) + " outside bounds [" +
                      std::to_string(lower_) + ", " + std::to_string(upper_) + "]");
  }
  values_(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j - 1)) = v;
}

std::size_t PiecewiseBeta::segment_of(double t) const {
  check_time(t, tau_);
  const auto n = num_segments();
  const auto j = static_cast<std::size_t>(std::floor(t * static_cast<double>(n) / tau_)) + 1;
  return std::min(j, n);
}

double PiecewiseBeta::segment_start(std::size_t j) const {
  return static_cast<double>(j - 1) * tau_ / static_cast<double>(num_segments());
}

double PiecewiseBeta::segment_end(std::size_t j) const {
  return j == num_segments() ? tau_ : static_cast<double>(j) * tau_ / static_cast<double>(num_segments());
}

Eigen::VectorXd PiecewiseBeta::flat() const {
  Eigen::VectorXd out(values_.size());
  for (std::size_t j = 1; j <= num_segments(); ++j) {
    for (std::size_t k = 1; k <= num_harmonics(); ++k) {
      out(static_cast<Eigen::Index>((j - 1) * num_harmonics() + (k - 1))) = value(k, j);
    }
  }
  return out;
}

double beta_at(const PiecewiseBeta& b, std::size_t k, double t) {
  return b.value(k, b.segment_of(t));
}

}  // namespace caffeine
