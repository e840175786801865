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

#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace caffeine {

enum class ScheduleKind { smooth, linear };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& s);

/// λ(t) on [0, τ] with λ(0) = 0 and λ(τ) = 1.
///   smooth: sin²((π/2)·sin²(πt/2τ)), with λ̇(0) = λ̇(τ) = 0
///   linear: t/τ
struct Schedule {
  ScheduleKind kind = ScheduleKind::smooth;
  double tau = 0.1;
};

double lambda_at(const Schedule& s, double t);
/// Analytical derivative of lambda_at.
double lambda_dot_at(const Schedule& s, double t);

/// Piecewise-constant drive coefficients β_k^(j), k = 1..N_k, j = 1..N_τ, stored
/// in units of ω₀. Segment j covers (j−1)·τ/N_τ ≤ t < j·τ/N_τ; t = τ belongs to
/// the last segment.
class PiecewiseBeta {
 public:
  PiecewiseBeta(std::size_t num_harmonics, std::size_t num_segments, double tau,
                double lower = -std::numeric_limits<double>::infinity(),
                double upper = std::numeric_limits<double>::infinity());

  static PiecewiseBeta from_flat(std::size_t num_harmonics, std::size_t num_segments, double tau,
                                 const Eigen::VectorXd& flat, double lower, double upper);

  std::size_t num_harmonics() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_segments() const { return static_cast<std::size_t>(values_.cols()); }
  double tau() const { return tau_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double segment_length() const { return tau_ / static_cast<double>(num_segments()); }

  /// Table entry (1-based indices).
  double value(std::size_t k, std::size_t j) const;
  void set(std::size_t k, std::size_t j, double v);

  /// 1-based segment index containing t.
  std::size_t segment_of(double t) const;
  double segment_start(std::size_t j) const;
  double segment_end(std::size_t j) const;

  /// Flattened parameter vector, harmonic-major within each segment:
  /// [β_1^(1), …, β_Nk^(1), β_1^(2), …].
  Eigen::VectorXd flat() const;
  const Eigen::MatrixXd& table() const { return values_; }

 private:
  Eigen::MatrixXd values_;
  double tau_;
  double lower_;
  double upper_;
};

double beta_at(const PiecewiseBeta& b, std::size_t k, double t);

}  // namespace caffeine
