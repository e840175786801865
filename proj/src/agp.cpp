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

#include "caffeine/agp.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "caffeine/errors.hpp"

namespace caffeine {

AGPResult exact_agp(const OperatorMatrix& h, const OperatorMatrix& dh, double lambda,
                    double degeneracy_tol) {
  if (h.rows() != dh.rows() || h.cols() != dh.cols()) {
    throw DimensionError("exact_agp: H and dH differ in dimension");
  }
  const Eigensystem es = eigendecompose(h);
  const OperatorMatrix& v = es.vectors;
  const OperatorMatrix dh_eig = v.adjoint() * dh * v;
  const double h_norm = std::max(1.0, es.energies.cwiseAbs().maxCoeff());
  const double coupling_tol = 1e-10 * std::max(1.0, dh_eig.cwiseAbs().maxCoeff());
  const Eigen::Index d = h.rows();
  OperatorMatrix a_eig = OperatorMatrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      if (m == n) continue;
      const double gap = es.energies(m) - es.energies(n);
      if (std::abs(gap) < degeneracy_tol * h_norm) {
        if (std::abs(dh_eig(m, n)) > coupling_tol) {
          throw DegeneracyError("exact_agp: degenerate levels " + std::to_string(m) + "," +
                                std::to_string(n) + " coupled by dH (divergent AGP)");
        }
        continue;
      }
      a_eig(m, n) = Complex(0.0, -1.0) * dh_eig(m, n) / gap;
    }
  }
  OperatorMatrix a = v * a_eig * v.adjoint();
  a = 0.5 * (a + a.adjoint());
  return {std::move(a), lambda, "zero-diagonal"};
}

double two_qubit_agp_prefactor(const TwoQubitParams& p, double lambda) {
  const double mu = lambda - 1.0;
  return p.coupling * p.field /
         (2.0 * (p.coupling * p.coupling + 4.0 * mu * mu * p.field * p.field));
}

AGPResult analytical_two_qubit_agp(const TwoQubitParams& p, double lambda) {
  const OperatorMatrix ops = pauli_string("YX") + pauli_string("XY");
  return {two_qubit_agp_prefactor(p, lambda) * ops, lambda, "zero-diagonal"};
}

double analytical_beta1(const TwoQubitParams& p, double lambda) {
  const double mu = lambda - 1.0;
  return 2.0 * p.field /
         (4.0 * p.coupling * p.coupling + 16.0 * mu * mu * p.field * p.field);
}

OperatorMatrix nested_commutator(const OperatorMatrix& h, const OperatorMatrix& dh,
                                 std::size_t depth) {
  OperatorMatrix out = dh;
  for (std::size_t i = 0; i < depth; ++i) out = commutator(h, out);
  return out;
}

OperatorMatrix commutator_ansatz_agp(const OperatorMatrix& h, const OperatorMatrix& dh,
                                     const AnsatzCoefficients& alphas) {
  OperatorMatrix out = OperatorMatrix::Zero(h.rows(), h.cols());
  OperatorMatrix term = dh;
  for (std::size_t k = 0; k < alphas.alphas.size(); ++k) {
    if (!std::isfinite(alphas.alphas[k])) throw DomainError("non-finite ansatz coefficient");
    term = commutator(h, term);
    out += Complex(0.0, alphas.alphas[k]) * term;
    term = commutator(h, term);
  }
  return out;
}

AnsatzFit fit_ansatz_coefficients(const OperatorMatrix& h, const OperatorMatrix& dh,
                                  std::size_t cutoff) {
  if (cutoff == 0) throw DomainError("ansatz cutoff must be at least 1");
  const OperatorMatrix target = exact_agp(h, dh).matrix;
  const Eigen::Index entries = target.size();
  const auto k_count = static_cast<Eigen::Index>(cutoff);

  // Columns: i·C_{2k−1} split into real and imaginary parts, normalized so that
  // the rapidly growing commutator norms do not dominate the conditioning.
  // Columns at roundoff level relative to (2‖h‖)^(2k−1)‖dh‖ are zeroed.
  Eigen::MatrixXd design(2 * entries, k_count);
  Eigen::VectorXd scales(k_count);
  OperatorMatrix term = dh;
  const double hn = 2.0 * h.norm();
  double bound = dh.norm();
  for (Eigen::Index k = 0; k < k_count; ++k) {
    term = commutator(h, term);
    bound *= hn;
    const OperatorMatrix basis = Complex(0.0, 1.0) * term;
    const double norm = basis.norm();
    const bool negligible = norm <= 1e-13 * bound;
    scales(k) = (norm > 0.0 && !negligible) ? norm : 1.0;
    const Eigen::Map<const Eigen::VectorXcd> flat(basis.data(), entries);
    if (negligible) {
      design.col(k).setZero();
    } else {
      design.col(k).head(entries) = flat.real() / scales(k);
      design.col(k).tail(entries) = flat.imag() / scales(k);
    }
    term = commutator(h, term);
    bound *= hn;
  }
  const Eigen::Map<const Eigen::VectorXcd> rhs_flat(target.data(), entries);
  Eigen::VectorXd rhs(2 * entries);
  rhs.head(entries) = rhs_flat.real();
  rhs.tail(entries) = rhs_flat.imag();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double threshold = 1e-12 * std::max(1.0, smax);
  svd.setThreshold(smax > 0.0 ? threshold / smax : 1e-12);
  AnsatzFit fit;
  fit.ill_conditioned = svd.rank() < k_count;
  const Eigen::VectorXd scaled = svd.solve(rhs);
  fit.coefficients.alphas.resize(cutoff);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    fit.coefficients.alphas[static_cast<std::size_t>(k)] = scaled(k) / scales(k);
  }
  fit.residual = (design * scaled - rhs).norm();
  return fit;
}

BetaAlphaCalibration calibrate_two_qubit(const TwoQubitParams& p, double lambda) {
  const ParametricHamiltonian model = two_qubit_model(p);
  const OperatorMatrix h = model.at_unchecked(lambda);
  const OperatorMatrix target = analytical_two_qubit_agp(p, lambda).matrix;
  const OperatorMatrix basis = Complex(0.0, 1.0) * commutator(h, model.derivative());
  const double alpha1 = (basis.adjoint() * target).trace().real() / basis.squaredNorm();
  BetaAlphaCalibration cal;
  cal.constants = {alpha1 / analytical_beta1(p, lambda)};
  cal.lambda = lambda;
  cal.source = "two_qubit analytical pair (J=" + std::to_string(p.coupling) +
               ", h_z=" + std::to_string(p.field) + ")";
  return cal;
}

AnsatzCoefficients betas_to_alphas(const PiecewiseBeta& beta, std::size_t segment,
                                   const BetaAlphaCalibration& calibration) {
  if (segment < 1 || segment > beta.num_segments()) {
    throw DomainError("segment " + std::to_string(segment) + " out of range");
  }
  if (beta.num_harmonics() > calibration.constants.size()) {
    throw UnsupportedError("no beta-to-alpha conversion constant for harmonic k=" +
                           std::to_string(calibration.constants.size() + 1));
  }
  AnsatzCoefficients out;
  for (std::size_t k = 1; k <= beta.num_harmonics(); ++k) {
    out.alphas.push_back(calibration.constants[k - 1] * beta.value(k, segment));
  }
  return out;
}

std::vector<double> alphas_to_betas(const AnsatzCoefficients& alphas,
                                    const BetaAlphaCalibration& calibration) {
  if (alphas.alphas.size() > calibration.constants.size()) {
    throw UnsupportedError("no alpha-to-beta conversion constant for harmonic k=" +
                           std::to_string(calibration.constants.size() + 1));
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < alphas.alphas.size(); ++k) {
    out.push_back(alphas.alphas[k] / calibration.constants[k]);
  }
  return out;
}

}  // namespace caffeine
