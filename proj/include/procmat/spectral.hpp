// Copyright 2026 the procmat authors
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

#ifndef PROCMAT_SPECTRAL_HPP
#define PROCMAT_SPECTRAL_HPP

#include <cmath>

#include "procmat/labelled_operator.hpp"

namespace procmat {

struct EigResult {
  RVec values;     // ascending
  CMat vectors;    // columns, phase-fixed
};

/// Eigendecomposition of a Hermitian operator. Eigenvalues ascending; each
/// eigenvector's phase is fixed so that its first component of significant
/// magnitude is real and positive.
inline EigResult hermitian_eig(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  EigResult r{es.eigenvalues(), es.eigenvectors()};
  for (Index c = 0; c < r.vectors.cols(); ++c) {
    const double colmax = r.vectors.col(c).cwiseAbs().maxCoeff();
    for (Index i = 0; i < r.vectors.rows(); ++i) {
      const Complex v = r.vectors(i, c);
      if (std::abs(v) > 1e-8 * colmax) {
        r.vectors.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return r;
}

inline double min_eigenvalue(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Sum of absolute eigenvalues.
inline double trace_norm(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double trace_norm(const CMat& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (hermitian + hermitian.adjoint()),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Positive-semidefinite square root. Eigenvalues in [-1e-10, 0) (relative to
/// the largest one) are clamped to zero; anything more negative is a domain
/// error.
inline HermitianOperator sqrt_psd(const HermitianOperator& x) {
  const auto eig = hermitian_eig(x);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  RVec s = eig.values;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) < -1e-10 * scale)
      throw std::domain_error("sqrt_psd: eigenvalue " + std::to_string(s(i)) +
                              " is significantly negative");
    s(i) = s(i) > 0 ? std::sqrt(s(i)) : 0.0;
  }
  CMat m = eig.vectors * s.asDiagonal() * eig.vectors.adjoint();
  return HermitianOperator(x.labels(), m);
}

/// Nearest PSD operator in the spectral sense: negative eigenvalues clamped
/// to zero. Rejects inputs further than `max_negative` from the PSD cone.
inline HermitianOperator psd_clamp(const HermitianOperator& x, double max_negative = 1e-7) {
  const auto eig = hermitian_eig(x);
  if (eig.values.minCoeff() < -max_negative)
    throw std::domain_error("psd_clamp: eigenvalue " +
                            std::to_string(eig.values.minCoeff()) + " below -" +
                            std::to_string(max_negative));
  RVec s = eig.values.cwiseMax(0.0);
  return HermitianOperator(x.labels(), eig.vectors * s.asDiagonal() * eig.vectors.adjoint());
}

struct PseudoInverseSqrt {
  HermitianOperator inv_sqrt;   // Moore-Penrose pseudo-inverse of sqrt(x)
  HermitianOperator image_proj; // projector onto the image of x
};

/// Pseudo-inverse square root of a PSD operator together with the projector
/// onto its image. Rank cut at side * 1e-13 relative to the top eigenvalue.
inline PseudoInverseSqrt pseudo_inverse_sqrt(const HermitianOperator& x) {
  const auto eig = hermitian_eig(x);
  const double top = std::max(0.0, eig.values.maxCoeff());
  const double cut = std::max(top * static_cast<double>(x.dim()) * 1e-13, 1e-300);
  const double scale = std::max(1.0, top);
  RVec inv = RVec::Zero(eig.values.size());
  RVec proj = RVec::Zero(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < -1e-10 * scale)
      throw std::domain_error("pseudo_inverse_sqrt: input is not PSD");
    if (eig.values(i) > cut) {
      inv(i) = 1.0 / std::sqrt(eig.values(i));
      proj(i) = 1.0;
    }
  }
  return {HermitianOperator(x.labels(),
                            eig.vectors * inv.asDiagonal() * eig.vectors.adjoint()),
          HermitianOperator(x.labels(),
                            eig.vectors * proj.asDiagonal() * eig.vectors.adjoint())};
}

}  // namespace procmat

#endif  // PROCMAT_SPECTRAL_HPP
