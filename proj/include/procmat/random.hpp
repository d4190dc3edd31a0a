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

#ifndef PROCMAT_RANDOM_HPP
#define PROCMAT_RANDOM_HPP

#include <random>

#include "procmat/labelled_operator.hpp"

namespace procmat {

using Rng = std::mt19937_64;

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
inline CMat ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMat random_hermitian(Index n, Rng& rng) {
  CMat g = ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

inline CMat random_psd(Index n, Rng& rng) {
  CMat g = ginibre(n, n, rng);
  return g * g.adjoint();
}

inline CMat random_density(Index n, Rng& rng) {
  CMat p = random_psd(n, rng);
  return p / p.trace().real();
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
inline CMat haar_unitary(Index n, Rng& rng) {
  const CMat g = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1, 0);
  }
  return q;
}

/// Random isometry C^n -> C^m (m >= n): first n columns of a Haar unitary.
inline CMat random_isometry(Index m, Index n, Rng& rng) {
  if (m < n) throw std::invalid_argument("random_isometry: m < n");
  return haar_unitary(m, rng).leftCols(n);
}

}  // namespace procmat

#endif  // PROCMAT_RANDOM_HPP
