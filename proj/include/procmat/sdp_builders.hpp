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

#ifndef PROCMAT_SDP_BUILDERS_HPP
#define PROCMAT_SDP_BUILDERS_HPP

#include "procmat/process.hpp"
#include "procmat/sdp.hpp"

namespace procmat {

/// Enumeration of the elementary Hermitian basis of a labelled space:
/// diagonal units, symmetric pairs, antisymmetric (imaginary) pairs.
inline std::vector<HermitianOperator> hermitian_basis(const LabelList& labels) {
  const Index d = total_dim(labels);
  std::vector<HermitianOperator> basis;
  basis.reserve(std::size_t(d * d));
  for (Index i = 0; i < d; ++i) {
    CMat e = CMat::Zero(d, d);
    e(i, i) = 1;
    basis.emplace_back(labels, e);
  }
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      CMat s = CMat::Zero(d, d);
      s(i, j) = 1;
      s(j, i) = 1;
      basis.emplace_back(labels, s);
      CMat a = CMat::Zero(d, d);
      a(i, j) = Complex(0, -1);
      a(j, i) = Complex(0, 1);
      basis.emplace_back(labels, a);
    }
  return basis;
}

/// Traceless Hermitian basis: off-diagonal pairs plus consecutive diagonal
/// differences.
inline std::vector<HermitianOperator> traceless_hermitian_basis(const LabelList& labels) {
  const Index d = total_dim(labels);
  std::vector<HermitianOperator> basis;
  for (Index i = 0; i + 1 < d; ++i) {
    CMat e = CMat::Zero(d, d);
    e(i, i) = 1;
    e(i + 1, i + 1) = -1;
    basis.emplace_back(labels, e);
  }
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      CMat s = CMat::Zero(d, d);
      s(i, j) = 1;
      s(j, i) = 1;
      basis.emplace_back(labels, s);
      CMat a = CMat::Zero(d, d);
      a(i, j) = Complex(0, -1);
      a(j, i) = Complex(0, 1);
      basis.emplace_back(labels, a);
    }
  return basis;
}

/// Isometric real coordinates of Herm(D): diagonal entries, then sqrt(2)
/// times the real and imaginary parts of the upper triangle.
inline RVec herm_to_coords(const CMat& h) {
  const Index d = h.rows();
  RVec v(d * d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) v(k++) = h(i, i).real();
  const double s2 = std::sqrt(2.0);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      v(k++) = s2 * h(i, j).real();
      v(k++) = s2 * h(i, j).imag();
    }
  return v;
}

inline CMat coords_to_herm(const RVec& v, Index d) {
  CMat h = CMat::Zero(d, d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) h(i, i) = v(k++);
  const double s2 = std::sqrt(2.0);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      const double re = v(k++) / s2;
      const double im = v(k++) / s2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  return h;
}

/// Orthonormal basis (as Hermitian matrices) of the joint kernel of the
/// real-linear conditions <row_k, X> = 0 on Herm(labels).
inline std::vector<HermitianOperator> hermitian_nullspace_basis(
    const LabelList& labels, const std::vector<HermitianOperator>& condition_rows) {
  const Index d = total_dim(labels);
  const Index n = d * d;
  const Index m = Index(condition_rows.size());
  RMat k(std::max<Index>(m, 1), n);
  if (m == 0) k.setZero();
  for (Index r = 0; r < m; ++r)
    k.row(r) = herm_to_coords(condition_rows[std::size_t(r)].matrix()).transpose();
  Eigen::JacobiSVD<RMat> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  const double tol = (m > 0 && sv.size() > 0)
                         ? sv(0) * std::max(n, m) * 1e-13
                         : 0.0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol && sv(i) > 1e-13) ++rank;
  if (m == 0) rank = 0;
  std::vector<HermitianOperator> basis;
  const RMat v = svd.matrixV();
  for (Index c = rank; c < n; ++c)
    basis.emplace_back(labels, coords_to_herm(v.col(c), d));
  return basis;
}

/// Adjoint of the non-signalling marginal condition for Alice,
///   S -> tr_AO(S) - (1_AI / dim AI) (x) tr_AO,AI(S),
/// evaluated at a target-space basis element F on AI (x) BI (x) BO.
inline CMat ns_adjoint_a(const HermitianOperator& f, const LabelList& full) {
  const double dai = double(label_dim(full, kAI));
  CMat m = embed(f, full).matrix();
  m -= embed(partial_trace(f, {kAI}), full).matrix() / dai;
  return m;
}

/// Bob-side companion on AI (x) AO (x) BI.
inline CMat ns_adjoint_b(const HermitianOperator& f, const LabelList& full) {
  const double dbi = double(label_dim(full, kBI));
  CMat m = embed(f, full).matrix();
  m -= embed(partial_trace(f, {kBI}), full).matrix() / dbi;
  return m;
}

/// Row ranges of the non-signalling constraint families as emitted by
/// add_nonsignalling_family, used to rebuild dual certificates.
struct NsFamilyLayout {
  std::size_t first_a = 0, count_a = 0;
  std::size_t first_b = 0, count_b = 0;
  std::size_t trace_row = 0;
  LabelList target_a;  // AI, BI, BO
  LabelList target_b;  // AI, AO, BI
};

/// Emit the constraints forcing the sum of the listed blocks into the
/// non-signalling set: both marginal families plus the global trace row.
inline NsFamilyLayout add_nonsignalling_family(SdpProblem& p, const std::vector<int>& blocks,
                                               const LabelList& full) {
  NsFamilyLayout layout;
  const Index dai = label_dim(full, kAI), dbi = label_dim(full, kBI);
  layout.target_a = {{kAI, dai}, {kBI, label_dim(full, kBI)}, {kBO, label_dim(full, kBO)}};
  layout.target_b = {{kAI, dai}, {kAO, label_dim(full, kAO)}, {kBI, dbi}};

  layout.first_a = p.constraints.size();
  for (const auto& f : hermitian_basis(layout.target_a)) {
    const CMat coeff = ns_adjoint_a(f, full);
    std::vector<std::pair<int, CMat>> cs;
    for (int b : blocks) cs.emplace_back(b, coeff);
    p.add_constraint(cs, 0.0);
  }
  layout.count_a = p.constraints.size() - layout.first_a;

  layout.first_b = p.constraints.size();
  for (const auto& f : hermitian_basis(layout.target_b)) {
    const CMat coeff = ns_adjoint_b(f, full);
    std::vector<std::pair<int, CMat>> cs;
    for (int b : blocks) cs.emplace_back(b, coeff);
    p.add_constraint(cs, 0.0);
  }
  layout.count_b = p.constraints.size() - layout.first_b;

  layout.trace_row = p.constraints.size();
  const Index d = total_dim(full);
  std::vector<std::pair<int, CMat>> cs;
  for (int b : blocks) cs.emplace_back(b, CMat::Identity(d, d));
  p.add_constraint(cs, double(dai * dbi));
  return layout;
}

}  // namespace procmat

#endif  // PROCMAT_SDP_BUILDERS_HPP
