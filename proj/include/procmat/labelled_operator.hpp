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

#ifndef PROCMAT_LABELLED_OPERATOR_HPP
#define PROCMAT_LABELLED_OPERATOR_HPP

#include <algorithm>
#include <set>
#include <utility>

#include "procmat/labels.hpp"

namespace procmat {

namespace detail {

// Row-major strides: the first label is the slowest index, matching the
// Kronecker-product convention |i> (x) |j> -> |i*dim_j + j>.
inline std::vector<Index> strides_of(const LabelList& labels) {
  std::vector<Index> s(labels.size(), 1);
  for (std::size_t k = labels.size(); k-- > 1;)
    s[k - 1] = s[k] * labels[k].dim;
  return s;
}

// Flat offsets contributed by a subset of tensor positions. Enumerates all
// joint values of the chosen positions; entry c is the flat-index offset of
// the c-th joint value.
inline std::vector<Index> subset_offsets(const LabelList& labels,
                                         const std::vector<Index>& positions) {
  const auto strides = strides_of(labels);
  Index count = 1;
  for (Index p : positions) count *= labels[static_cast<std::size_t>(p)].dim;
  std::vector<Index> off(static_cast<std::size_t>(std::max<Index>(count, 1)), 0);
  for (Index c = 0; c < count; ++c) {
    Index rem = c, o = 0;
    for (std::size_t k = positions.size(); k-- > 0;) {
      const Index p = positions[k];
      const Index d = labels[static_cast<std::size_t>(p)].dim;
      o += (rem % d) * strides[static_cast<std::size_t>(p)];
      rem /= d;
    }
    off[static_cast<std::size_t>(c)] = o;
  }
  return off;
}

inline std::vector<Index> positions_of(const LabelList& labels,
                                       const std::set<std::string>& names) {
  std::vector<Index> pos;
  for (const auto& n : names) {
    if (!has_label(labels, n)) throw std::invalid_argument("unknown label '" + n + "'");
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (names.count(labels[i].name)) pos.push_back(static_cast<Index>(i));
  return pos;
}

inline std::vector<Index> complement_positions(std::size_t n, const std::vector<Index>& pos) {
  std::vector<bool> taken(n, false);
  for (Index p : pos) taken[static_cast<std::size_t>(p)] = true;
  std::vector<Index> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!taken[i]) rest.push_back(static_cast<Index>(i));
  return rest;
}

}  // namespace detail

/// A dense complex square matrix over an ordered list of labelled tensor
/// factors. The label order is the storage order.
class LabelledOperator {
 public:
  LabelledOperator() : mat_(CMat::Ones(1, 1)) {}

  LabelledOperator(LabelList labels, CMat mat)
      : labels_(std::move(labels)), mat_(std::move(mat)) {
    check_unique_names(labels_);
    const Index d = total_dim(labels_);
    if (mat_.rows() != d || mat_.cols() != d)
      throw std::invalid_argument("matrix side " + std::to_string(mat_.rows()) +
                                  " does not match label dimension product " +
                                  std::to_string(d));
  }

  static LabelledOperator identity(const LabelList& labels) {
    return LabelledOperator(labels, CMat::Identity(total_dim(labels), total_dim(labels)));
  }

  const LabelList& labels() const { return labels_; }
  const CMat& matrix() const { return mat_; }
  CMat& matrix() { return mat_; }
  Index dim() const { return mat_.rows(); }
  Complex trace() const { return mat_.trace(); }

  bool has(const std::string& name) const { return has_label(labels_, name); }
  Index dim_of(const std::string& name) const { return label_dim(labels_, name); }

  /// Same matrix under new label names (dimensions must match slot-wise).
  LabelledOperator renamed(const std::vector<std::string>& names) const {
    if (names.size() != labels_.size())
      throw std::invalid_argument("renamed: name count mismatch");
    LabelList out = labels_;
    for (std::size_t i = 0; i < names.size(); ++i) out[i].name = names[i];
    return LabelledOperator(out, mat_);
  }

 private:
  LabelList labels_;
  CMat mat_;
};

/// Kronecker product; labels concatenate. Label names must be disjoint.
inline LabelledOperator tensor(const LabelledOperator& a, const LabelledOperator& b) {
  LabelList labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  check_unique_names(labels);
  const Index da = a.dim(), db = b.dim();
  CMat out(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return LabelledOperator(std::move(labels), std::move(out));
}

inline LabelledOperator tensor(const LabelledOperator& a, const LabelledOperator& b,
                               const LabelledOperator& c) {
  return tensor(tensor(a, b), c);
}

/// Partial trace over the named factors; remaining labels keep their order.
inline LabelledOperator partial_trace(const LabelledOperator& x,
                                      const std::set<std::string>& over) {
  const auto pos = detail::positions_of(x.labels(), over);
  const auto keep = detail::complement_positions(x.labels().size(), pos);
  const auto toff = detail::subset_offsets(x.labels(), pos);
  const auto koff = detail::subset_offsets(x.labels(), keep);

  LabelList out_labels;
  for (Index p : keep) out_labels.push_back(x.labels()[static_cast<std::size_t>(p)]);
  const Index n = total_dim(out_labels);
  CMat out = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Complex s = 0;
      for (Index t : toff) s += x.matrix()(koff[static_cast<std::size_t>(i)] + t,
                                           koff[static_cast<std::size_t>(j)] + t);
      out(i, j) = s;
    }
  return LabelledOperator(std::move(out_labels), std::move(out));
}

/// Partial transposition on the named factors.
inline LabelledOperator partial_transpose(const LabelledOperator& x,
                                          const std::set<std::string>& over) {
  const auto pos = detail::positions_of(x.labels(), over);
  const auto rest = detail::complement_positions(x.labels().size(), pos);
  const auto soff = detail::subset_offsets(x.labels(), pos);
  const auto roff = detail::subset_offsets(x.labels(), rest);

  CMat out(x.dim(), x.dim());
  for (std::size_t si = 0; si < soff.size(); ++si)
    for (std::size_t sj = 0; sj < soff.size(); ++sj)
      for (Index ri : roff)
        for (Index rj : roff)
          out(soff[sj] + ri, soff[si] + rj) = x.matrix()(soff[si] + ri, soff[sj] + rj);
  return LabelledOperator(x.labels(), std::move(out));
}

inline LabelledOperator full_transpose(const LabelledOperator& x) {
  return LabelledOperator(x.labels(), x.matrix().transpose());
}

/// Conjugation by the permutation unitary that reorders the tensor factors.
inline LabelledOperator permute_systems(const LabelledOperator& x,
                                        const std::vector<std::string>& new_order) {
  if (new_order.size() != x.labels().size())
    throw std::invalid_argument("permute_systems: order length mismatch");
  std::vector<Index> old_pos;
  for (const auto& n : new_order) old_pos.push_back(label_position(x.labels(), n));
  {
    std::set<std::string> seen(new_order.begin(), new_order.end());
    if (seen.size() != new_order.size())
      throw std::invalid_argument("permute_systems: not a permutation");
  }

  LabelList out_labels;
  for (Index p : old_pos) out_labels.push_back(x.labels()[static_cast<std::size_t>(p)]);
  const auto old_strides = detail::strides_of(x.labels());
  const auto new_strides = detail::strides_of(out_labels);

  // p[i] = flat index in the new order of the multi-index that i carries in
  // the old order.
  const Index n = x.dim();
  std::vector<Index> perm(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    Index o = 0;
    for (std::size_t k = 0; k < old_pos.size(); ++k) {
      const Index p = old_pos[k];
      const Index digit = (i / old_strides[static_cast<std::size_t>(p)]) %
                          x.labels()[static_cast<std::size_t>(p)].dim;
      o += digit * new_strides[k];
    }
    perm[static_cast<std::size_t>(i)] = o;
  }

  CMat out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) =
          x.matrix()(i, j);
  return LabelledOperator(std::move(out_labels), std::move(out));
}

/// x tensored with identity on the labels of `full` it does not carry,
/// permuted to the order of `full`. Identity factors carry weight one.
inline LabelledOperator embed(const LabelledOperator& x, const LabelList& full) {
  LabelList missing;
  for (const auto& l : full) {
    if (x.has(l.name)) {
      if (x.dim_of(l.name) != l.dim)
        throw std::invalid_argument("embed: dimension mismatch on label '" + l.name + "'");
    } else {
      missing.push_back(l);
    }
  }
  for (const auto& l : x.labels())
    if (!has_label(full, l.name))
      throw std::invalid_argument("embed: operator label '" + l.name +
                                  "' not present in target space");

  std::vector<std::string> order;
  for (const auto& l : full) order.push_back(l.name);
  if (missing.empty()) return permute_systems(x, order);
  return permute_systems(tensor(x, LabelledOperator::identity(missing)), order);
}

/// Column-stacking vectorization |X>> = sum_i (X|i>) (x) |i>.
inline CVec vectorize(const LabelledOperator& x) {
  const Index d = x.dim();
  CVec v(d * d);
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < d; ++i) v(a * d + i) = x.matrix()(a, i);
  return v;
}

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const LabelledOperator& a, const LabelledOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: size mismatch");
  return max_abs(a.matrix() - b.matrix());
}

/// Hermitian operator: symmetrized at construction, rejected if the input is
/// further than 1e-12 (relative to its largest entry) from Hermitian.
class HermitianOperator : public LabelledOperator {
 public:
  HermitianOperator() = default;

  HermitianOperator(LabelList labels, const CMat& mat, double tol = 1e-12)
      : LabelledOperator(std::move(labels), 0.5 * (mat + mat.adjoint())) {
    const double scale = std::max(1.0, max_abs(mat));
    const double asym = max_abs(CMat(0.5 * (mat - mat.adjoint())));
    if (asym > tol * scale)
      throw std::invalid_argument("matrix is not Hermitian (asymmetry " +
                                  std::to_string(asym) + ")");
  }

  explicit HermitianOperator(const LabelledOperator& op, double tol = 1e-12)
      : HermitianOperator(op.labels(), op.matrix(), tol) {}

  static HermitianOperator identity(const LabelList& labels) {
    return HermitianOperator(LabelledOperator::identity(labels));
  }

  double real_trace() const { return trace().real(); }
};

}  // namespace procmat

#endif  // PROCMAT_LABELLED_OPERATOR_HPP
