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

#ifndef PROCMAT_NETWORKS_HPP
#define PROCMAT_NETWORKS_HPP

#include "procmat/random.hpp"
#include "procmat/spectral.hpp"

namespace procmat {

/// Choi matrix of a linear map, stored output-factors-first:
/// M = sum_ij Phi(|i><j|) (x) |i><j|.
struct ChoiMatrix {
  HermitianOperator op;
  std::vector<std::string> out_labels;
  std::vector<std::string> in_labels;

  ChoiMatrix() = default;
  ChoiMatrix(HermitianOperator o, std::vector<std::string> out, std::vector<std::string> in)
      : op(std::move(o)), out_labels(std::move(out)), in_labels(std::move(in)) {
    for (const auto& n : out_labels)
      if (!op.has(n)) throw std::invalid_argument("ChoiMatrix: unknown out label " + n);
    for (const auto& n : in_labels)
      if (!op.has(n)) throw std::invalid_argument("ChoiMatrix: unknown in label " + n);
    if (out_labels.size() + in_labels.size() != op.labels().size())
      throw std::invalid_argument("ChoiMatrix: labels do not partition the operator");
  }

  Index in_dim() const {
    Index d = 1;
    for (const auto& n : in_labels) d *= op.dim_of(n);
    return d;
  }
  Index out_dim() const {
    Index d = 1;
    for (const auto& n : out_labels) d *= op.dim_of(n);
    return d;
  }

  /// Max violation of the trace-preserving condition tr_out(M) = 1_in.
  double tp_residual() const {
    const auto marg = partial_trace(op, {out_labels.begin(), out_labels.end()});
    return max_abs(CMat(marg.matrix() - CMat::Identity(marg.dim(), marg.dim())));
  }

  double psd_residual() const { return std::max(0.0, -min_eigenvalue(op)); }

  /// Apply the map to a state on the input labels.
  LabelledOperator apply(const LabelledOperator& rho) const {
    // Phi(rho) = tr_in[(1_out (x) rho^T) M] with the input factors matched by
    // label name.
    LabelledOperator rt = full_transpose(rho);
    LabelledOperator lifted = embed(rt, op.labels());
    CMat prod = lifted.matrix() * op.matrix();
    LabelledOperator tmp(op.labels(), prod);
    auto result = partial_trace(tmp, {in_labels.begin(), in_labels.end()});
    std::vector<std::string> order(out_labels);
    return permute_systems(result, order);
  }
};

/// Choi matrix of the channel with the given Kraus operators (a single
/// operator for a unitary or isometry channel).
inline ChoiMatrix choi_of_channel(const std::vector<CMat>& kraus, const LabelList& in,
                                  const LabelList& out) {
  if (kraus.empty()) throw std::invalid_argument("choi_of_channel: no Kraus operators");
  const Index din = total_dim(in), dout = total_dim(out);
  for (const auto& k : kraus)
    if (k.rows() != dout || k.cols() != din)
      throw std::invalid_argument("choi_of_channel: inconsistent Kraus shapes");

  CMat m = CMat::Zero(dout * din, dout * din);
  for (const auto& k : kraus) {
    CVec v(dout * din);  // |K>> = sum_i (K|i>) (x) |i>
    for (Index a = 0; a < dout; ++a)
      for (Index i = 0; i < din; ++i) v(a * din + i) = k(a, i);
    m += v * v.adjoint();
  }
  LabelList labels = out;
  labels.insert(labels.end(), in.begin(), in.end());
  std::vector<std::string> out_names, in_names;
  for (const auto& l : out) out_names.push_back(l.name);
  for (const auto& l : in) in_names.push_back(l.name);
  return ChoiMatrix(HermitianOperator(labels, m), out_names, in_names);
}

inline ChoiMatrix identity_choi(const LabelList& in, const LabelList& out) {
  return choi_of_channel({CMat::Identity(total_dim(out), total_dim(in))}, in, out);
}

inline ChoiMatrix depolarizing_choi(const LabelList& in, const LabelList& out) {
  const Index din = total_dim(in), dout = total_dim(out);
  LabelList labels = out;
  labels.insert(labels.end(), in.begin(), in.end());
  std::vector<std::string> out_names, in_names;
  for (const auto& l : out) out_names.push_back(l.name);
  for (const auto& l : in) in_names.push_back(l.name);
  return ChoiMatrix(
      HermitianOperator(labels, CMat::Identity(dout * din, dout * din) / double(dout)),
      out_names, in_names);
}

/// Haar-random channel via a Stinespring isometry with environment dimension
/// env_dim.
inline ChoiMatrix random_channel_choi(const LabelList& in, const LabelList& out, Rng& rng,
                                      Index env_dim = 0) {
  const Index din = total_dim(in), dout = total_dim(out);
  if (env_dim <= 0) env_dim = din;
  const CMat v = random_isometry(dout * env_dim, din, rng);
  std::vector<CMat> kraus;
  for (Index e = 0; e < env_dim; ++e) {
    CMat k(dout, din);
    for (Index a = 0; a < dout; ++a) k.row(a) = v.row(a * env_dim + e);
    kraus.push_back(k);
  }
  return choi_of_channel(kraus, in, out);
}

/// Link product N * M = tr_Z[(1 (x) M^{T_Z})(N (x) 1)], contracting over the
/// labels the two operators share (matched by name and dimension). A full
/// overlap yields a 1x1 scalar operator.
inline LabelledOperator link_product(const LabelledOperator& n, const LabelledOperator& m) {
  std::set<std::string> shared;
  for (const auto& l : m.labels()) {
    if (!n.has(l.name)) continue;
    if (n.dim_of(l.name) != l.dim)
      throw std::invalid_argument("link_product: dimension mismatch on '" + l.name + "'");
    shared.insert(l.name);
  }
  LabelList full = n.labels();
  for (const auto& l : m.labels())
    if (!shared.count(l.name)) full.push_back(l);

  const LabelledOperator mt = embed(partial_transpose(m, shared), full);
  const LabelledOperator ne = embed(n, full);
  LabelledOperator prod(full, CMat(mt.matrix() * ne.matrix()));
  return partial_trace(prod, shared);
}

inline ChoiMatrix link_product(const ChoiMatrix& n, const ChoiMatrix& m) {
  LabelledOperator raw = link_product(n.op, m.op);
  std::vector<std::string> out, in;
  for (const auto& s : m.in_labels)
    if (raw.has(s)) in.push_back(s);
  for (const auto& s : n.in_labels)
    if (raw.has(s)) in.push_back(s);
  for (const auto& s : m.out_labels)
    if (raw.has(s)) out.push_back(s);
  for (const auto& s : n.out_labels)
    if (raw.has(s)) out.push_back(s);
  return ChoiMatrix(HermitianOperator(raw, 1e-9), out, in);
}

struct NonSignallingReport {
  double psd = 0;       // max(0, -lambda_min)
  double marginal_a = 0; // tr_AO(N) vs 1_AI/dAI (x) tr_AOAI(N)
  double marginal_b = 0;
  double trace = 0;     // |tr N - dAI dBI|
  double tp = 0;        // tr_AOBO(N) vs 1_AIBI
  bool ok = false;

  double max_residual() const {
    return std::max({psd, marginal_a, marginal_b, trace, tp});
  }
};

/// Check the non-signalling conditions for a Choi operator on the canonical
/// labels AI, AO, BI, BO.
inline NonSignallingReport nonsignalling_report(const LabelledOperator& n_any, double tol = 1e-8) {
  for (const char* name : {kAI, kAO, kBI, kBO})
    if (!n_any.has(name))
      throw std::invalid_argument("nonsignalling_report: expected labels AI, AO, BI, BO");
  if (n_any.labels().size() != 4)
    throw std::invalid_argument("nonsignalling_report: expected exactly four labels");
  const auto n = permute_systems(n_any, {kAI, kAO, kBI, kBO});
  const double dai = double(n.dim_of(kAI)), dbi = double(n.dim_of(kBI));

  NonSignallingReport rep;
  rep.psd = std::max(0.0, -min_eigenvalue(HermitianOperator(n)));

  const auto lhs_a = partial_trace(n, {kAO});
  const auto rhs_a = embed(partial_trace(n, {kAO, kAI}), lhs_a.labels());
  rep.marginal_a = max_abs(CMat(lhs_a.matrix() - rhs_a.matrix() / dai));

  const auto lhs_b = partial_trace(n, {kBO});
  const auto rhs_b = embed(partial_trace(n, {kBO, kBI}), lhs_b.labels());
  rep.marginal_b = max_abs(CMat(lhs_b.matrix() - rhs_b.matrix() / dbi));

  rep.trace = std::abs(n.trace().real() - dai * dbi) + std::abs(n.trace().imag());

  const auto tp = partial_trace(n, {kAO, kBO});
  rep.tp = max_abs(CMat(tp.matrix() - CMat::Identity(tp.dim(), tp.dim())));

  rep.ok = rep.psd <= tol && rep.marginal_a <= tol && rep.marginal_b <= tol &&
           rep.trace <= tol && rep.tp <= tol;
  return rep;
}

inline bool is_nonsignalling(const LabelledOperator& n, double tol = 1e-8) {
  return nonsignalling_report(n, tol).ok;
}

/// The canonical-order operator T(Phi) such that probabilities pair with
/// process matrices as tr(W (T_A (x) T_B)): the full transpose of the Choi
/// matrix, with factors reordered input-first.
inline LabelledOperator pairing_form(const ChoiMatrix& choi) {
  std::vector<std::string> order = choi.in_labels;
  order.insert(order.end(), choi.out_labels.begin(), choi.out_labels.end());
  return permute_systems(full_transpose(choi.op), order);
}

/// Non-signalling Choi of a product of local channels, on canonical labels.
inline HermitianOperator ns_product(const ChoiMatrix& alice, const ChoiMatrix& bob) {
  auto prod = tensor(pairing_form(alice), pairing_form(bob));
  return HermitianOperator(permute_systems(prod, {kAI, kAO, kBI, kBO}), 1e-9);
}

/// Deterministic quantum comb: an operator plus its ordered tooth structure
/// (input label, output label) from the first tooth to the last.
struct Comb {
  HermitianOperator op;
  std::vector<std::pair<std::string, std::string>> teeth;
};

struct CombReport {
  double psd = 0;
  std::vector<double> level; // residual of the recursion at tooth k (last first)
  bool ok = false;

  double max_residual() const {
    double r = psd;
    for (double v : level) r = std::max(r, v);
    return r;
  }
};

/// Check the recursive comb conditions tr_{out_k}(R^(k)) = 1_{in_k} (x) R^(k-1)
/// down to the first tooth, where R^(0) = 1.
inline CombReport comb_report(const Comb& c, double tol = 1e-8) {
  CombReport rep;
  rep.psd = std::max(0.0, -min_eigenvalue(c.op));
  LabelledOperator r = c.op;
  for (std::size_t k = c.teeth.size(); k-- > 0;) {
    const auto& [in_name, out_name] = c.teeth[k];
    if (!r.has(in_name) || !r.has(out_name))
      throw std::invalid_argument("comb_report: tooth labels missing from operator");
    const auto traced = partial_trace(r, {out_name});
    auto reduced = partial_trace(r, {out_name, in_name});
    reduced.matrix() /= double(r.dim_of(in_name));
    const auto lifted = embed(reduced, traced.labels());
    rep.level.push_back(max_abs(CMat(traced.matrix() - lifted.matrix())));
    r = std::move(reduced);
  }
  rep.ok = rep.psd <= tol;
  for (double v : rep.level) rep.ok = rep.ok && v <= tol;
  return rep;
}

inline bool is_comb(const HermitianOperator& op,
                    const std::vector<std::pair<std::string, std::string>>& teeth,
                    double tol = 1e-8) {
  return comb_report(Comb{op, teeth}, tol).ok;
}

/// Collection of CP maps summing to a channel.
struct Instrument {
  std::vector<ChoiMatrix> elements;
};

inline bool validate_instrument(const Instrument& inst, double tol = 1e-8) {
  if (inst.elements.empty()) throw std::invalid_argument("validate_instrument: empty");
  CMat sum = CMat::Zero(inst.elements[0].op.dim(), inst.elements[0].op.dim());
  for (const auto& e : inst.elements) {
    if (min_eigenvalue(e.op) < -tol) return false;
    if (e.op.dim() != sum.rows())
      throw std::invalid_argument("validate_instrument: element size mismatch");
    sum += e.op.matrix();
  }
  ChoiMatrix total(HermitianOperator(inst.elements[0].op.labels(), sum),
                   inst.elements[0].out_labels, inst.elements[0].in_labels);
  return total.tp_residual() <= tol;
}

/// Quantum tester: probabilistic networks summing to a comb whose outer
/// spaces are trivial.
struct Tester {
  std::vector<HermitianOperator> elements;
  Comb comb;
};

inline bool validate_tester(const Tester& t, double tol = 1e-8) {
  if (t.elements.empty()) throw std::invalid_argument("validate_tester: empty");
  CMat sum = CMat::Zero(t.comb.op.dim(), t.comb.op.dim());
  for (const auto& e : t.elements) {
    if (min_eigenvalue(e) < -tol) return false;
    sum += e.matrix();
  }
  if (max_abs(CMat(sum - t.comb.op.matrix())) > tol) return false;
  return comb_report(t.comb, tol).ok;
}

}  // namespace procmat

#endif  // PROCMAT_NETWORKS_HPP
