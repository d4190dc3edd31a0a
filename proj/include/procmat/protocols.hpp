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

#ifndef PROCMAT_PROTOCOLS_HPP
#define PROCMAT_PROTOCOLS_HPP

#include "procmat/discrimination.hpp"

namespace procmat {

/// A pair of oppositely ordered comb process matrices built from a state rho
/// on AI and a unitary wire U, perfectly distinguishable for d >= 2:
/// W^{A<B} = rho (x) |U>><<U| (x) 1 and W^{B<A} its party swap.
struct PerfectPair {
  ProcessMatrix w_ab, w_ba;
  CMat rho;
  CMat u;
  CMat eigenbasis;    // columns x_i of the spectral decomposition of rho
  RVec eigenvalues;   // ascending, matching eigenbasis columns
  CMat cycle;         // P_sigma = sum_i |x_{i+1 mod d}><x_i|
  Index d = 0;

  PerfectPair(ProcessMatrix ab, ProcessMatrix ba)
      : w_ab(std::move(ab)), w_ba(std::move(ba)) {}
};

inline PerfectPair make_perfect_pair(const CMat& rho, const CMat& u) {
  const Index d = rho.rows();
  if (d < 1 || rho.cols() != d || u.rows() != d || u.cols() != d)
    throw std::invalid_argument("make_perfect_pair: rho and U must be square of equal size");
  HermitianOperator state({{kAI, d}}, rho);
  if (min_eigenvalue(state) < -1e-10 || std::abs(state.real_trace() - 1.0) > 1e-10)
    throw std::invalid_argument("make_perfect_pair: rho is not a state");
  if (max_abs(CMat(u * u.adjoint() - CMat::Identity(d, d))) > 1e-10)
    throw std::invalid_argument("make_perfect_pair: U is not unitary");

  // wire channel Ad_{U^T}: AO -> BI; its Choi occupies AO (x) BI inside W
  auto wire = choi_of_channel({CMat(u.transpose())}, {{kAO, d}}, {{kBI, d}});
  auto factor = permute_systems(wire.op, {kAO, kBI});
  auto w_raw = tensor(tensor(LabelledOperator({{kAI, d}}, rho), factor),
                      LabelledOperator::identity({{kBO, d}}));
  ProcessMatrix w_ab(HermitianOperator(w_raw), 1e-8);
  PerfectPair pp(w_ab, swap_parties(w_ab));

  pp.rho = rho;
  pp.u = u;
  const auto eig = hermitian_eig(state);
  pp.eigenbasis = eig.vectors;
  pp.eigenvalues = eig.values;
  pp.d = d;
  pp.cycle = CMat::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    pp.cycle += pp.eigenbasis.col((i + 1) % d) * pp.eigenbasis.col(i).adjoint();
  return pp;
}

/// Alice's local channel AI -> RA (x) AO: dephase in the eigenbasis of rho,
/// record the outcome, rotate by conj(U). The register RA is the slow factor.
inline ChoiMatrix alice_channel(const PerfectPair& pp) {
  const Index d = pp.d;
  std::vector<CMat> kraus;
  for (Index i = 0; i < d; ++i) {
    CMat k = CMat::Zero(d * d, d);
    const CVec rotated = pp.u.conjugate() * pp.eigenbasis.col(i);
    for (Index a = 0; a < d; ++a)
      k.row(i * d + a) = rotated(a) * pp.eigenbasis.col(i).adjoint();
    kraus.push_back(k);
  }
  return choi_of_channel(kraus, {{kAI, d}}, {{"RA", d}, {kAO, d}});
}

/// Bob's local channel BI -> RB (x) BO: cycle through P_sigma first, then the
/// same dephase-record-rotate step.
inline ChoiMatrix bob_channel(const PerfectPair& pp) {
  const Index d = pp.d;
  std::vector<CMat> kraus;
  for (Index i = 0; i < d; ++i) {
    CMat k = CMat::Zero(d * d, d);
    const CVec rotated = pp.u.conjugate() * pp.eigenbasis.col(i);
    const Eigen::RowVectorXcd bra = pp.eigenbasis.col(i).adjoint() * pp.cycle;
    for (Index a = 0; a < d; ++a) k.row(i * d + a) = rotated(a) * bra;
    kraus.push_back(k);
  }
  return choi_of_channel(kraus, {{kBI, d}}, {{"RB", d}, {kBO, d}});
}

/// Apply a channel to one named factor of a joint operator; the remaining
/// factors ride along. The channel input must be a single label of matching
/// dimension.
inline LabelledOperator apply_to_factor(const ChoiMatrix& ch, const LabelledOperator& state,
                                        const std::string& target) {
  if (ch.in_labels.size() != 1)
    throw std::invalid_argument("apply_to_factor: channel must have a single input label");
  const Index din = ch.in_dim();
  if (state.dim_of(target) != din)
    throw std::invalid_argument("apply_to_factor: dimension mismatch on '" + target + "'");

  std::vector<std::string> order;
  LabelList rest_labels;
  for (const auto& l : state.labels())
    if (l.name != target) {
      order.push_back(l.name);
      rest_labels.push_back(l);
    }
  order.push_back(target);
  const auto perm = permute_systems(state, order);
  const Index rest = perm.dim() / din;
  const Index dout = ch.out_dim();
  const LabelList in_list = {{ch.in_labels[0], din}};

  CMat out = CMat::Zero(rest * dout, rest * dout);
  for (Index i = 0; i < rest; ++i)
    for (Index j = 0; j < rest; ++j) {
      LabelledOperator blk(in_list, CMat(perm.matrix().block(i * din, j * din, din, din)));
      out.block(i * dout, j * dout, dout, dout) = ch.apply(blk).matrix();
    }
  LabelList out_labels = rest_labels;
  for (const auto& n : ch.out_labels) out_labels.push_back({n, ch.op.dim_of(n)});
  return LabelledOperator(out_labels, out);
}

enum class CausalOrder { AB, BA };

/// Run the discrimination protocol through the wire in the given causal
/// order; returns the joint state of the classical registers (RA, RB).
inline LabelledOperator simulate_order(const PerfectPair& pp, CausalOrder order) {
  const Index d = pp.d;
  const auto alice = alice_channel(pp);
  const auto bob = bob_channel(pp);

  if (order == CausalOrder::AB) {
    auto s = alice.apply(LabelledOperator({{kAI, d}}, pp.rho));  // RA (x) AO
    const auto wire = choi_of_channel({CMat(pp.u.transpose())}, {{kAO, d}}, {{kBI, d}});
    auto mid = apply_to_factor(wire, s, kAO);  // RA (x) BI
    auto full = apply_to_factor(bob, mid, kBI);  // RA (x) RB (x) BO
    auto regs = partial_trace(full, {kBO});
    return permute_systems(regs, {"RA", "RB"});
  }

  auto s = bob.apply(LabelledOperator({{kBI, d}}, pp.rho));  // RB (x) BO
  const auto wire = choi_of_channel({CMat(pp.u.transpose())}, {{kBO, d}}, {{kAI, d}});
  auto mid = apply_to_factor(wire, s, kBO);  // RB (x) AI
  auto full = apply_to_factor(alice, mid, kAI);  // RB (x) RA (x) AO
  auto regs = partial_trace(full, {kAO});
  return permute_systems(regs, {"RA", "RB"});
}

/// The measurement deciding the causal order: Q1 projects onto equal
/// register values.
inline CMat equal_register_projector(Index d) {
  CMat q1 = CMat::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) q1(i * d + i, i * d + i) = 1;
  return q1;
}

/// Probability of correctly telling W^{A<B} from W^{B<A} with the explicit
/// protocol: exactly one for d >= 2.
inline double perfect_probability(const PerfectPair& pp) {
  const Index d = pp.d;
  const auto sab = simulate_order(pp, CausalOrder::AB);
  const auto sba = simulate_order(pp, CausalOrder::BA);
  const CMat q1 = equal_register_projector(d);
  const CMat q0 = CMat::Identity(d * d, d * d) - q1;
  return 0.5 * (sab.matrix() * q0).trace().real() +
         0.5 * (sba.matrix() * q1).trace().real();
}

/// The protocol as an instrument: S_q collects the register outcomes assigned
/// to answer q through the product channel Phi_A (x) Phi_B.
inline Strategy protocol_strategy(const PerfectPair& pp) {
  const Index d = pp.d;
  const auto alice = alice_channel(pp);
  const auto bob = bob_channel(pp);
  const CMat q1 = equal_register_projector(d);

  auto instrument_elements = [d](const ChoiMatrix& ch, const std::string& reg,
                                 const std::string& in, const std::string& out) {
    std::vector<LabelledOperator> elems;
    for (Index i = 0; i < d; ++i) {
      CMat pick = CMat::Zero(d, d);
      pick(i, i) = 1;
      auto proj = embed(LabelledOperator({{reg, d}}, pick), ch.op.labels());
      auto elem = partial_trace(
          LabelledOperator(ch.op.labels(), CMat(proj.matrix() * ch.op.matrix())), {reg});
      elems.push_back(permute_systems(full_transpose(elem), {in, out}));
    }
    return elems;
  };
  const auto alice_elems = instrument_elements(alice, "RA", kAI, kAO);
  const auto bob_elems = instrument_elements(bob, "RB", kBI, kBO);

  const Index side = d * d * d * d;
  CMat s0 = CMat::Zero(side, side);
  CMat s1 = CMat::Zero(side, side);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      auto joint = permute_systems(
          tensor(alice_elems[std::size_t(a)], bob_elems[std::size_t(b)]),
          {kAI, kAO, kBI, kBO});
      if (q1(a * d + b, a * d + b).real() > 0.5)
        s1 += joint.matrix();
      else
        s0 += joint.matrix();
    }
  const LabelList full = party_labels(d, d, d, d);
  return Strategy{HermitianOperator(full, s0, 1e-9), HermitianOperator(full, s1, 1e-9)};
}

}  // namespace procmat

#endif  // PROCMAT_PROTOCOLS_HPP
