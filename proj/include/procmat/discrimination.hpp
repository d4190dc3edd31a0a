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

#ifndef PROCMAT_DISCRIMINATION_HPP
#define PROCMAT_DISCRIMINATION_HPP

#include "procmat/sdp_builders.hpp"

namespace procmat {

/// Binary instrument whose element sum is a non-signalling Choi matrix.
struct Strategy {
  HermitianOperator s0, s1;

  NonSignallingReport sum_report(double tol = 1e-7) const {
    return nonsignalling_report(
        HermitianOperator(s0.labels(), CMat(s0.matrix() + s1.matrix())), tol);
  }

  double feasibility_residual() const {
    const double p0 = std::max(0.0, -min_eigenvalue(s0));
    const double p1 = std::max(0.0, -min_eigenvalue(s1));
    return std::max({p0, p1, sum_report().max_residual()});
  }
};

/// Dual certificate of the discrimination program.
struct DualCertificate {
  double alpha = 0;
  HermitianOperator y0;  // on AI (x) BI (x) BO
  HermitianOperator y1;  // on AI (x) AO (x) BI

  /// Max violation of the two dual operator inequalities against the pair.
  double feasibility_residual(const HermitianOperator& w0, const HermitianOperator& w1) const {
    const LabelList full = w0.labels();
    CMat gamma = ns_adjoint_a(y0, full) + ns_adjoint_b(y1, full) +
                 alpha * CMat::Identity(w0.dim(), w0.dim());
    const double r0 = std::max(
        0.0, -min_eigenvalue(HermitianOperator(full, CMat(gamma - 0.5 * w0.matrix()))));
    const double r1 = std::max(
        0.0, -min_eigenvalue(HermitianOperator(full, CMat(gamma - 0.5 * w1.matrix()))));
    return std::max(r0, r1);
  }
};

struct DiscriminationResult {
  double p_succ = 0.5;
  Strategy strategy;
  DualCertificate certificate;
  double gap = 0;
  double constraint_residual = 0;
  SdpStatus status = SdpStatus::NumericalFailure;
  int iterations = 0;
};

namespace detail {

inline void require_same_spaces(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.labels().size() != b.labels().size())
    throw std::invalid_argument("operand label mismatch");
  for (const auto& l : a.labels())
    if (!b.has(l.name) || b.dim_of(l.name) != l.dim)
      throw std::invalid_argument("operand dimension mismatch on label '" + l.name + "'");
}

inline DualCertificate rebuild_certificate(const SdpSolution& sol, const NsFamilyLayout& layout) {
  DualCertificate cert;
  cert.alpha = sol.dual_multipliers[layout.trace_row];
  const auto basis_a = hermitian_basis(layout.target_a);
  CMat y0 = CMat::Zero(total_dim(layout.target_a), total_dim(layout.target_a));
  for (std::size_t k = 0; k < layout.count_a; ++k)
    y0 += sol.dual_multipliers[layout.first_a + k] * basis_a[k].matrix();
  const auto basis_b = hermitian_basis(layout.target_b);
  CMat y1 = CMat::Zero(total_dim(layout.target_b), total_dim(layout.target_b));
  for (std::size_t k = 0; k < layout.count_b; ++k)
    y1 += sol.dual_multipliers[layout.first_b + k] * basis_b[k].matrix();
  cert.y0 = HermitianOperator(layout.target_a, y0);
  cert.y1 = HermitianOperator(layout.target_b, y1);
  return cert;
}

// The shared Table-1-shaped program: optimize tr(C0 S0) + tr(C1 S1) over
// instrument pairs with non-signalling sum.
inline SdpSolution solve_strategy_program(const HermitianOperator& c0,
                                          const HermitianOperator& c1, const LabelList& full,
                                          NsFamilyLayout& layout, const SdpOptions& opts) {
  SdpProblem p;
  p.sense = SdpSense::Maximize;
  const int s0 = p.add_block("S0", total_dim(full));
  const int s1 = p.add_block("S1", total_dim(full));
  p.set_objective(s0, c0.matrix());
  p.set_objective(s1, c1.matrix());
  layout = add_nonsignalling_family(p, {s0, s1}, full);
  return solve(p, opts);
}

}  // namespace detail

/// Optimal single-shot discrimination probability between two process
/// matrices, with the achieving strategy and a dual certificate.
inline DiscriminationResult p_succ(const ProcessMatrix& w0, const ProcessMatrix& w1,
                                   const SdpOptions& opts = {}) {
  detail::require_same_spaces(w0.op(), w1.op());
  const LabelList full = w0.op().labels();

  HermitianOperator c0(full, CMat(0.5 * w0.matrix()));
  HermitianOperator c1(full, CMat(0.5 * w1.matrix()));
  NsFamilyLayout layout;
  const auto sol = detail::solve_strategy_program(c0, c1, full, layout, opts);
  if (sol.status != SdpStatus::Optimal)
    throw std::runtime_error(std::string("p_succ: solver failed with status ") +
                             to_string(sol.status) + ": " + sol.message);

  DiscriminationResult res;
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.p_succ = 0.5 * (sol.primal_value + sol.dual_value);
  res.gap = sol.gap;
  res.strategy = Strategy{HermitianOperator(full, sol.block_values[0], 1e-8),
                          HermitianOperator(full, sol.block_values[1], 1e-8)};
  res.constraint_residual = std::max(sol.primal_residual, res.strategy.feasibility_residual());
  res.certificate = detail::rebuild_certificate(sol, layout);
  return res;
}

/// Analytic value for free process matrices: 1/2 + ||rho - sigma||_1 / 4.
inline double p_succ_free(const LabelledOperator& rho, const LabelledOperator& sigma,
                          double tol = 1e-9) {
  for (const auto* op : {&rho, &sigma}) {
    if (op->labels().size() != 2 || !op->has(kAI) || !op->has(kBI))
      throw std::invalid_argument("p_succ_free: expected states on AI, BI");
    HermitianOperator h(*op, 1e-9);
    if (min_eigenvalue(h) < -tol || std::abs(h.real_trace() - 1.0) > tol)
      throw std::invalid_argument("p_succ_free: input is not a quantum state");
  }
  const auto sig = permute_systems(sigma, {kAI, kBI});
  const auto rh = permute_systems(rho, {kAI, kBI});
  return 0.5 + 0.25 * trace_norm(HermitianOperator(rh.labels(),
                                                   CMat(rh.matrix() - sig.matrix())));
}

/// Base norm of a Hermitian operator with respect to the process-matrix cone:
/// the maximum of tr(x (S0 - S1)) over instrument pairs with non-signalling
/// sum.
inline double base_norm(const HermitianOperator& x, const SdpOptions& opts = {},
                        SdpSolution* detail_out = nullptr) {
  for (const char* n : {kAI, kAO, kBI, kBO})
    if (!x.has(n)) throw std::invalid_argument("base_norm: expected labels AI, AO, BI, BO");
  const auto canon = HermitianOperator(permute_systems(x, {kAI, kAO, kBI, kBO}));
  const LabelList full = canon.labels();
  HermitianOperator c0 = canon;
  HermitianOperator c1(full, CMat(-canon.matrix()));
  NsFamilyLayout layout;
  const auto sol = detail::solve_strategy_program(c0, c1, full, layout, opts);
  if (sol.status != SdpStatus::Optimal)
    throw std::runtime_error(std::string("base_norm: solver failed with status ") +
                             to_string(sol.status) + ": " + sol.message);
  if (detail_out) *detail_out = sol;
  return 0.5 * (sol.primal_value + sol.dual_value);
}

// ---------------------------------------------------------------------------
// Adaptive testers
// ---------------------------------------------------------------------------

/// Two-element tester for comb-shaped process matrices: positive operators
/// whose BO-marginal sum is 1_BI (x) J with J the Choi matrix of a channel
/// AI -> AO.
struct AdaptiveTester {
  HermitianOperator l0, l1;
  HermitianOperator j;

  double feasibility_residual() const {
    const double p0 = std::max(0.0, -min_eigenvalue(l0));
    const double p1 = std::max(0.0, -min_eigenvalue(l1));
    const LabelList full = l0.labels();
    auto sum = HermitianOperator(full, CMat(l0.matrix() + l1.matrix()));
    auto marg = partial_trace(sum, {kBO});
    auto lifted = embed(j, marg.labels());
    const double comb = max_abs(CMat(marg.matrix() - lifted.matrix()));
    auto jm = partial_trace(j, {kAO});
    const double tp = max_abs(CMat(jm.matrix() - CMat::Identity(jm.dim(), jm.dim())));
    return std::max({p0, p1, comb, tp});
  }
};

struct AdaptiveResult {
  double p_adapt = 0.5;
  AdaptiveTester tester;
  double gap = 0;
  double constraint_residual = 0;
  SdpStatus status = SdpStatus::NumericalFailure;
};

/// Optimal adaptive (tester) discrimination probability for two process
/// matrices in W^{A<B}. Equals p_succ on such pairs.
inline AdaptiveResult p_adapt(const ProcessMatrix& w0, const ProcessMatrix& w1,
                              const SdpOptions& opts = {}, double comb_tol = 1e-7) {
  detail::require_same_spaces(w0.op(), w1.op());
  if (comb_ab_residual(w0.op()) > comb_tol || comb_ab_residual(w1.op()) > comb_tol)
    throw std::invalid_argument("p_adapt: operands must lie in W^{A<B}");
  const LabelList full = w0.op().labels();
  const LabelList jspace = {{kAI, w0.dim_of(kAI)}, {kAO, w0.dim_of(kAO)}};
  const LabelList tspace = {{kAI, w0.dim_of(kAI)},
                            {kAO, w0.dim_of(kAO)},
                            {kBI, w0.dim_of(kBI)}};

  SdpProblem p;
  p.sense = SdpSense::Maximize;
  const int l0 = p.add_block("L0", total_dim(full));
  const int l1 = p.add_block("L1", total_dim(full));
  const int jb = p.add_block("J", total_dim(jspace));
  p.set_objective(l0, CMat(0.5 * w0.matrix()));
  p.set_objective(l1, CMat(0.5 * w1.matrix()));

  // tr_BO(L0 + L1) = 1_BI (x) J
  for (const auto& f : hermitian_basis(tspace)) {
    const CMat lcoeff = embed(f, full).matrix();
    const CMat jcoeff = -partial_trace(f, {kBI}).matrix();
    SdpConstraint c;
    c.rhs = 0.0;
    c.coeff.push_back(SdpCoefficient::dense(l0, lcoeff));
    c.coeff.push_back(SdpCoefficient::dense(l1, lcoeff));
    c.coeff.push_back(SdpCoefficient::dense(jb, jcoeff));
    p.add_constraint(std::move(c));
  }
  // tr_AO(J) = 1_AI
  for (const auto& g : hermitian_basis(LabelList{{kAI, w0.dim_of(kAI)}})) {
    SdpConstraint c;
    c.rhs = g.real_trace();
    c.coeff.push_back(SdpCoefficient::dense(jb, embed(g, jspace).matrix()));
    p.add_constraint(std::move(c));
  }

  const auto sol = solve(p, opts);
  if (sol.status != SdpStatus::Optimal)
    throw std::runtime_error(std::string("p_adapt: solver failed with status ") +
                             to_string(sol.status) + ": " + sol.message);
  AdaptiveResult res;
  res.status = sol.status;
  res.p_adapt = 0.5 * (sol.primal_value + sol.dual_value);
  res.gap = sol.gap;
  res.constraint_residual = sol.primal_residual;
  res.tester = AdaptiveTester{HermitianOperator(full, sol.block_values[0], 1e-8),
                              HermitianOperator(full, sol.block_values[1], 1e-8),
                              HermitianOperator(jspace, sol.block_values[2], 1e-8)};
  return res;
}

// ---------------------------------------------------------------------------
// Distances to process-matrix classes
// ---------------------------------------------------------------------------

struct DistanceResult {
  double distance = 0;
  ProcessMatrix closest;
  DualCertificate witness;
  double gap = 0;
  double constraint_residual = 0;
  SdpStatus status = SdpStatus::NumericalFailure;

  DistanceResult(const ProcessMatrix& c) : closest(c) {}
};

namespace detail {

// Affine parameterization of a process-matrix class: W*(t) = offset +
// sum_j t_j basis[j] mapped into the full space, together with the PSD
// blocks certifying class membership.
struct ClassParam {
  // One entry per auxiliary PSD block: the block's own space, affine offset
  // and basis in that space.
  struct PsdBlock {
    std::string name;
    LabelList space;
    CMat offset;
    std::vector<CMat> basis;  // per parameter, possibly zero
  };
  std::vector<PsdBlock> blocks;
  CMat wstar_offset;              // image in the full four-label space
  std::vector<CMat> wstar_basis;  // per parameter
  std::size_t params() const { return wstar_basis.size(); }
};

// Linear subspace of Herm(AI (x) AO (x) BI) obeying the comb marginal
// condition tr_BI X = (something on AI) (x) 1_AO.
inline std::vector<HermitianOperator> comb_ab_subspace_basis(const LabelList& conespace) {
  const LabelList target = {{kAI, label_dim(conespace, kAI)}, {kAO, label_dim(conespace, kAO)}};
  std::vector<HermitianOperator> rows;
  for (const auto& g : hermitian_basis(target)) {
    // adjoint of X -> tr_BI X - P_AO(tr_BI X) at g
    auto diff = HermitianOperator(target, CMat(g.matrix() - lv_term(g, {kAO}).matrix()));
    rows.emplace_back(embed(diff, conespace));
  }
  return hermitian_nullspace_basis(conespace, rows);
}

inline std::vector<HermitianOperator> comb_ba_subspace_basis(const LabelList& conespace) {
  const LabelList target = {{kBI, label_dim(conespace, kBI)}, {kBO, label_dim(conespace, kBO)}};
  std::vector<HermitianOperator> rows;
  for (const auto& g : hermitian_basis(target)) {
    auto diff = HermitianOperator(target, CMat(g.matrix() - lv_term(g, {kBO}).matrix()));
    rows.emplace_back(embed(diff, conespace));
  }
  return hermitian_nullspace_basis(conespace, rows);
}

inline ClassParam class_parameterization(ProcessClassTag cls, const LabelList& full) {
  const Index dai = label_dim(full, kAI), dao = label_dim(full, kAO);
  const Index dbi = label_dim(full, kBI), dbo = label_dim(full, kBO);
  ClassParam param;

  auto lift = [&](const HermitianOperator& x) { return embed(x, full).matrix(); };

  if (cls == ProcessClassTag::Free) {
    const LabelList space = {{kAI, dai}, {kBI, dbi}};
    ClassParam::PsdBlock blk;
    blk.name = "rho";
    blk.space = space;
    blk.offset = CMat::Identity(dai * dbi, dai * dbi) / double(dai * dbi);
    param.wstar_offset = lift(HermitianOperator(space, blk.offset));
    for (const auto& f : traceless_hermitian_basis(space)) {
      blk.basis.push_back(f.matrix());
      param.wstar_basis.push_back(lift(f));
    }
    param.blocks.push_back(std::move(blk));
    return param;
  }

  if (cls == ProcessClassTag::CombAB || cls == ProcessClassTag::CombBA) {
    const bool ab = cls == ProcessClassTag::CombAB;
    const LabelList space = ab ? LabelList{{kAI, dai}, {kAO, dao}, {kBI, dbi}}
                               : LabelList{{kAI, dai}, {kBI, dbi}, {kBO, dbo}};
    const auto cone_basis = ab ? comb_ab_subspace_basis(space) : comb_ba_subspace_basis(space);
    const Index side = total_dim(space);
    const double target_trace = double(ab ? dao : dbo);

    ClassParam::PsdBlock blk;
    blk.name = ab ? "comb_ab" : "comb_ba";
    blk.space = space;
    blk.offset = CMat::Identity(side, side) * (target_trace / double(side));
    param.wstar_offset = lift(HermitianOperator(space, blk.offset));
    // restrict the cone subspace to the trace slice through its own nullspace
    RMat trace_row(1, Index(cone_basis.size()));
    for (std::size_t j = 0; j < cone_basis.size(); ++j)
      trace_row(0, Index(j)) = cone_basis[j].real_trace();
    Eigen::JacobiSVD<RMat> svd(trace_row, Eigen::ComputeFullV);
    const Index rank = svd.singularValues()(0) > 1e-12 ? 1 : 0;
    const RMat v = svd.matrixV();
    for (Index c = rank; c < v.cols(); ++c) {
      CMat dir = CMat::Zero(side, side);
      for (std::size_t j = 0; j < cone_basis.size(); ++j)
        dir += v(Index(j), c) * cone_basis[j].matrix();
      blk.basis.push_back(dir);
      param.wstar_basis.push_back(lift(HermitianOperator(space, dir)));
    }
    param.blocks.push_back(std::move(blk));
    return param;
  }

  // Separable: W* = Wa + Wb with Wa in cone(W^{A<B}), Wb in cone(W^{B<A}),
  // traces coupled to the process-matrix normalization.
  const LabelList spa = {{kAI, dai}, {kAO, dao}, {kBI, dbi}};
  const LabelList spb = {{kAI, dai}, {kBI, dbi}, {kBO, dbo}};
  const auto basis_a = comb_ab_subspace_basis(spa);
  const auto basis_b = comb_ba_subspace_basis(spb);
  const Index na = Index(basis_a.size()), nb = Index(basis_b.size());

  ClassParam::PsdBlock blka, blkb;
  blka.name = "comb_ab";
  blka.space = spa;
  blka.offset = CMat::Identity(total_dim(spa), total_dim(spa)) *
                (0.5 * double(dao) / double(total_dim(spa)));
  blkb.name = "comb_ba";
  blkb.space = spb;
  blkb.offset = CMat::Identity(total_dim(spb), total_dim(spb)) *
                (0.5 * double(dbo) / double(total_dim(spb)));
  param.wstar_offset = embed(HermitianOperator(spa, blka.offset), full).matrix() +
                       embed(HermitianOperator(spb, blkb.offset), full).matrix();

  // joint trace condition dBO tr(Xa) + dAO tr(Xb) = const
  RMat trace_row(1, na + nb);
  for (Index j = 0; j < na; ++j)
    trace_row(0, j) = double(dbo) * basis_a[std::size_t(j)].real_trace();
  for (Index j = 0; j < nb; ++j)
    trace_row(0, na + j) = double(dao) * basis_b[std::size_t(j)].real_trace();
  Eigen::JacobiSVD<RMat> svd(trace_row, Eigen::ComputeFullV);
  const Index rank = svd.singularValues()(0) > 1e-12 ? 1 : 0;
  const RMat v = svd.matrixV();
  for (Index c = rank; c < v.cols(); ++c) {
    CMat da = CMat::Zero(total_dim(spa), total_dim(spa));
    CMat db = CMat::Zero(total_dim(spb), total_dim(spb));
    for (Index j = 0; j < na; ++j) da += v(j, c) * basis_a[std::size_t(j)].matrix();
    for (Index j = 0; j < nb; ++j) db += v(na + j, c) * basis_b[std::size_t(j)].matrix();
    blka.basis.push_back(da);
    blkb.basis.push_back(db);
    param.wstar_basis.push_back(embed(HermitianOperator(spa, da), full).matrix() +
                                embed(HermitianOperator(spb, db), full).matrix());
  }
  param.blocks.push_back(std::move(blka));
  param.blocks.push_back(std::move(blkb));
  return param;
}

}  // namespace detail

/// Trace-norm distance (in the base-norm sense) from a process matrix to one
/// of the classes Free, CombAB, CombBA or Separable, with the closest class
/// member and the dual witness.
inline DistanceResult distance_to_class(const ProcessMatrix& w, ProcessClassTag cls,
                                        const SdpOptions& opts = {}) {
  if (cls == ProcessClassTag::Unclassified)
    throw std::invalid_argument("distance_to_class: no target class");
  const LabelList full = w.op().labels();
  const Index d = w.dim();
  const double dai = double(w.dim_of(kAI)), dbi = double(w.dim_of(kBI));

  const auto param = detail::class_parameterization(cls, full);
  const LabelList target_a = {{kAI, w.dim_of(kAI)}, {kBI, w.dim_of(kBI)}, {kBO, w.dim_of(kBO)}};
  const LabelList target_b = {{kAI, w.dim_of(kAI)}, {kAO, w.dim_of(kAO)}, {kBI, w.dim_of(kBI)}};
  const auto basis_a = hermitian_basis(target_a);
  const auto basis_b = hermitian_basis(target_b);

  // The program below is fed so that the solver's dual side is exactly the
  // distance program: minimize 4 dAI dBI alpha - 2 over (alpha, Y0, Y1,
  // class parameters) subject to the two operator inequalities and class
  // positivity. Variables become constraint rows; LMI blocks become primal
  // blocks.
  SdpProblem p;
  p.sense = SdpSense::Minimize;
  const int lmi_w = p.add_block("lmi_w", d);
  const int lmi_s = p.add_block("lmi_wstar", d);
  std::vector<int> cls_blocks;
  for (const auto& blk : param.blocks) cls_blocks.push_back(p.add_block(blk.name, blk.offset.rows()));

  p.set_objective(lmi_w, CMat(-0.5 * w.matrix()));
  p.set_objective(lmi_s, CMat(-0.5 * param.wstar_offset));
  for (std::size_t b = 0; b < param.blocks.size(); ++b)
    p.set_objective(cls_blocks[b], param.blocks[b].offset);

  NsFamilyLayout layout;
  layout.target_a = target_a;
  layout.target_b = target_b;

  // alpha row
  const std::size_t alpha_row = p.constraints.size();
  p.add_constraint({{lmi_w, CMat(-CMat::Identity(d, d))}, {lmi_s, CMat(-CMat::Identity(d, d))}},
                   -4.0 * dai * dbi);
  layout.trace_row = alpha_row;

  // Y0 rows
  layout.first_a = p.constraints.size();
  for (const auto& f : basis_a) {
    const CMat coeff = -ns_adjoint_a(f, full);
    p.add_constraint({{lmi_w, coeff}, {lmi_s, coeff}}, 0.0);
  }
  layout.count_a = p.constraints.size() - layout.first_a;

  // Y1 rows
  layout.first_b = p.constraints.size();
  for (const auto& f : basis_b) {
    const CMat coeff = -ns_adjoint_b(f, full);
    p.add_constraint({{lmi_w, coeff}, {lmi_s, coeff}}, 0.0);
  }
  layout.count_b = p.constraints.size() - layout.first_b;

  // class parameter rows
  const std::size_t first_t = p.constraints.size();
  for (std::size_t j = 0; j < param.params(); ++j) {
    std::vector<std::pair<int, CMat>> coeffs;
    coeffs.emplace_back(lmi_s, CMat(0.5 * param.wstar_basis[j]));
    for (std::size_t b = 0; b < param.blocks.size(); ++b)
      if (max_abs(param.blocks[b].basis[j]) > 0)
        coeffs.emplace_back(cls_blocks[b], CMat(-param.blocks[b].basis[j]));
    p.add_constraint(coeffs, 0.0);
  }

  const auto sol = solve(p, opts);
  if (sol.status != SdpStatus::Optimal)
    throw std::runtime_error(std::string("distance_to_class: solver failed with status ") +
                             to_string(sol.status) + ": " + sol.message);

  // Reconstruct the closest member from the parameter multipliers.
  CMat wstar = param.wstar_offset;
  for (std::size_t j = 0; j < param.params(); ++j)
    wstar += sol.dual_multipliers[first_t + j] * param.wstar_basis[j];

  DistanceResult res{ProcessMatrix(HermitianOperator(full, wstar, 1e-7), 1e-6)};
  // solver value covers the linear part 4 dAI dBI alpha of the objective
  const double value = -0.5 * (sol.primal_value + sol.dual_value) - 2.0;
  res.distance = std::max(0.0, value);
  res.gap = sol.gap;
  res.constraint_residual = sol.primal_residual;
  res.status = sol.status;

  res.witness.alpha = sol.dual_multipliers[alpha_row];
  CMat y0 = CMat::Zero(total_dim(target_a), total_dim(target_a));
  for (std::size_t k = 0; k < layout.count_a; ++k)
    y0 += sol.dual_multipliers[layout.first_a + k] * basis_a[k].matrix();
  CMat y1 = CMat::Zero(total_dim(target_b), total_dim(target_b));
  for (std::size_t k = 0; k < layout.count_b; ++k)
    y1 += sol.dual_multipliers[layout.first_b + k] * basis_b[k].matrix();
  res.witness.y0 = HermitianOperator(target_a, y0);
  res.witness.y1 = HermitianOperator(target_b, y1);
  return res;
}

/// Class residual for membership testing; Separable membership goes through
/// the distance program.
inline ProcessClassTag classify_process(const ProcessMatrix& w, double residual_tol = 1e-7,
                                        double sep_tol = 1e-6, const SdpOptions& opts = {}) {
  if (free_residual(w.op()) <= residual_tol) return ProcessClassTag::Free;
  if (comb_ab_residual(w.op()) <= residual_tol) return ProcessClassTag::CombAB;
  if (comb_ba_residual(w.op()) <= residual_tol) return ProcessClassTag::CombBA;
  if (distance_to_class(w, ProcessClassTag::Separable, opts).distance <= sep_tol)
    return ProcessClassTag::Separable;
  return ProcessClassTag::Unclassified;
}

inline bool is_separable(const ProcessMatrix& w, double tol = 1e-6,
                         const SdpOptions& opts = {}) {
  return distance_to_class(w, ProcessClassTag::Separable, opts).distance <= tol;
}

// ---------------------------------------------------------------------------
// Realization of the optimal strategy
// ---------------------------------------------------------------------------

/// The physical implementation of a discrimination strategy built from a
/// non-signalling Choi matrix N: the channel Choi K over four ancilla spaces
/// and the binary measurement (Q0, Q1).
struct Realization {
  ChoiMatrix k;
  HermitianOperator q0, q1;       // effects on X1..X4
  double realized_probability = 0.5;
};

/// Assemble the Theorem-1 realization for a feasible non-signalling N and the
/// pair (W0, W1): K = (1 (x) sqrt(N)) |1>><<1| (1 (x) sqrt(N)) and
/// Holevo-Helstrom effects of sqrt(N)(W0 - W1)sqrt(N) lifted through the
/// image projector.
inline Realization build_realization(const HermitianOperator& n_raw, const ProcessMatrix& w0,
                                     const ProcessMatrix& w1, double ns_tol = 1e-6) {
  detail::require_same_spaces(w0.op(), w1.op());
  const auto rep = nonsignalling_report(n_raw, ns_tol);
  if (!rep.ok)
    throw std::invalid_argument("build_realization: N is not non-signalling (residual " +
                                std::to_string(rep.max_residual()) + ")");
  const LabelList full = w0.op().labels();
  const auto n = psd_clamp(HermitianOperator(permute_systems(n_raw, {kAI, kAO, kBI, kBO})));
  const auto sq = sqrt_psd(n);
  const auto pinv = pseudo_inverse_sqrt(n);

  const CMat delta = sq.matrix() * (w0.matrix() - w1.matrix()) * sq.matrix();
  const auto eig = hermitian_eig(HermitianOperator(full, delta));
  const Index d = w0.dim();
  CMat pos = CMat::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    if (eig.values(i) > 0) pos += eig.vectors.col(i) * eig.vectors.col(i).adjoint();

  Realization out;
  CMat q0m = CMat::Identity(d, d) - pinv.image_proj.matrix() + pos;
  CMat q1m = CMat::Identity(d, d) - q0m;
  const LabelList xlabels = {{"X1", w0.dim_of(kAI)},
                             {"X2", w0.dim_of(kAO)},
                             {"X3", w0.dim_of(kBI)},
                             {"X4", w0.dim_of(kBO)}};
  out.q0 = HermitianOperator(xlabels, q0m, 1e-9);
  out.q1 = HermitianOperator(xlabels, q1m, 1e-9);

  // K = |w><w| with w the row-major vectorization of sqrt(N)^T across the
  // ancilla copy.
  CVec wvec(d * d);
  for (Index i = 0; i < d; ++i)
    for (Index s = 0; s < d; ++s) wvec(i * d + s) = sq.matrix()(s, i);
  LabelList klabels = xlabels;
  for (const auto& l : full) klabels.push_back(l);
  HermitianOperator kop(klabels, CMat(wvec * wvec.adjoint()));
  out.k = ChoiMatrix(kop, {"X1", "X2", "X3", "X4", kAO, kBO}, {kAI, kBI});

  const CMat m0 = sq.matrix() * w0.matrix() * sq.matrix();
  const CMat m1 = sq.matrix() * w1.matrix() * sq.matrix();
  out.realized_probability =
      0.5 * (q0m * m0).trace().real() + 0.5 * (q1m * m1).trace().real();
  return out;
}

/// Strategy recovered from a realization: S_i = sqrt(N) Q_i sqrt(N).
inline Strategy strategy_from_realization(const HermitianOperator& n_raw,
                                          const Realization& r) {
  const auto n = psd_clamp(HermitianOperator(permute_systems(n_raw, {kAI, kAO, kBI, kBO})));
  const auto sq = sqrt_psd(n);
  const LabelList full = n.labels();
  return Strategy{
      HermitianOperator(full, CMat(sq.matrix() * r.q0.matrix() * sq.matrix()), 1e-9),
      HermitianOperator(full, CMat(sq.matrix() * r.q1.matrix() * sq.matrix()), 1e-9)};
}

}  // namespace procmat

#endif  // PROCMAT_DISCRIMINATION_HPP
