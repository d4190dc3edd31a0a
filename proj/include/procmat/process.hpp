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

#ifndef PROCMAT_PROCESS_HPP
#define PROCMAT_PROCESS_HPP

#include <array>

#include "procmat/networks.hpp"

namespace procmat {

namespace detail {

inline void require_party_labels(const LabelledOperator& w) {
  if (w.labels().size() != 4 || !w.has(kAI) || !w.has(kAO) || !w.has(kBI) || !w.has(kBO))
    throw std::invalid_argument("expected an operator on labels AI, AO, BI, BO");
}

}  // namespace detail

/// The building block of the validity projector: trace out the named factors
/// and replace them by normalized identities.
inline HermitianOperator lv_term(const HermitianOperator& w, const std::set<std::string>& over) {
  double d = 1;
  for (const auto& name : over) d *= double(w.dim_of(name));
  auto lifted = embed(partial_trace(w, over), w.labels());
  lifted.matrix() /= d;
  return HermitianOperator(lifted, 1e-9);
}

/// Projector onto the subspace of valid process matrices (up to positivity
/// and normalization).
inline HermitianOperator project_LV(const HermitianOperator& w) {
  detail::require_party_labels(w);
  CMat m = lv_term(w, {kAO}).matrix() + lv_term(w, {kBO}).matrix() -
           lv_term(w, {kAO, kBO}).matrix() - lv_term(w, {kBI, kBO}).matrix() +
           lv_term(w, {kAO, kBI, kBO}).matrix() - lv_term(w, {kAI, kAO}).matrix() +
           lv_term(w, {kAO, kAI, kBO}).matrix();
  return HermitianOperator(w.labels(), m);
}

struct ValidityReport {
  double psd = 0;    // max(0, -lambda_min)
  double space = 0;  // distance from the validity subspace (max-abs residual)
  double trace = 0;  // |tr W - dim(AO) dim(BO)|
  bool ok = false;

  double max_residual() const { return std::max({psd, space, trace}); }
};

/// Definition-1 validity: W >= 0, W = L_V(W), tr W = dim(AO) dim(BO).
inline ValidityReport validate_def1(const HermitianOperator& w, double tol = 1e-8) {
  detail::require_party_labels(w);
  ValidityReport rep;
  rep.psd = std::max(0.0, -min_eigenvalue(w));
  rep.space = max_abs(CMat(w.matrix() - project_LV(w).matrix()));
  rep.trace = std::abs(w.real_trace() - double(w.dim_of(kAO) * w.dim_of(kBO)));
  rep.ok = rep.psd <= tol && rep.space <= tol && rep.trace <= tol;
  return rep;
}

/// Equivalent validity characterization through explicit marginal identities.
inline ValidityReport validate_def2(const HermitianOperator& w, double tol = 1e-8) {
  detail::require_party_labels(w);
  ValidityReport rep;
  rep.psd = std::max(0.0, -min_eigenvalue(w));
  const double r1 =
      max_abs(CMat(lv_term(w, {kAI, kAO}).matrix() - lv_term(w, {kAO, kAI, kBO}).matrix()));
  const double r2 =
      max_abs(CMat(lv_term(w, {kBI, kBO}).matrix() - lv_term(w, {kAO, kBI, kBO}).matrix()));
  const double r3 = max_abs(CMat(w.matrix() - lv_term(w, {kBO}).matrix() -
                                 lv_term(w, {kAO}).matrix() + lv_term(w, {kAO, kBO}).matrix()));
  rep.space = std::max({r1, r2, r3});
  rep.trace = std::abs(w.real_trace() - double(w.dim_of(kAO) * w.dim_of(kBO)));
  rep.ok = rep.psd <= tol && rep.space <= tol && rep.trace <= tol;
  return rep;
}

/// A validated process matrix on AI (x) AO (x) BI (x) BO, stored in canonical
/// label order.
class ProcessMatrix {
 public:
  explicit ProcessMatrix(const HermitianOperator& w, double tol = 1e-9)
      : op_(HermitianOperator(permute_systems(w, {kAI, kAO, kBI, kBO}))) {
    const auto rep = validate_def1(op_, tol);
    if (!rep.ok)
      throw std::invalid_argument(
          "not a process matrix (psd " + std::to_string(rep.psd) + ", space " +
          std::to_string(rep.space) + ", trace " + std::to_string(rep.trace) + ")");
  }

  const HermitianOperator& op() const { return op_; }
  const CMat& matrix() const { return op_.matrix(); }
  Index dim() const { return op_.dim(); }
  Index dim_of(const std::string& name) const { return op_.dim_of(name); }

 private:
  HermitianOperator op_;
};

enum class ProcessClassTag { Free, CombAB, CombBA, Separable, Unclassified };

inline const char* to_string(ProcessClassTag t) {
  switch (t) {
    case ProcessClassTag::Free: return "free";
    case ProcessClassTag::CombAB: return "comb-ab";
    case ProcessClassTag::CombBA: return "comb-ba";
    case ProcessClassTag::Separable: return "separable";
    default: return "unclassified";
  }
}

/// Residual of membership in W^{A||B}: vanishing iff W carries identity on
/// both output spaces.
inline double free_residual(const HermitianOperator& w) {
  detail::require_party_labels(w);
  return max_abs(CMat(w.matrix() - lv_term(w, {kAO, kBO}).matrix()));
}

/// Residuals of membership in W^{A<B}: identity on BO, and the traced-out
/// marginal on AI (x) AO must carry identity on AO.
inline std::array<double, 2> comb_ab_residuals(const HermitianOperator& w) {
  detail::require_party_labels(w);
  const double r1 = max_abs(CMat(w.matrix() - lv_term(w, {kBO}).matrix()));
  const auto y = HermitianOperator(partial_trace(w, {kBI, kBO}), 1e-9);
  const double r2 = max_abs(CMat(y.matrix() - lv_term(y, {kAO}).matrix()));
  return {r1, r2};
}

inline std::array<double, 2> comb_ba_residuals(const HermitianOperator& w) {
  detail::require_party_labels(w);
  const double r1 = max_abs(CMat(w.matrix() - lv_term(w, {kAO}).matrix()));
  const auto y = HermitianOperator(partial_trace(w, {kAI, kAO}), 1e-9);
  const double r2 = max_abs(CMat(y.matrix() - lv_term(y, {kBO}).matrix()));
  return {r1, r2};
}

inline double comb_ab_residual(const HermitianOperator& w) {
  const auto r = comb_ab_residuals(w);
  return std::max(r[0], r[1]);
}

inline double comb_ba_residual(const HermitianOperator& w) {
  const auto r = comb_ba_residuals(w);
  return std::max(r[0], r[1]);
}

/// W^{A||B} from a state on AI (x) BI. Output dimensions default to the
/// matching input dimensions.
inline ProcessMatrix make_free(const LabelledOperator& rho, Index dao = 0, Index dbo = 0,
                               double tol = 1e-9) {
  if (rho.labels().size() != 2 || !rho.has(kAI) || !rho.has(kBI))
    throw std::invalid_argument("make_free: expected a state on labels AI, BI");
  HermitianOperator state(rho, 1e-9);
  if (min_eigenvalue(state) < -tol || std::abs(state.real_trace() - 1.0) > tol)
    throw std::invalid_argument("make_free: input is not a quantum state");
  if (dao <= 0) dao = rho.dim_of(kAI);
  if (dbo <= 0) dbo = rho.dim_of(kBI);
  LabelList full = party_labels(rho.dim_of(kAI), dao, rho.dim_of(kBI), dbo);
  return ProcessMatrix(HermitianOperator(embed(state, full)), 1e-7);
}

/// W^{A<B} from the reduced operator W' on AI (x) AO (x) BI satisfying
/// tr_BI W' = W'' (x) 1_AO.
inline ProcessMatrix make_comb_ab(const HermitianOperator& wp, Index dbo, double tol = 1e-8) {
  if (wp.labels().size() != 3 || !wp.has(kAI) || !wp.has(kAO) || !wp.has(kBI))
    throw std::invalid_argument("make_comb_ab: expected labels AI, AO, BI");
  const auto y = HermitianOperator(partial_trace(wp, {kBI}), 1e-9);
  const double marginal = max_abs(CMat(y.matrix() - lv_term(y, {kAO}).matrix()));
  if (marginal > tol)
    throw std::invalid_argument("make_comb_ab: marginal condition violated (residual " +
                                std::to_string(marginal) + ")");
  LabelList full = party_labels(wp.dim_of(kAI), wp.dim_of(kAO), wp.dim_of(kBI), dbo);
  return ProcessMatrix(HermitianOperator(embed(wp, full)), 1e-7);
}

/// Exchange the parties: AI <-> BI and AO <-> BO.
inline ProcessMatrix swap_parties(const ProcessMatrix& w) {
  if (w.dim_of(kAI) != w.dim_of(kBI) || w.dim_of(kAO) != w.dim_of(kBO))
    throw std::invalid_argument("swap_parties: party dimensions differ");
  auto swapped = permute_systems(w.op(), {kBI, kBO, kAI, kAO}).renamed({kAI, kAO, kBI, kBO});
  return ProcessMatrix(HermitianOperator(swapped), 1e-7);
}

inline const std::array<CMat, 4>& pauli_matrices() {
  static const std::array<CMat, 4> paulis = [] {
    std::array<CMat, 4> p;
    p[0] = CMat::Identity(2, 2);
    p[1] = CMat::Zero(2, 2);
    p[1] << 0, 1, 1, 0;
    p[2] = CMat::Zero(2, 2);
    p[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    p[3] = CMat::Zero(2, 2);
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return paulis;
}

/// The causally non-separable example on four qubits:
/// W = (1/4)[1 + (sigma_z sigma_z on AO,BI + sigma_z sigma_x sigma_z on
/// AI,BI,BO) / sqrt(2)].
inline ProcessMatrix make_cns_example() {
  const auto& p = pauli_matrices();
  const CMat one2 = p[0];
  auto kron4 = [](const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
    LabelledOperator la({{kAI, 2}}, a), lb({{kAO, 2}}, b), lc({{kBI, 2}}, c), ld({{kBO, 2}}, d);
    return tensor(tensor(la, lb), tensor(lc, ld)).matrix();
  };
  CMat m = kron4(one2, one2, one2, one2);
  m += (kron4(one2, p[3], p[3], one2) + kron4(p[3], one2, p[1], p[3])) / std::sqrt(2.0);
  m /= 4.0;
  return ProcessMatrix(HermitianOperator(qubit_party_labels(), m));
}

/// All 256 conjugations of a four-qubit process matrix by local Pauli
/// operators.
inline std::vector<ProcessMatrix> pauli_twirl_family(const ProcessMatrix& w) {
  for (const char* n : {kAI, kAO, kBI, kBO})
    if (w.dim_of(n) != 2)
      throw std::invalid_argument("pauli_twirl_family: all systems must be qubits");
  const auto& p = pauli_matrices();
  std::vector<ProcessMatrix> family;
  family.reserve(256);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          LabelledOperator u = tensor(tensor(LabelledOperator({{kAI, 2}}, p[i]),
                                             LabelledOperator({{kAO, 2}}, p[j])),
                                      tensor(LabelledOperator({{kBI, 2}}, p[k]),
                                             LabelledOperator({{kBO, 2}}, p[l])));
          CMat conj = u.matrix() * w.matrix() * u.matrix().adjoint();
          family.emplace_back(HermitianOperator(qubit_party_labels(), conj), 1e-7);
        }
  return family;
}

/// Ad-hoc generator: project a random PSD matrix onto the validity subspace,
/// renormalize, retry until positive.
inline ProcessMatrix random_process_matrix(const LabelList& labels, Rng& rng,
                                           int max_tries = 200) {
  const Index d = total_dim(labels);
  const double target = double(label_dim(labels, kAO) * label_dim(labels, kBO));
  for (int t = 0; t < max_tries; ++t) {
    // Bias toward the maximally mixed point so that positivity survives the
    // projection reasonably often.
    CMat g = random_psd(d, rng);
    g = g / g.trace().real() + 0.5 * CMat::Identity(d, d) / double(d);
    auto proj = project_LV(HermitianOperator(labels, g));
    proj.matrix() *= target / proj.real_trace();
    if (min_eigenvalue(proj) > 1e-10) return ProcessMatrix(proj);
  }
  throw std::runtime_error("random_process_matrix: sampling failed");
}

/// Ad-hoc generator of a W^{A<B} member: a state shared with an environment,
/// wired through a channel AO (x) E -> BI. Exact comb structure by
/// construction.
inline ProcessMatrix random_comb_ab_process(Index dai, Index dao, Index dbi, Index dbo,
                                            Rng& rng, Index env_dim = 2) {
  CMat sigma = random_density(dai * env_dim, rng);
  LabelledOperator state({{kAI, dai}, {"E", env_dim}}, sigma);
  auto wire = random_channel_choi({{kAO, dao}, {"E", env_dim}}, {{kBI, dbi}}, rng);
  // Contract the environment: link transposes the state on E.
  auto wp_raw = link_product(wire.op, state);
  auto wp = HermitianOperator(permute_systems(wp_raw, {kAI, kAO, kBI}), 1e-9);
  return make_comb_ab(wp, dbo);
}

}  // namespace procmat

#endif  // PROCMAT_PROCESS_HPP
