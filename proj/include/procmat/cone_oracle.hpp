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

#ifndef PROCMAT_CONE_ORACLE_HPP
#define PROCMAT_CONE_ORACLE_HPP

#include "procmat/process.hpp"

namespace procmat {

/// Sample a non-signalling Choi matrix: a product of Haar-random local
/// channels, optionally stretched into an affine two-term combination with a
/// coefficient in [-1, 2], rejected when it leaves the PSD cone.
inline HermitianOperator sample_nonsignalling(const LabelList& full, Rng& rng,
                                              bool affine = false, int max_tries = 64) {
  const LabelList ain = {{kAI, label_dim(full, kAI)}};
  const LabelList aout = {{kAO, label_dim(full, kAO)}};
  const LabelList bin = {{kBI, label_dim(full, kBI)}};
  const LabelList bout = {{kBO, label_dim(full, kBO)}};
  auto draw_product = [&] {
    return ns_product(random_channel_choi(ain, aout, rng, 2),
                      random_channel_choi(bin, bout, rng, 2));
  };
  if (!affine) return draw_product();
  std::uniform_real_distribution<double> coeff(-1.0, 2.0);
  for (int t = 0; t < max_tries; ++t) {
    const auto n1 = draw_product();
    const auto n2 = draw_product();
    const double lambda = coeff(rng);
    HermitianOperator mix(full, CMat(lambda * n1.matrix() + (1.0 - lambda) * n2.matrix()));
    if (min_eigenvalue(mix) > 1e-12) return mix;
  }
  return draw_product();
}

struct DualBaseSample {
  double forward_residual = 0;    // |tr(X W) - 1|
  double marginal_a = 0;          // tr_AO X = 1_AI (x) P structure
  double marginal_b = 0;
  double marginal_psd = 0;        // positivity of the recovered marginals
  bool affine = false;
};

struct DualBaseReport {
  std::vector<DualBaseSample> samples;
  double max_forward_residual = 0;
  double max_marginal_residual = 0;
  double convexity_residual = 0;
  // falsification probe: a deliberately signalling PSD operator must pair
  // with some process matrix away from one
  double falsification_deviation = 0;
  bool ok = false;
};

/// Statistical check of the duality between the process-matrix base and the
/// non-signalling set: sampled non-signalling operators pair to one with
/// sampled process matrices, and their marginals carry the structure the
/// converse direction predicts.
inline DualBaseReport verify_dual_base(int n_samples, Rng& rng,
                                       const LabelList& full = qubit_party_labels(),
                                       double tol = 1e-9) {
  DualBaseReport rep;
  const double dai = double(label_dim(full, kAI));
  const double dbi = double(label_dim(full, kBI));

  HermitianOperator prev = HermitianOperator::identity(full);
  bool have_prev = false;
  for (int s = 0; s < n_samples; ++s) {
    DualBaseSample smp;
    smp.affine = (s % 3 == 2);
    const auto x = sample_nonsignalling(full, rng, smp.affine);
    const auto w = random_process_matrix(full, rng);
    smp.forward_residual = std::abs((x.matrix() * w.matrix()).trace().real() - 1.0);

    // converse-direction structure: tr_AO X = 1_AI (x) P with P >= 0
    auto ta = partial_trace(x, {kAO});
    auto pa = partial_trace(x, {kAO, kAI});
    smp.marginal_a = max_abs(CMat(ta.matrix() - embed(pa, ta.labels()).matrix() / dai));
    auto tb = partial_trace(x, {kBO});
    auto pb = partial_trace(x, {kBO, kBI});
    smp.marginal_b = max_abs(CMat(tb.matrix() - embed(pb, tb.labels()).matrix() / dbi));
    smp.marginal_psd = std::max(0.0, -std::min(min_eigenvalue(HermitianOperator(pa, 1e-9)),
                                               min_eigenvalue(HermitianOperator(pb, 1e-9))));

    rep.max_forward_residual = std::max(rep.max_forward_residual, smp.forward_residual);
    rep.max_marginal_residual =
        std::max({rep.max_marginal_residual, smp.marginal_a, smp.marginal_b, smp.marginal_psd});
    rep.samples.push_back(smp);

    // convexity probe of the sampled set: midpoints stay non-signalling
    if (have_prev) {
      HermitianOperator mid(full, CMat(0.5 * (x.matrix() + prev.matrix())));
      rep.convexity_residual =
          std::max(rep.convexity_residual, nonsignalling_report(mid, tol).max_residual());
    }
    prev = x;
    have_prev = true;
  }

  // falsification probe: a PSD operator outside NS (a one-way signalling
  // wire) should fail the pairing for some process matrix
  if (n_samples > 0) {
    auto wire = choi_of_channel({CMat::Identity(label_dim(full, kBI), label_dim(full, kAO))},
                                {{kAO, label_dim(full, kAO)}}, {{kBI, label_dim(full, kBI)}});
    auto bad_raw = tensor(tensor(LabelledOperator::identity({{kAI, label_dim(full, kAI)}}),
                                 permute_systems(wire.op, {kAO, kBI})),
                          LabelledOperator::identity({{kBO, label_dim(full, kBO)}}));
    HermitianOperator bad(permute_systems(bad_raw, {kAI, kAO, kBI, kBO}));
    for (int t = 0; t < std::max(8, n_samples / 4); ++t) {
      const auto w = random_process_matrix(full, rng);
      rep.falsification_deviation =
          std::max(rep.falsification_deviation,
                   std::abs((bad.matrix() * w.matrix()).trace().real() - 1.0));
    }
  }

  rep.ok = rep.max_forward_residual <= tol && rep.max_marginal_residual <= 1e-8 &&
           rep.convexity_residual <= 1e-10 && (n_samples == 0 || rep.falsification_deviation > 1e-3);
  return rep;
}

/// Lower bound on the base norm from sampled non-signalling operators:
/// max over samples of || sqrt(N) x sqrt(N) ||_1. Extra candidates (for
/// instance an analytically optimal product strategy) can be supplied.
inline double base_norm_sampled_lower_bound(const HermitianOperator& x, int n_samples, Rng& rng,
                                            const std::vector<HermitianOperator>& extra = {}) {
  const auto canon = HermitianOperator(permute_systems(x, {kAI, kAO, kBI, kBO}));
  const LabelList full = canon.labels();
  double best = 0;
  auto consider = [&](const HermitianOperator& n) {
    const auto sq = sqrt_psd(psd_clamp(HermitianOperator(
        permute_systems(n, {kAI, kAO, kBI, kBO}))));
    best = std::max(best, trace_norm(CMat(sq.matrix() * canon.matrix() * sq.matrix())));
  };
  for (int s = 0; s < n_samples; ++s) consider(sample_nonsignalling(full, rng, s % 3 == 2));
  for (const auto& n : extra) consider(n);
  return best;
}

}  // namespace procmat

#endif  // PROCMAT_CONE_ORACLE_HPP
