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

#include <catch2/catch_amalgamated.hpp>

#include "procmat/process.hpp"

using namespace procmat;

TEST_CASE("projector onto the validity subspace") {
  Rng rng(3);
  const auto labels = qubit_party_labels();

  // fixed points: valid process matrices
  auto w = random_process_matrix(labels, rng);
  REQUIRE(max_abs(CMat(project_LV(w.op()).matrix() - w.matrix())) < 1e-12);

  auto cns = make_cns_example();
  REQUIRE(max_abs(CMat(project_LV(cns.op()).matrix() - cns.matrix())) < 1e-13);

  // idempotence and self-adjointness on random Hermitian inputs
  for (int t = 0; t < 30; ++t) {
    auto x = HermitianOperator(labels, random_hermitian(16, rng));
    auto y = HermitianOperator(labels, random_hermitian(16, rng));
    auto px = project_LV(x);
    REQUIRE(max_abs(CMat(project_LV(px).matrix() - px.matrix())) < 1e-10);
    const Complex lhs = (x.matrix() * project_LV(y).matrix()).trace();
    const Complex rhs = (px.matrix() * y.matrix()).trace();
    REQUIRE(std::abs(lhs - rhs) < 1e-10);
    // trace preserving
    REQUIRE(std::abs(px.trace() - x.trace()) < 1e-11);
  }
}

TEST_CASE("both validity characterizations agree") {
  Rng rng(5);
  const auto labels = qubit_party_labels();
  int valid_count = 0;
  for (int t = 0; t < 200; ++t) {
    HermitianOperator x(labels, CMat::Identity(16, 16));
    switch (t % 4) {
      case 0:  // clearly invalid: random PSD with correct trace
        x = HermitianOperator(labels, [&] {
          CMat g = random_psd(16, rng);
          return CMat(4.0 * g / g.trace().real());
        }());
        break;
      case 1:  // valid sample
        x = random_process_matrix(labels, rng).op();
        break;
      case 2:  // random Hermitian, generically invalid
        x = HermitianOperator(labels, random_hermitian(16, rng));
        break;
      default:  // in the subspace but possibly not PSD
        x = project_LV(HermitianOperator(labels, random_hermitian(16, rng)));
        break;
    }
    const auto r1 = validate_def1(x, 1e-8);
    const auto r2 = validate_def2(x, 1e-8);
    REQUIRE(r1.ok == r2.ok);
    if (r1.ok) ++valid_count;
  }
  REQUIRE(valid_count >= 50);  // the generator quarter must be valid
}

TEST_CASE("free process matrices") {
  Rng rng(7);
  // maximally mixed input gives the maximally mixed process matrix
  CMat mixed = CMat::Identity(4, 4) / 4.0;
  auto w = make_free(LabelledOperator({{kAI, 2}, {kBI, 2}}, mixed));
  REQUIRE(max_abs(CMat(w.matrix() - CMat::Identity(16, 16) / 4.0)) < 1e-14);

  // pure product input
  CMat p00 = CMat::Zero(4, 4);
  p00(0, 0) = 1;
  auto w2 = make_free(LabelledOperator({{kAI, 2}, {kBI, 2}}, p00));
  auto expect = tensor(LabelledOperator({{kAI, 2}}, p00.topLeftCorner(2, 2) * 0 +
                                                        (CMat(2, 2) << 1, 0, 0, 0).finished()),
                       LabelledOperator({{kAO, 2}}, CMat::Identity(2, 2)));
  REQUIRE(w2.matrix()(0, 0).real() == Catch::Approx(1.0));
  REQUIRE(std::abs(w2.matrix().trace().real() - 4.0) < 1e-12);
  REQUIRE(free_residual(w2.op()) < 1e-14);

  for (int t = 0; t < 20; ++t) {
    auto rho = LabelledOperator({{kAI, 2}, {kBI, 2}}, random_density(4, rng));
    auto wf = make_free(rho);
    REQUIRE(validate_def1(wf.op(), 1e-9).ok);
    REQUIRE(free_residual(wf.op()) < 1e-12);
    REQUIRE(comb_ab_residual(wf.op()) < 1e-12);
    REQUIRE(comb_ba_residual(wf.op()) < 1e-12);
  }

  REQUIRE_THROWS_AS(make_free(LabelledOperator({{kAI, 2}, {kBI, 2}}, CMat::Identity(4, 4))),
                    std::invalid_argument);
}

TEST_CASE("comb construction and membership") {
  Rng rng(9);
  // state on AI wired identically to BI
  CMat rho = random_density(2, rng);
  auto wire = identity_choi({{kAO, 2}}, {{kBI, 2}});
  auto wp = HermitianOperator(
      permute_systems(tensor(LabelledOperator({{kAI, 2}}, rho),
                             permute_systems(wire.op, {kAO, kBI})),
                      {kAI, kAO, kBI}));
  auto w = make_comb_ab(wp, 2);
  REQUIRE(validate_def1(w.op(), 1e-9).ok);
  REQUIRE(comb_ab_residual(w.op()) < 1e-12);
  REQUIRE(comb_ba_residual(w.op()) > 0.1);  // the identity wire signals A to B

  // no-signalling special case: product of marginals is also free-like
  CMat sig = random_density(2, rng);
  auto wp2 = HermitianOperator(
      tensor(tensor(LabelledOperator({{kAI, 2}}, rho),
                    LabelledOperator({{kAO, 2}}, CMat::Identity(2, 2))),
             LabelledOperator({{kBI, 2}}, sig)));
  auto w2 = make_comb_ab(wp2, 2);
  REQUIRE(comb_ab_residual(w2.op()) < 1e-12);
  REQUIRE(free_residual(w2.op()) < 1e-12);

  // violating the marginal condition is rejected
  CMat g = random_psd(8, rng);
  g *= 2.0 / g.trace().real();
  REQUIRE_THROWS_AS(make_comb_ab(HermitianOperator({{kAI, 2}, {kAO, 2}, {kBI, 2}}, g), 2),
                    std::invalid_argument);

  // generator produces valid combs
  for (int t = 0; t < 10; ++t) {
    auto wc = random_comb_ab_process(2, 2, 2, 2, rng);
    REQUIRE(validate_def1(wc.op(), 1e-9).ok);
    REQUIRE(comb_ab_residual(wc.op()) < 1e-10);
  }
}

TEST_CASE("swapping parties") {
  Rng rng(11);
  auto rho = LabelledOperator({{kAI, 2}, {kBI, 2}}, random_density(4, rng));
  auto w = make_free(rho);
  auto swapped = swap_parties(w);
  // swap then swap is the identity
  REQUIRE(max_abs(CMat(swap_parties(swapped).matrix() - w.matrix())) < 1e-13);
  // the swapped free matrix equals make_free of the swapped state
  auto rho_sw = permute_systems(rho, {kBI, kAI}).renamed({kAI, kBI});
  REQUIRE(max_abs(CMat(swapped.matrix() - make_free(rho_sw).matrix())) < 1e-13);

  auto comb = random_comb_ab_process(2, 2, 2, 2, rng);
  REQUIRE(comb_ba_residual(swap_parties(comb).op()) < 1e-10);
}

TEST_CASE("the causally non-separable example") {
  auto w = make_cns_example();
  REQUIRE(std::abs(w.matrix().trace().real() - 4.0) < 1e-13);
  REQUIRE(min_eigenvalue(w.op()) > -1e-13);
  REQUIRE(validate_def2(w.op(), 1e-9).ok);
  // eigenvalues are {0, 1/2} with multiplicities 8, 8
  auto eig = hermitian_eig(w.op());
  REQUIRE(eig.values.minCoeff() > -1e-13);
  REQUIRE(std::abs(eig.values.maxCoeff() - 0.5) < 1e-13);
  // the example is not a comb in either direction
  REQUIRE(comb_ab_residual(w.op()) > 0.05);
  REQUIRE(comb_ba_residual(w.op()) > 0.05);
}

TEST_CASE("pauli twirl family") {
  auto w = make_cns_example();
  auto family = pauli_twirl_family(w);
  REQUIRE(family.size() == 256);
  REQUIRE(max_abs(CMat(family[0].matrix() - w.matrix())) < 1e-14);

  CMat avg = CMat::Zero(16, 16);
  for (const auto& member : family) avg += member.matrix();
  avg /= 256.0;
  REQUIRE(max_abs(CMat(avg - CMat::Identity(16, 16) / 4.0)) < 1e-12);
}
