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

#include "procmat/random.hpp"
#include "procmat/spectral.hpp"

using namespace procmat;

namespace {

LabelledOperator make(const std::string& name, Index dim, const CMat& m) {
  return LabelledOperator({{name, dim}}, m);
}

CMat sigma_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMat sigma_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("tensor products") {
  auto a = make("A", 2, CMat::Identity(2, 2));
  auto b = make("B", 2, CMat::Identity(2, 2));
  REQUIRE(max_abs(CMat(tensor(a, b).matrix() - CMat::Identity(4, 4))) == 0.0);

  CMat d0 = CMat::Zero(2, 2), d1 = CMat::Zero(2, 2);
  d0(0, 0) = 1;
  d1(1, 1) = 1;
  CMat expect = CMat::Zero(4, 4);
  expect(1, 1) = 1;  // |0>|1> component
  REQUIRE(max_abs(CMat(tensor(make("A", 2, d0), make("B", 2, d1)).matrix() - expect)) == 0.0);

  // sigma_z (x) sigma_x expanded by hand: blocks +sx, -sx.
  CMat zx = CMat::Zero(4, 4);
  zx(0, 1) = 1;
  zx(1, 0) = 1;
  zx(2, 3) = -1;
  zx(3, 2) = -1;
  REQUIRE(max_abs(CMat(tensor(make("A", 2, sigma_z()), make("B", 2, sigma_x())).matrix() - zx)) ==
          0.0);

  REQUIRE_THROWS_AS(tensor(a, make("A", 2, CMat::Identity(2, 2))), std::invalid_argument);
}

TEST_CASE("partial trace") {
  Rng rng(7);
  auto rho = make("A", 2, random_density(2, rng));
  auto sig = make("B", 3, random_density(3, rng));
  auto prod = tensor(rho, sig);

  auto ta = partial_trace(prod, {"B"});
  REQUIRE(max_abs_diff(ta, rho) < 1e-14);

  // maximally entangled marginal
  CMat phi = CMat::Zero(4, 4);
  for (int i : {0, 1})
    for (int j : {0, 1}) phi(i * 2 + i, j * 2 + j) = 0.5;
  auto ent = LabelledOperator({{"A", 2}, {"B", 2}}, phi);
  REQUIRE(max_abs(CMat(partial_trace(ent, {"B"}).matrix() - 0.5 * CMat::Identity(2, 2))) <
          1e-15);

  auto all = partial_trace(prod, {"A", "B"});
  REQUIRE(all.dim() == 1);
  REQUIRE(std::abs(all.matrix()(0, 0) - prod.trace()) < 1e-14);

  REQUIRE_THROWS_AS(partial_trace(prod, {"C"}), std::invalid_argument);
}

TEST_CASE("partial transpose") {
  Rng rng(11);
  auto rho = make("A", 2, random_hermitian(2, rng));
  auto sig = make("B", 2, random_hermitian(2, rng));
  auto prod = tensor(rho, sig);

  auto pt = partial_transpose(prod, {"B"});
  auto expect = tensor(rho, make("B", 2, CMat(sig.matrix().transpose())));
  REQUIRE(max_abs_diff(pt, expect) < 1e-14);

  auto twice = partial_transpose(partial_transpose(prod, {"A"}), {"A"});
  REQUIRE(max_abs_diff(twice, prod) < 1e-14);

  // |Phi+><Phi+|^{T_B} = SWAP / 2
  CMat phi = CMat::Zero(4, 4);
  for (int i : {0, 1})
    for (int j : {0, 1}) phi(i * 2 + i, j * 2 + j) = 0.5;
  CMat swap = CMat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1;
  swap(1, 2) = swap(2, 1) = 1;
  auto ent = LabelledOperator({{"A", 2}, {"B", 2}}, phi);
  REQUIRE(max_abs(CMat(partial_transpose(ent, {"B"}).matrix() - 0.5 * swap)) < 1e-15);
}

TEST_CASE("permute systems") {
  Rng rng(13);
  auto rho = make("A", 2, random_hermitian(2, rng));
  auto sig = make("B", 3, random_hermitian(3, rng));
  auto prod = tensor(rho, sig);

  auto same = permute_systems(prod, {"A", "B"});
  REQUIRE(max_abs_diff(same, prod) == 0.0);

  auto swapped = permute_systems(prod, {"B", "A"});
  REQUIRE(max_abs_diff(swapped, tensor(sig, rho)) < 1e-14);

  auto back = permute_systems(swapped, {"A", "B"});
  REQUIRE(max_abs_diff(back, prod) == 0.0);

  // spectrum preserved
  auto h = HermitianOperator(tensor(rho, sig));
  auto hp = HermitianOperator(permute_systems(h, {"B", "A"}));
  auto e1 = hermitian_eig(h).values, e2 = hermitian_eig(hp).values;
  REQUIRE((e1 - e2).cwiseAbs().maxCoeff() < 1e-10);

  REQUIRE_THROWS_AS(permute_systems(prod, {"A", "A"}), std::invalid_argument);
}

TEST_CASE("embed") {
  Rng rng(17);
  auto rho = make("AI", 2, random_density(2, rng));
  LabelList full = {{"AI", 2}, {"AO", 3}};
  auto lifted = embed(rho, full);
  REQUIRE(max_abs_diff(lifted, tensor(rho, make("AO", 3, CMat::Identity(3, 3)))) == 0.0);

  // no missing labels: pure permutation
  auto two = tensor(rho, make("AO", 3, random_hermitian(3, rng)));
  auto emb = embed(two, {{"AO", 3}, {"AI", 2}});
  REQUIRE(max_abs_diff(emb, permute_systems(two, {"AO", "AI"})) == 0.0);

  // partial_trace(embed(rho)) = dim * rho
  auto back = partial_trace(lifted, {"AO"});
  REQUIRE(max_abs(CMat(back.matrix() - 3.0 * rho.matrix())) < 1e-14);

  REQUIRE_THROWS_AS(embed(rho, LabelList{{"AI", 3}, {"AO", 2}}), std::invalid_argument);
}

TEST_CASE("embed and partial_trace are adjoint") {
  Rng rng(19);
  LabelList full = {{"A", 2}, {"B", 2}, {"C", 3}};
  for (int t = 0; t < 10; ++t) {
    auto a = LabelledOperator({{"A", 2}, {"C", 3}}, random_hermitian(6, rng));
    auto x = LabelledOperator(full, random_hermitian(12, rng));
    const Complex lhs = (embed(a, full).matrix() * x.matrix()).trace();
    const Complex rhs = (a.matrix() * permute_systems(partial_trace(x, {"B"}), {"A", "C"}).matrix()).trace();
    REQUIRE(std::abs(lhs - rhs) < 1e-11);
  }
}

TEST_CASE("trace norm") {
  CMat d(2, 2);
  d << 1, 0, 0, -1;
  REQUIRE(trace_norm(HermitianOperator({{"A", 2}}, d)) == Catch::Approx(2.0));

  Rng rng(23);
  auto rho = HermitianOperator({{"A", 4}}, random_density(4, rng));
  REQUIRE(trace_norm(rho) == Catch::Approx(1.0).margin(1e-12));

  CMat p0 = CMat::Zero(2, 2);
  p0(0, 0) = 1;
  CMat diff = p0 - 0.5 * CMat::Identity(2, 2);  // eigenvalues +-1/2
  REQUIRE(trace_norm(HermitianOperator({{"A", 2}}, diff)) == Catch::Approx(1.0));
}

TEST_CASE("sqrt_psd") {
  REQUIRE(max_abs(CMat(sqrt_psd(HermitianOperator({{"A", 3}}, CMat::Identity(3, 3))).matrix() -
                       CMat::Identity(3, 3))) < 1e-14);

  CMat p = CMat::Zero(2, 2);
  p(0, 0) = 1;
  REQUIRE(max_abs(CMat(sqrt_psd(HermitianOperator({{"A", 2}}, CMat(4.0 * p))).matrix() - 2.0 * p)) <
          1e-14);

  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 9;
  d(1, 1) = 1;
  CMat expect = CMat::Zero(2, 2);
  expect(0, 0) = 3;
  expect(1, 1) = 1;
  REQUIRE(max_abs(CMat(sqrt_psd(HermitianOperator({{"A", 2}}, d)).matrix() - expect)) < 1e-14);

  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    auto x = HermitianOperator({{"A", 5}}, random_psd(5, rng));
    auto r = sqrt_psd(x);
    REQUIRE(max_abs(CMat(r.matrix() * r.matrix() - x.matrix())) < 1e-9);
  }

  CMat neg = CMat::Identity(2, 2);
  neg(1, 1) = -1;
  REQUIRE_THROWS_AS(sqrt_psd(HermitianOperator({{"A", 2}}, neg)), std::domain_error);
}

TEST_CASE("pseudo inverse sqrt") {
  auto one = HermitianOperator({{"A", 2}}, CMat::Identity(2, 2));
  auto [inv1, proj1] = pseudo_inverse_sqrt(one);
  REQUIRE(max_abs(CMat(inv1.matrix() - CMat::Identity(2, 2))) < 1e-14);
  REQUIRE(max_abs(CMat(proj1.matrix() - CMat::Identity(2, 2))) < 1e-14);

  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 4;
  auto [inv, proj] = pseudo_inverse_sqrt(HermitianOperator({{"A", 2}}, d));
  CMat einv = CMat::Zero(2, 2), eproj = CMat::Zero(2, 2);
  einv(0, 0) = 0.5;
  eproj(0, 0) = 1;
  REQUIRE(max_abs(CMat(inv.matrix() - einv)) < 1e-14);
  REQUIRE(max_abs(CMat(proj.matrix() - eproj)) < 1e-14);

  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + Index(rng() % 15);
    const Index r = 1 + Index(rng() % std::size_t(n));
    CMat g = ginibre(n, r, rng);
    auto x = HermitianOperator({{"A", n}}, CMat(g * g.adjoint()));
    auto [xinv, xproj] = pseudo_inverse_sqrt(x);
    REQUIRE(max_abs(CMat(xinv.matrix() * x.matrix() * xinv.matrix() - xproj.matrix())) < 1e-9);
    REQUIRE(max_abs(CMat(xproj.matrix() * x.matrix() - x.matrix())) < 1e-9);
  }
}

TEST_CASE("vectorize") {
  CVec v = vectorize(LabelledOperator({{"A", 2}}, CMat::Identity(2, 2)));
  REQUIRE(v(0) == Complex(1, 0));
  REQUIRE(v(1) == Complex(0, 0));
  REQUIRE(v(2) == Complex(0, 0));
  REQUIRE(v(3) == Complex(1, 0));

  CMat e01 = CMat::Zero(2, 2);
  e01(0, 1) = 1;
  CVec v2 = vectorize(LabelledOperator({{"A", 2}}, e01));
  REQUIRE(v2(1) == Complex(1, 0));  // (X|1>) (x) |1> with X|1> = |0>
  REQUIRE(v2.cwiseAbs().sum() == Catch::Approx(1.0));

  // <<X|Y>> = tr(X^dag Y)
  Rng rng(37);
  CMat x = ginibre(3, 3, rng), y = ginibre(3, 3, rng);
  const Complex ip = vectorize(LabelledOperator({{"A", 3}}, x))
                         .dot(vectorize(LabelledOperator({{"A", 3}}, y)));
  REQUIRE(std::abs(ip - (x.adjoint() * y).trace()) < 1e-12);

  // |1>><<1| = 2 |Phi+><Phi+| on C^2 (x) C^2
  CVec v1 = vectorize(LabelledOperator({{"A", 2}}, CMat::Identity(2, 2)));
  CMat phi = CMat::Zero(4, 4);
  for (int i : {0, 1})
    for (int j : {0, 1}) phi(i * 2 + i, j * 2 + j) = 0.5;
  REQUIRE(max_abs(CMat(CMat(v1 * v1.adjoint()) - 2.0 * phi)) < 1e-14);
}

TEST_CASE("hermitian eigendecomposition") {
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  auto r = hermitian_eig(HermitianOperator({{"A", 2}}, d));
  REQUIRE(r.values(0) == Catch::Approx(1.0));
  REQUIRE(r.values(1) == Catch::Approx(2.0));

  auto rx = hermitian_eig(HermitianOperator({{"A", 2}}, sigma_x()));
  REQUIRE(rx.values(0) == Catch::Approx(-1.0));
  REQUIRE(rx.values(1) == Catch::Approx(1.0));
  REQUIRE(std::abs(rx.vectors(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-12);

  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    auto h = HermitianOperator({{"A", 6}}, random_hermitian(6, rng));
    auto e = hermitian_eig(h);
    CMat rec = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
    REQUIRE(max_abs(CMat(rec - h.matrix())) < 1e-10 * std::max(1.0, max_abs(h.matrix())));
  }
}

TEST_CASE("partial trace of tensor is trace-weighted factor") {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    auto a = LabelledOperator({{"A", 3}}, ginibre(3, 3, rng));
    auto b = LabelledOperator({{"B", 2}}, ginibre(2, 2, rng));
    auto tr = partial_trace(tensor(a, b), {"B"});
    REQUIRE(max_abs(CMat(tr.matrix() - b.trace() * a.matrix())) < 1e-12);
  }
}

TEST_CASE("hermitian operator construction") {
  CMat notherm(2, 2);
  notherm << 1, 2, 3, 4;
  REQUIRE_THROWS_AS(HermitianOperator({{"A", 2}}, notherm), std::invalid_argument);

  CMat nearly(2, 2);
  nearly << 1.0, Complex(0.5, 1e-14), Complex(0.5, -1e-14 + 1e-15), 2.0;
  REQUIRE_NOTHROW(HermitianOperator({{"A", 2}}, nearly));
}
