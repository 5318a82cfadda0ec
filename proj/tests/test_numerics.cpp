// Copyright 2026 the cqi-lab authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cqi/channel.hpp"
#include "cqi/distances.hpp"
#include "cqi/matrix.hpp"
#include "cqi/rational.hpp"
#include "cqi/rng.hpp"
#include "cqi/state.hpp"

using namespace cqi;

namespace {

DensityOperator ket_state(int d, int i) {
  return DensityOperator::pure(basis_ket(d, i), {d});
}

DensityOperator bell_pair() {
  Vector psi = Vector::Zero(4);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(3) = 1.0 / std::sqrt(2.0);
  return DensityOperator::pure(psi, {2, 2});
}

}  // namespace

TEST_CASE("fidelity basics") {
  Rng rng(1);
  const DensityOperator rho = random_state(3, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(ket_state(2, 0), ket_state(2, 1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity(ket_state(2, 0), maximally_mixed(2)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("trace distance basics") {
  Rng rng(2);
  const DensityOperator rho = random_state(2, rng);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(ket_state(2, 0), ket_state(2, 1)) == doctest::Approx(1.0));
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(trace_distance(ket_state(2, 0), DensityOperator::pure(plus, {2})) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("partial trace") {
  Rng rng(3);
  const DensityOperator rho = random_state(2, rng);
  const DensityOperator sigma = random_state(3, rng);
  const DensityOperator both = tensor(rho, sigma);
  CHECK(max_abs(both.keep({0}).mat() - rho.mat()) < 1e-12);
  CHECK(max_abs(both.keep({1}).mat() - sigma.mat()) < 1e-12);
  CHECK(max_abs(both.keep({0, 1}).mat() - both.mat()) < 1e-12);
  CHECK(max_abs(bell_pair().keep({0}).mat() - maximally_mixed(2).mat()) < 1e-12);
}

TEST_CASE("channel application") {
  Rng rng(4);
  const DensityOperator rho = random_state(2, rng);
  CHECK(max_abs(identity_channel({2}).apply(rho).mat() - rho.mat()) < 1e-12);
  CHECK(max_abs(depolarizing_channel(2, 1.0).apply(rho).mat() -
                maximally_mixed(2).mat()) < 1e-12);
  // Completely dephasing channel kills the coherences of |+><+|.
  std::vector<Matrix> kraus = {basis_ket(2, 0) * basis_ket(2, 0).adjoint(),
                               basis_ket(2, 1) * basis_ket(2, 1).adjoint()};
  Channel dephase(kraus, {2}, {2});
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(max_abs(dephase.apply(DensityOperator::pure(plus, {2})).mat() -
                maximally_mixed(2).mat()) < 1e-12);
}

TEST_CASE("choi conventions and round trip") {
  // Identity channel: unnormalized maximally entangled projector.
  Matrix expected = Matrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expected(i * 2 + i, j * 2 + j) = 1.0;
  CHECK(max_abs(identity_channel({2}).choi() - expected) < 1e-12);

  // Trace-and-replace-with-|0><0|: Choi = I (x) |0><0|.
  std::vector<Matrix> kraus = {basis_ket(2, 0) * basis_ket(2, 0).adjoint(),
                               basis_ket(2, 0) * basis_ket(2, 1).adjoint()};
  Channel replace(kraus, {2}, {2});
  CHECK(max_abs(replace.choi() -
                kron(identity(2), basis_ket(2, 0) * basis_ket(2, 0).adjoint())) < 1e-12);

  // Round trip on a random 2-Kraus qubit channel: same action on a basis.
  Rng rng(5);
  const Channel ch = random_channel(2, 2, 2, rng);
  const Channel back = channel_from_choi(ch.choi(), {2}, {2});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Matrix e = Matrix::Zero(2, 2);
      e(i, j) = 1.0;
      CHECK(max_abs(ch.apply_mat(e) - back.apply_mat(e)) < 1e-9);
    }
}

TEST_CASE("channel validation rejects non-trace-preserving Kraus sets") {
  std::vector<Matrix> kraus = {0.5 * identity(2)};
  CHECK_THROWS_AS(Channel(kraus, {2}, {2}), NumericalError);
}

TEST_CASE("haar unitary and pure-state moments") {
  Rng rng(6);
  for (int d : {2, 3, 5}) {
    const Matrix u = haar_unitary(d, rng);
    CHECK(max_abs(u * u.adjoint() - identity(d)) < 1e-12);
  }
  const int samples = 100000;
  Matrix first = Matrix::Zero(2, 2);
  Matrix second = Matrix::Zero(4, 4);
  for (int s = 0; s < samples; ++s) {
    const Vector psi = haar_pure_ket(2, rng);
    const Matrix p = psi * psi.adjoint();
    first += p;
    second += kron(p, p);
  }
  first /= samples;
  second /= samples;
  CHECK(max_abs(first - 0.5 * identity(2)) < 2e-2);
  // Second moment: 2 Pi_sym / (d (d+1)) at d = 2.
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  const Matrix sym = 0.5 * (identity(4) + swap);
  CHECK(max_abs(second - 2.0 * sym / 6.0) < 2e-2);
}

TEST_CASE("state_with_spectrum") {
  CHECK(max_abs(state_with_spectrum({1.0, 0.0}).mat() - ket_state(2, 0).mat()) < 1e-12);
  const DensityOperator diag = state_with_spectrum({0.8, 0.2});
  CHECK(diag.mat()(0, 0).real() == doctest::Approx(0.8));
  CHECK(diag.mat()(1, 1).real() == doctest::Approx(0.2));
  Rng rng(7);
  const Matrix u = haar_unitary(3, rng);
  const DensityOperator rho = state_with_spectrum({0.5, 0.3, 0.2}, u);
  const RealVector evs = herm_eigs(rho.mat());
  CHECK(evs(2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(evs(1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(evs(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(state_with_spectrum({0.2, 0.8}), NumericalError);
  CHECK_THROWS_AS(state_with_spectrum({0.7, 0.2}), NumericalError);
}

TEST_CASE("herm_exp") {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK(max_abs(herm_exp(z, 0.0) - identity(2)) < 1e-14);
  const Matrix at_pi = herm_exp(z, M_PI);
  CHECK(std::abs(at_pi(0, 0) - Cx(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(at_pi(1, 1) - Cx(-1.0, 0.0)) < 1e-12);

  // Rank-one projector: e^{-iT P} = I + (e^{-iT} - 1) P.
  Rng rng(8);
  const Vector psi = haar_pure_ket(4, rng);
  const Matrix proj = psi * psi.adjoint();
  const double t = 1.3;
  const Matrix closed = identity(4) + (std::exp(Cx(0, -t)) - 1.0) * proj;
  CHECK(max_abs(herm_exp(proj, t) - closed) < 1e-10);
  const Matrix u = herm_exp(proj, t);
  CHECK(max_abs(u * u.adjoint() - identity(4)) < 1e-10);
}

TEST_CASE("fidelity monotone under channels") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    Rng stream = rng.split(trial);
    const DensityOperator rho = random_state(2, stream);
    const DensityOperator sigma = random_state(2, stream);
    const Channel ch = random_channel(2, 2, 2, stream);
    CHECK(fidelity(ch.apply(rho), ch.apply(sigma)) >= fidelity(rho, sigma) - 1e-9);
  }
}

TEST_CASE("Fuchs-van de Graaf") {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    Rng stream = rng.split(trial);
    const DensityOperator rho = random_state(3, stream);
    const DensityOperator sigma = random_state(3, stream);
    const double f = fidelity(rho, sigma);
    const double d = trace_distance(rho, sigma);
    CHECK(1.0 - std::sqrt(f) <= d + 1e-9);
    CHECK(d <= std::sqrt(1.0 - f) + 1e-9);
  }
}

TEST_CASE("density operator invariants enforced") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityOperator(bad, {2}), NumericalError);
  Matrix non_herm = Matrix::Zero(2, 2);
  non_herm(0, 0) = 1.0;
  non_herm(0, 1) = 0.5;
  CHECK_THROWS_AS(DensityOperator(non_herm, {2}), NumericalError);
  Matrix off_trace = 0.7 * identity(2);
  CHECK_THROWS_AS(DensityOperator(off_trace, {2}), NumericalError);
}

TEST_CASE("povm validation") {
  Povm good;
  good.effects = {0.5 * identity(2), 0.5 * identity(2)};
  CHECK_NOTHROW(good.validate());
  Povm bad;
  bad.effects = {0.5 * identity(2), 0.4 * identity(2)};
  CHECK_THROWS_AS(bad.validate(), NumericalError);
}

TEST_CASE("rng reproducibility and stream independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  // Distinct streams from the same master seed differ.
  Rng base(42);
  Rng s0 = base.split(0), s1 = base.split(1);
  bool all_equal = true;
  for (int i = 0; i < 16; ++i) all_equal = all_equal && s0.uniform() == s1.uniform();
  CHECK_FALSE(all_equal);
  // Splitting is a pure function of (seed, stream index).
  Rng again = Rng(42).split(0);
  Rng s0b = Rng(42).split(0);
  CHECK(again.uniform() == s0b.uniform());
}

TEST_CASE("rational arithmetic") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(5, 6) * Rat(3, 5) == Rat(1, 2));
  CHECK((Rat(1) - Rat(1, 3)).to_double() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("index helpers and factor ops") {
  Rng rng(11);
  const std::vector<int> dims = {2, 3, 2};
  const Matrix u = haar_unitary(3, rng);
  Vector v = haar_pure_ket(12, rng);
  const Matrix full = kron(kron(identity(2), u), identity(2));
  CHECK(max_abs(apply_factor_op(u, v, dims, 1) - full * v) < 1e-12);

  // permute_subsystems round trip.
  const Matrix m = v * v.adjoint();
  const Matrix perm = permute_subsystems(m, dims, {2, 0, 1});
  const Matrix back = permute_subsystems(perm, {2, 2, 3}, {1, 2, 0});
  CHECK(max_abs(back - m) < 1e-12);

  // partial transpose is an involution.
  const Matrix pt = partial_transpose(m, dims, {1});
  CHECK(max_abs(partial_transpose(pt, dims, {1}) - m) < 1e-12);
}
