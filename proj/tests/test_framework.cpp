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
#include <vector>

#include "cqi/framework.hpp"
#include "cqi/schur.hpp"

using namespace cqi;

namespace {

// One copy of a Haar-random pure qubit; the target is the state itself.
CqiTask identity_task(Loss loss = Loss::Infidelity) {
  CqiTask task;
  task.n_copies = 1;
  task.m_outputs = 1;
  task.in_site_dims = {2};
  task.out_site_dims = {2};
  task.sample_input = [](Rng& rng) { return haar_pure_state(2, rng); };
  task.target_all = [](const DensityOperator& s) { return s; };
  task.target_site = [](const DensityOperator& s) { return s; };
  task.loss = loss;
  return task;
}

Protocol channel_protocol(const Channel& ch) {
  return [ch](const DensityOperator& rho) { return ch.apply(rho); };
}

}  // namespace

TEST_CASE("risk estimation basics") {
  const CqiTask task = identity_task();
  const Protocol ident = channel_protocol(identity_channel({2}));
  const RiskReport perfect = average_risk(task, ident, 200, 7);
  CHECK(perfect.value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(perfect.mode == "average");
  CHECK(perfect.site == "all-site");
  CHECK(perfect.samples == 200);
  CHECK_FALSE(perfect.lower_bound_only);

  // Fully depolarizing protocol: E[1 - <psi|I/2|psi>] = 1/2 up to the ~1e-8
  // accuracy of the matrix-square-root fidelity at a degenerate spectrum.
  const Protocol depol = channel_protocol(depolarizing_channel(2, 1.0));
  const RiskReport half = average_risk(task, depol, 500, 7);
  CHECK(half.value == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(half.stderr_ < 1e-7);  // the loss is constant over inputs

  // Same seed reproduces bit-identical estimates; one-site agrees for m = 1.
  CHECK(average_risk(task, depol, 100, 3).value == average_risk(task, depol, 100, 3).value);
  CHECK(one_site_risk(task, depol, 100, 3).value ==
        doctest::Approx(average_risk(task, depol, 100, 3).value).epsilon(1e-12));
}

TEST_CASE("worst case risk over candidates") {
  const CqiTask task = identity_task();
  Rng rng(21);
  std::vector<DensityOperator> candidates;
  for (int i = 0; i < 10; ++i) candidates.push_back(haar_pure_state(2, rng));
  // Dephasing in the computational basis: loss depends on the candidate.
  std::vector<Matrix> kraus = {basis_ket(2, 0) * basis_ket(2, 0).adjoint(),
                               basis_ket(2, 1) * basis_ket(2, 1).adjoint()};
  const Protocol dephase = channel_protocol(Channel(kraus, {2}, {2}));
  const RiskReport worst = worst_case_risk(task, dephase, candidates);
  CHECK(worst.lower_bound_only);
  CHECK(worst.mode == "worst-case");
  double max_loss = 0;
  for (const auto& c : candidates) {
    const double l = 1.0 - fidelity(c, Channel(kraus, {2}, {2}).apply(c));
    max_loss = std::max(max_loss, l);
  }
  CHECK(worst.value == doctest::Approx(max_loss).epsilon(1e-10));
  CHECK(worst_case_one_site_risk(task, dephase, candidates).value ==
        doctest::Approx(max_loss).epsilon(1e-10));
  CHECK_THROWS_AS(worst_case_risk(task, dephase, {}), NumericalError);
}

TEST_CASE("risk is convex in the protocol") {
  Rng rng(22);
  for (Loss loss : {Loss::Infidelity, Loss::TraceDistance}) {
    const CqiTask task = identity_task(loss);
    const Channel s = random_channel(2, 2, 2, rng);
    const Channel t = random_channel(2, 2, 2, rng);
    const double rs = average_risk(task, channel_protocol(s), 100, 5).value;
    const double rt = average_risk(task, channel_protocol(t), 100, 5).value;
    for (double lam : {0.25, 0.5, 0.75}) {
      const Channel m = mix({s, t}, {lam, 1.0 - lam});
      const double rm = average_risk(task, channel_protocol(m), 100, 5).value;
      CHECK(rm <= lam * rs + (1.0 - lam) * rt + 1e-9);
    }
  }
}

TEST_CASE("risk is continuous in the protocol") {
  // Pure targets and common random inputs: the estimate difference is bounded
  // by the trace norm of the Choi difference.
  const CqiTask task = identity_task();
  Rng rng(23);
  for (int pair = 0; pair < 50; ++pair) {
    Rng stream = rng.split(pair);
    const Channel s = random_channel(2, 2, 2, stream);
    const Channel t = random_channel(2, 2, 3, stream);
    const double rs = average_risk(task, channel_protocol(s), 20, 11).value;
    const double rt = average_risk(task, channel_protocol(t), 20, 11).value;
    const double choi_gap = herm_trace_norm(s.choi() - t.choi());
    CHECK(std::abs(rs - rt) <= choi_gap + 1e-9);
  }
}

TEST_CASE("exchange twirl") {
  Rng rng(24);
  const Channel t = random_channel(4, 4, 3, rng);
  const Channel t2({t.kraus()}, {2, 2}, {2, 2});

  for (TwirlSide side : {TwirlSide::In, TwirlSide::Out, TwirlSide::Both}) {
    const Channel once = exchange_twirl(t2, side);
    const Channel twice = exchange_twirl(once, side);
    CHECK(max_abs(once.choi() - twice.choi()) < 1e-9);
  }

  // Behavioral check: input twirl averages over input orderings.
  const Channel in_twirled = exchange_twirl(t2, TwirlSide::In);
  const DensityOperator rho = random_state(2, rng);
  const DensityOperator sigma = random_state(2, rng);
  const Matrix lhs = in_twirled.apply(tensor(rho, sigma)).mat();
  const Matrix rhs = 0.5 * (t2.apply(tensor(rho, sigma)).mat() +
                            t2.apply(tensor(sigma, rho)).mat());
  CHECK(max_abs(lhs - rhs) < 1e-9);

  // Output twirl commutes with the swap on outputs.
  const Channel out_twirled = exchange_twirl(t2, TwirlSide::Out);
  const Matrix swap = schur::permutation_operator({1, 0}, 2);
  const Matrix out = out_twirled.apply(tensor(rho, sigma)).mat();
  CHECK(max_abs(swap * out * swap.adjoint() - out) < 1e-9);
}

TEST_CASE("unitary twirl exact") {
  Rng rng(25);
  const Channel t = random_channel(4, 2, 2, rng);
  Channel raw(t.kraus(), {2, 2}, {2});
  const Channel tw = unitary_twirl_exact(raw, 2, 2, 1);

  // Idempotence.
  CHECK(max_abs(unitary_twirl_exact(tw, 2, 2, 1).choi() - tw.choi()) < 1e-9);

  // Covariance: conjugating the input by U^{(x)2} conjugates the output by U.
  const Matrix u = haar_unitary(2, rng);
  const DensityOperator rho = random_state(2, rng);
  const Matrix rotated = u * rho.mat() * u.adjoint();
  const DensityOperator rho_u(rotated, {2});
  const Matrix lhs = tw.apply(tensor_power(rho_u, 2)).mat();
  const Matrix rhs = u * tw.apply(tensor_power(rho, 2)).mat() * u.adjoint();
  CHECK(max_abs(lhs - rhs) < 1e-9);

  // Monte Carlo cross-check of the exact projection.
  Rng mc_rng(26);
  const Channel mc = unitary_twirl_mc(raw, 2, 2, 1, 20000, mc_rng);
  CHECK(max_abs(mc.choi() - tw.choi()) < 5e-2);
}

TEST_CASE("single orbit equivalence for covariant protocols") {
  // A twirled protocol has the same loss on every pure input.
  Rng rng(27);
  const Channel raw = random_channel(2, 2, 2, rng);
  const Channel tw = unitary_twirl_exact(raw, 2, 1, 1);
  std::vector<double> losses;
  for (int i = 0; i < 20; ++i) {
    const DensityOperator psi = haar_pure_state(2, rng);
    losses.push_back(1.0 - fidelity(psi, tw.apply(psi)));
  }
  // Constant up to the fidelity primitive's square-root accuracy.
  for (double l : losses) CHECK(std::abs(l - losses[0]) < 1e-7);
}

TEST_CASE("entanglement breaking channels") {
  Rng rng(28);
  // Trivial POVM {I} with one re-preparation: a constant channel.
  const DensityOperator prep = random_state(2, rng);
  Povm trivial;
  trivial.effects = {identity(2)};
  const Channel constant = eb_channel(trivial, {prep});
  for (int i = 0; i < 5; ++i)
    CHECK(max_abs(constant.apply(random_state(2, rng)).mat() - prep.mat()) < 1e-10);

  // Basis measurement with basis re-preparation: the dephasing channel.
  Povm basis;
  basis.effects = {basis_ket(2, 0) * basis_ket(2, 0).adjoint(),
                   basis_ket(2, 1) * basis_ket(2, 1).adjoint()};
  const Channel dephase = eb_channel(
      basis, {DensityOperator::pure(basis_ket(2, 0), {2}),
              DensityOperator::pure(basis_ket(2, 1), {2})});
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(max_abs(dephase.apply(DensityOperator::pure(plus, {2})).mat() -
                maximally_mixed(2).mat()) < 1e-10);
  const DensityOperator zero = DensityOperator::pure(basis_ket(2, 0), {2});
  CHECK(max_abs(dephase.apply(zero).mat() - zero.mat()) < 1e-10);

  // Measure-and-prepare Chois are PPT; the identity Choi is not.
  CHECK(is_ppt(dephase.choi(), 2, 2));
  CHECK(is_ppt(constant.choi(), 2, 2));
  CHECK_FALSE(is_ppt(identity_channel({2}).choi(), 2, 2));
}

TEST_CASE("covariant measure and prepare channel") {
  for (int d = 2; d <= 3; ++d)
    for (int m = 1; m <= 3; ++m) {
      const Channel ch = definetti_mp_channel(d, m);
      CHECK(ch.din() == schur::multiset_dim(d, m));
      CHECK(ch.dout() == d);
      CHECK_NOTHROW(validate_choi(ch.choi(), ch.din(), ch.dout()));
      CHECK(max_abs(ch.choi() - definetti_mp_choi(d, m)) < 1e-9);
      // Its own gap vanishes; every gap is a distance between two states.
      CHECK(definetti_gap(definetti_mp_choi(d, m), d, m) < 1e-10);
      const double gap = definetti_gap(symmetric_identity_site_choi(d, m), d, m);
      CHECK(gap >= 0.0);
      CHECK(gap <= 2.0 + 1e-12);
    }

  // Monte Carlo agreement with the exact Haar integral.
  Rng rng(29);
  const Matrix mc = definetti_mp_choi_mc(2, 2, 50000, rng);
  CHECK(max_abs(mc - definetti_mp_choi(2, 2)) < 5e-2);
}

TEST_CASE("de Finetti gap closed form for qubits") {
  // For the identity on the m-copy symmetric space the state gap is 2/(m+1).
  for (int m = 2; m <= 6; ++m) {
    const double gap = definetti_gap(symmetric_identity_site_choi(2, m), 2, m);
    CHECK(gap == doctest::Approx(2.0 / (m + 1)).epsilon(1e-9));
  }
}

TEST_CASE("symmetric identity site choi is a valid channel") {
  for (int d = 2; d <= 3; ++d)
    for (int m = 1; m <= 3; ++m) {
      const Matrix choi = symmetric_identity_site_choi(d, m);
      CHECK_NOTHROW(validate_choi(choi, schur::multiset_dim(d, m), d));
    }
}
