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
#include <numeric>
#include <vector>

#include "cqi/cloning.hpp"
#include "cqi/schur.hpp"
#include "cqi/stats.hpp"

using namespace cqi;
using namespace cqi::rp;

namespace {

// Global and one-site fidelity of the symmetric cloner on a Haar pure input.
struct BruteResult {
  double f_all = 0;
  double f_one = 0;
};

BruteResult brute_cloner_fidelities(int n, int m, int d, Rng& rng) {
  const Vector psi = haar_pure_ket(d, rng);
  const Matrix iso = schur::sym_isometry(d, n);
  const Vector in_sym = iso.adjoint() * kron_pow_vec(psi, n);
  const Channel cloner = werner_cloner(n, m, d);
  const Matrix rho_out = cloner.apply_mat(in_sym * in_sym.adjoint());
  const DensityOperator out(rho_out, std::vector<int>(m, d));
  BruteResult res;
  res.f_all = fidelity_pure(kron_pow_vec(psi, m), out.mat());
  res.f_one = fidelity_pure(psi, out.keep({0}).mat());
  return res;
}

}  // namespace

TEST_CASE("closed form fidelities for pure state cloning") {
  CHECK(f_all_bound({1, 2, 2, 1}) == Rat(2, 3));
  CHECK(f_one_bound({1, 2, 2, 1}) == Rat(5, 6));
  CHECK(f_all_bound({2, 3, 2, 1}) == Rat(3, 4));
  CHECK(f_one_bound({2, 3, 2, 1}) == Rat(11, 12));
  CHECK(f_all_bound({1, 2, 3, 1}) == Rat(1, 2));
  CHECK(f_one_bound({1, 2, 3, 1}) == Rat(3, 4));
  // No cloning needed: n >= m is lossless.
  CHECK(f_all_bound({3, 3, 2, 1}) == Rat(1));
  CHECK(f_one_bound({4, 2, 2, 2}) == Rat(1));
  // Qubit cross-check in an independently grouped form.
  for (int n = 1; n <= 4; ++n)
    for (int m = n + 1; m <= 6; ++m)
      CHECK(f_one_bound({n, m, 2, 1}) == Rat(m * n + m + n, m * (n + 2)));
}

TEST_CASE("brute force cloner agrees with the closed forms") {
  Rng rng(31);
  struct Case {
    int n, m, d;
  };
  const std::vector<Case> cases = {{1, 2, 2}, {1, 3, 2}, {2, 3, 2}, {2, 4, 2},
                                   {3, 5, 2}, {1, 2, 3}, {2, 3, 3}, {1, 3, 3}};
  for (const auto& c : cases) {
    const BruteResult brute = brute_cloner_fidelities(c.n, c.m, c.d, rng);
    const RpSpec spec{c.n, c.m, c.d, 1};
    CHECK(std::abs(brute.f_all - f_all_bound(spec).to_double()) < 1e-9);
    CHECK(std::abs(brute.f_one - f_one_bound(spec).to_double()) < 1e-9);
  }
}

TEST_CASE("cloner output is site symmetric") {
  Rng rng(32);
  const int n = 1, m = 3, d = 2;
  const Vector psi = haar_pure_ket(d, rng);
  const Matrix iso = schur::sym_isometry(d, n);
  const Vector in_sym = iso.adjoint() * kron_pow_vec(psi, n);
  const Matrix rho_out = werner_cloner(n, m, d).apply_mat(in_sym * in_sym.adjoint());
  const DensityOperator out(rho_out, std::vector<int>(m, d));
  const Matrix first = out.keep({0}).mat();
  for (int site = 1; site < m; ++site)
    CHECK(max_abs(out.keep({site}).mat() - first) < 1e-9);
  // Invariance under exchanging two output sites.
  const Matrix swap01 = kron(schur::permutation_operator({1, 0}, d), identity(d));
  CHECK(max_abs(swap01 * out.mat() * swap01.adjoint() - out.mat()) < 1e-9);
}

TEST_CASE("global fidelity never exceeds one site fidelity") {
  // Tracing down to one site can only raise the fidelity to the matching
  // smaller target, so the closed forms must be ordered.
  for (int d : {2, 3})
    for (int r = 1; r <= 2; ++r)
      for (int n = 1; n <= 6; ++n)
        for (int m = n + 1; m <= n + 3; ++m) {
          const RpSpec spec{n, m, d, r};
          CHECK(f_all_bound(spec).to_double() <= f_one_bound(spec).to_double() + 1e-15);
        }
}

TEST_CASE("purification") {
  const Vector trivial = purification({1.0, 0.0}, 2, 2);
  CHECK(max_abs((trivial - kron_vec(basis_ket(2, 0), basis_ket(2, 0))).eval()) < 1e-14);

  const Vector psi = purification({0.7, 0.3}, 2, 2);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  const Matrix full = psi * psi.adjoint();
  const Matrix sys = partial_trace(full, {2, 2}, {0});
  CHECK(std::abs(sys(0, 0).real() - 0.7) < 1e-12);
  CHECK(std::abs(sys(1, 1).real() - 0.3) < 1e-12);
  CHECK(std::abs(sys(0, 1)) < 1e-12);

  CHECK_THROWS_AS(purification({0.3, 0.7}, 2, 2), NumericalError);   // not sorted
  CHECK_THROWS_AS(purification({0.7, 0.3}, 2, 1), NumericalError);   // rank > r
  CHECK_THROWS_AS(purification({0.6, 0.3}, 2, 2), NumericalError);   // not normalized
}

TEST_CASE("spec validation") {
  const RpSpec bad_n{0, 1, 2, 1};
  const RpSpec bad_r{1, 1, 2, 3};
  const RpSpec good{1, 2, 3, 2};
  CHECK_THROWS_AS(bad_n.validate(), NumericalError);
  CHECK_THROWS_AS(bad_r.validate(), NumericalError);
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("environment twirl exact versus Monte Carlo") {
  const Vector psi0 = purification({0.7, 0.3}, 2, 2);
  const DensityOperator exact = rp_twirl_exact(psi0, 2, 2, 2);
  const McTwirlResult mc = rp_twirl_mc(psi0, 2, 2, 2, 30000, 17);
  CHECK(mc.samples == 30000);
  CHECK(max_abs(exact.mat() - mc.state.mat()) < 1e-2);
  CHECK(max_abs(exact.mat() - mc.state.mat()) < 5 * mc.max_entry_stderr + 1e-6);
}

TEST_CASE("environment twirl invariances") {
  Rng rng(33);
  const Vector psi0 = purification({0.6, 0.4}, 2, 2);
  const DensityOperator tw = rp_twirl_exact(psi0, 2, 2, 2);

  // Invariant under a further environment rotation on every copy.
  const Matrix v = haar_unitary(2, rng);
  Matrix big = identity(16);
  Vector probe = Vector::Zero(16);
  Matrix rotated = tw.mat();
  const std::vector<int> dims = {2, 2, 2, 2};
  for (int slot : {1, 3}) {
    const Matrix op = [&] {
      Matrix full = identity(1);
      for (int s = 0; s < 4; ++s) full = kron(full, s == slot ? v : identity(2));
      return full;
    }();
    rotated = op * rotated * op.adjoint();
  }
  CHECK(max_abs(rotated - tw.mat()) < 1e-9);

  // Invariant under exchanging the two copies (each copy spans two legs).
  const Matrix ex = permute_subsystems(tw.mat(), dims, {2, 3, 0, 1});
  CHECK(max_abs(ex - tw.mat()) < 1e-9);

  // r = 1: no environment freedom, the twirl returns the input itself.
  const Vector pure = haar_pure_ket(2, rng);
  const DensityOperator fixed = rp_twirl_exact(pure, 2, 1, 2);
  const Vector prod = kron_pow_vec(pure, 2);
  CHECK(max_abs(fixed.mat() - prod * prod.adjoint()) < 1e-10);
}

TEST_CASE("purify and clone achieves the one site bound") {
  Rng rng(34);
  // Pure input, trivial environment: the protocol reduces to optimal cloning.
  {
    const RpSpec spec{1, 2, 2, 1};
    const Vector psi = haar_pure_ket(2, rng);
    const DensityOperator rho = DensityOperator::pure(psi, {2});
    const DensityOperator out = purify_and_clone_output(spec, rho);
    const double target = f_one_bound(spec).to_double();
    for (int site = 0; site < 2; ++site) {
      const Matrix marg = out.keep({2 * site, 2 * site + 1}).mat();
      CHECK(std::abs(fidelity_pure(psi, marg) - target) < 1e-9);
    }
  }
  // Rank-2 input with a two-level environment. The loss against the random
  // purification is the same for every environment unitary (the cloner is
  // covariant), so it can be measured once at the canonical purification.
  {
    const RpSpec spec{2, 3, 2, 2};
    const double bound = f_one_bound(spec).to_double();
    CHECK(bound == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

    const Vector psi0 = purification({0.7, 0.3}, 2, 2);
    const Matrix iso = schur::sym_isometry(4, 2);
    const Vector in_sym = iso.adjoint() * kron_pow_vec(psi0, 2);
    const Matrix raw = werner_cloner(2, 3, 4).apply_mat(in_sym * in_sym.adjoint());
    const DensityOperator direct(raw, {4, 4, 4});
    for (int site = 0; site < 3; ++site) {
      const double fid = fidelity_pure(psi0, direct.keep({site}).mat());
      CHECK(fid >= bound - 1e-6);
      CHECK(fid == doctest::Approx(bound).epsilon(1e-9));
    }

    // The averaged protocol output has the same per-site system marginal as
    // the canonical clone: tracing the environment kills the twirl unitary.
    const DensityOperator rho = state_with_spectrum({0.7, 0.3});
    const DensityOperator averaged = purify_and_clone_output(spec, rho);
    const Matrix sys_twirled = averaged.keep({0}).mat();
    const Matrix sys_direct = partial_trace(direct.keep({0}).mat(), {2, 2}, {0});
    CHECK(max_abs(sys_twirled - sys_direct) < 1e-9);
  }
}

TEST_CASE("entanglement breaking tomography risk") {
  CHECK(eb_tomography_risk(1, 1, 2, Site::One) == Rat(1, 2));
  CHECK(eb_tomography_risk(3, 5, 2, Site::One) == Rat(1, 4));
  CHECK(eb_tomography_risk(2, 7, 3, Site::One) == Rat(2, 3));
  CHECK(eb_tomography_risk(1, 1, 2, Site::All) == Rat(1, 3));
  CHECK(eb_tomography_risk(2, 2, 2, Site::All) == Rat(1) - Rat(3, 5));
  // Decreasing in the copy budget.
  for (int n = 1; n < 10; ++n)
    CHECK(eb_tomography_risk(n + 1, 3, 2, Site::One).to_double() <
          eb_tomography_risk(n, 3, 2, Site::One).to_double());
}

TEST_CASE("coherent risk beats the entanglement breaking floor") {
  for (int d : {2, 3})
    for (int ell : {1, 2})
      for (int n = 1; n <= 20; ++n) {
        const RpSpec spec{n, n + ell, d, 1};
        const double coherent = 1.0 - f_one_bound(spec).to_double();
        const double eb = eb_tomography_risk(n, n + ell, d, Site::One).to_double();
        CHECK(coherent < eb);
      }
}

TEST_CASE("separation table closed forms") {
  const std::vector<int> ns = {2, 5, 9};
  const auto rows = separation_table(2, 1, 1, ns);
  REQUIRE(rows.size() == ns.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double n = ns[i];
    CHECK(rows[i].n == ns[i]);
    // 1 - f_one at qubit r = 1, m = n + 1 collapses to 1/((n+1)(n+2)).
    CHECK(rows[i].coherent == doctest::Approx(1.0 / ((n + 1) * (n + 2))).epsilon(1e-12));
    CHECK(rows[i].eb == doctest::Approx(1.0 / (n + 1)).epsilon(1e-12));
  }
}

TEST_CASE("separation fit recovers the limiting exponents") {
  const auto rows = separation_table(2, 1, 1, {8, 16, 32, 64});
  const SeparationFit fit = fit_separation_slopes(rows);
  CHECK(std::abs(fit.coherent_slope - (-2.0)) < 0.1);
  CHECK(std::abs(fit.eb_slope - (-1.0)) < 0.05);
  CHECK(fit.coherent_r2 > 0.999);
  CHECK(fit.eb_r2 > 0.999);

  // The corrected fit is exact on an exact power law.
  std::vector<double> xs = {8, 16, 32, 64}, ys;
  for (double x : xs) ys.push_back(3.0 * std::pow(x, -2.0));
  CHECK(power_fit(xs, ys).slope == doctest::Approx(-2.0).epsilon(1e-9));
}
