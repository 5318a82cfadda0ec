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
#include <map>
#include <vector>

#include "cqi/matrix.hpp"
#include "cqi/rng.hpp"
#include "cqi/schur.hpp"
#include "cqi/state.hpp"

using namespace cqi;
using namespace cqi::schur;

namespace {

long long mat_rank(const Matrix& m, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  long long r = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > tol) ++r;
  return r;
}

Vector singlet() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("partition enumeration and counting") {
  CHECK(partitions_of(4, 4).size() == 5);
  CHECK(partitions_of(4, 2).size() == 3);
  CHECK(partitions_of(0, 3).size() == 1);  // the empty partition
  CHECK(conjugate_partition({3, 1}) == Partition{2, 1, 1});
  CHECK(conjugate_partition({2, 2}) == Partition{2, 2});
}

TEST_CASE("symmetric group dimensions and characters") {
  CHECK(sn_dim({3}) == 1);
  CHECK(sn_dim({1, 1, 1}) == 1);
  CHECK(sn_dim({2, 1}) == 2);
  CHECK(sn_dim({3, 2}) == 5);
  CHECK(conj_class_size(3, {3}) == 2);
  CHECK(conj_class_size(3, {2, 1}) == 3);
  CHECK(conj_class_size(4, {2, 2}) == 3);
  // Trivial irrep: all characters 1. Sign irrep: parity.
  CHECK(sn_character({3}, {2, 1}) == 1);
  CHECK(sn_character({1, 1, 1}, {2, 1}) == -1);
  CHECK(sn_character({1, 1, 1}, {3}) == 1);
  // Standard irrep of S3 at the identity class.
  CHECK(sn_character({2, 1}, {1, 1, 1}) == 2);
  CHECK(sn_character({2, 1}, {2, 1}) == 0);
  CHECK(sn_character({2, 1}, {3}) == -1);
  // Column orthogonality at the identity: sum of squared dims = n!.
  long long total = 0;
  for (const auto& lam : partitions_of(4, 4)) total += sn_dim(lam) * sn_dim(lam);
  CHECK(total == 24);
}

TEST_CASE("multiset and Weyl dimensions") {
  CHECK(multiset_dim(2, 2) == 3);
  CHECK(multiset_dim(3, 0) == 1);
  CHECK(multiset_dim(4, 3) == 20);
  CHECK(multiset_dim(2, 200) == 201);
  CHECK(weyl_dim({5}, 2) == 6);
  CHECK(weyl_dim({1, 1}, 2) == 1);
  CHECK(weyl_dim({2, 1}, 3) == 8);
  CHECK(weyl_dim({2, 1, 1}, 2) == 0);  // too many rows
  // weyl_dim of a single row equals multiset_dim.
  for (int d = 2; d <= 4; ++d)
    for (int n = 0; n <= 5; ++n) CHECK(weyl_dim({n}, d) == multiset_dim(d, n));
}

TEST_CASE("dimension ratio matches Weyl quotient") {
  CHECK(dimension_ratio({3}, 1, 2) == Rat(4, 1));
  CHECK(dimension_ratio({2, 1}, 1, 2) == Rat(2, 1));
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(3));  // 2..4
    const int n = 1 + static_cast<int>(rng.index(6));  // 1..6
    const auto parts = partitions_of(n, d);
    const Partition sigma = parts[rng.index(parts.size())];
    const int k = 1 + static_cast<int>(rng.index(sigma.size()));
    Partition alpha = sigma;
    alpha.erase(alpha.begin() + (k - 1));
    const long long denom = weyl_dim(alpha, d - 1);
    if (denom == 0) continue;
    const Rat ratio = dimension_ratio(sigma, k, d);
    CHECK(ratio == Rat(weyl_dim(sigma, d), denom));
  }
}

TEST_CASE("permutation operators") {
  const Perm swap01 = {1, 0};
  const Matrix s = permutation_operator(swap01, 2);
  Vector v01 = kron_vec(basis_ket(2, 0), basis_ket(2, 1));
  Vector v10 = kron_vec(basis_ket(2, 1), basis_ket(2, 0));
  CHECK(max_abs((s * v01 - v10).eval()) < 1e-14);
  CHECK(perm_cycle_type({1, 2, 0}) == Partition{3});
  CHECK(perm_cycle_type({1, 0, 2}) == Partition{2, 1});
  CHECK(perm_num_cycles({0, 1, 2}) == 3);
  CHECK(all_perms(4).size() == 24);
  // Operators compose like the permutations they represent.
  Rng rng(13);
  const auto perms = all_perms(3);
  const Perm& a = perms[rng.index(perms.size())];
  const Perm& b = perms[rng.index(perms.size())];
  Perm ab(3);
  for (int i = 0; i < 3; ++i) ab[i] = a[b[i]];
  CHECK(max_abs(permutation_operator(a, 2) * permutation_operator(b, 2) -
                permutation_operator(ab, 2)) < 1e-13);
}

TEST_CASE("isotypic projectors") {
  // Fully symmetric component of two qubits has rank 3; with the singlet they
  // resolve the identity.
  const Matrix p_sym = isotypic_projector({2}, 2);
  const Matrix p_anti = isotypic_projector({1, 1}, 2);
  CHECK(mat_rank(p_sym) == multiset_dim(2, 2));
  CHECK(mat_rank(p_anti) == 1);
  CHECK(max_abs(p_sym + p_anti - identity(4)) < 1e-10);
  CHECK(max_abs(p_sym * p_anti) < 1e-10);

  // Three qubits: (3) has rank 4, (2,1) has rank weyl * sn = 2*2 = 4.
  const Matrix p3 = isotypic_projector({3}, 2);
  const Matrix p21 = isotypic_projector({2, 1}, 2);
  CHECK(mat_rank(p3) == 4);
  CHECK(mat_rank(p21) == 4);
  CHECK(max_abs(p3 + p21 - identity(8)) < 1e-10);
  CHECK(max_abs(isotypic_projector({1, 1, 1}, 2)) < 1e-14);

  // Idempotence, hermiticity, completeness and rank counting for d <= 3, n <= 4.
  for (int d = 2; d <= 3; ++d)
    for (int n = 2; n <= 4; ++n) {
      Matrix sum = Matrix::Zero(int_pow(d, n), int_pow(d, n));
      for (const auto& lam : partitions_of(n, n)) {
        const Matrix p = isotypic_projector(lam, d);
        CHECK(max_abs(p * p - p) < 1e-9);
        CHECK(is_hermitian(p, 1e-10));
        if (YoungDiagram{lam}.fits_dim(d))
          CHECK(mat_rank(p) == weyl_dim(lam, d) * sn_dim(lam));
        sum += p;
      }
      CHECK(max_abs(sum - identity(int_pow(d, n))) < 1e-9);
    }
}

TEST_CASE("sector decomposition probabilities") {
  // Product of maximally mixed qubits: P(sym) = 3/4, P(anti) = 1/4.
  const DensityOperator mm2 = tensor_power(maximally_mixed(2), 2);
  const auto sectors = sector_decomposition(mm2.mat(), 2, 2);
  std::map<Partition, double> probs;
  for (const auto& s : sectors) probs[s.lambda] = s.prob;
  CHECK(probs[{2}] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(probs[{1, 1}] == doctest::Approx(0.25).epsilon(1e-10));
  double total = 0;
  for (const auto& s : sectors) total += s.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weak Schur sampling") {
  Rng rng(14);
  // Symmetric product states always land in the one-row sector.
  const DensityOperator sym3 = DensityOperator::pure(
      kron_pow_vec(basis_ket(2, 0), 3), {2, 2, 2});
  for (int trial = 0; trial < 5; ++trial) {
    auto [diagram, post] = schur_sample(sym3, rng);
    CHECK(diagram.rows == Partition{3});
    CHECK(max_abs(post.mat() - sym3.mat()) < 1e-10);
  }
  // The singlet always lands in the antisymmetric sector.
  const DensityOperator anti = DensityOperator::pure(singlet(), {2, 2});
  for (int trial = 0; trial < 5; ++trial) {
    auto [diagram, post] = schur_sample(anti, rng);
    CHECK(diagram.rows == Partition{1, 1});
  }
  // Mixed inputs: empirical frequencies match sector probabilities.
  const DensityOperator mm2 = tensor_power(maximally_mixed(2), 2);
  int sym_count = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    auto [diagram, post] = schur_sample(mm2, rng);
    if (diagram.rows == Partition{2}) ++sym_count;
  }
  CHECK(std::abs(sym_count / static_cast<double>(trials) - 0.75) < 0.05);
}

TEST_CASE("lowest weight vectors") {
  // One-row diagram: all letters d-1.
  const Vector lw3 = lowest_weight_vector({3}, 2);
  CHECK(max_abs((lw3 - kron_pow_vec(basis_ket(2, 1), 3)).eval()) < 1e-12);
  // Antisymmetric two-qubit diagram: the singlet, up to sign.
  const Vector lw11 = lowest_weight_vector({1, 1}, 2);
  const Vector s = singlet();
  CHECK(std::min(max_abs((lw11 - s).eval()), max_abs((lw11 + s).eval())) < 1e-12);
  CHECK(std::abs(lw11.norm() - 1.0) < 1e-12);

  // Torus weight of the lowest-weight vector is the reversed partition.
  for (int d = 2; d <= 3; ++d)
    for (const auto& lam : partitions_of(3, d)) {
      const Vector lw = lowest_weight_vector(lam, d);
      Partition reversed(lam.rbegin(), lam.rend());
      std::vector<int> occupation(d, 0);
      // Every computational component with nonzero amplitude must carry the
      // same occupation vector (reading letters from d-1 downward).
      bool found = false;
      for (int x = 0; x < lw.size(); ++x) {
        if (std::abs(lw(x)) < 1e-12) continue;
        const auto w = weight_of_index(x, d, 3);
        if (!found) {
          occupation = w;
          found = true;
        } else {
          CHECK(w == occupation);
        }
      }
      REQUIRE(found);
      std::vector<int> expected(d, 0);
      for (size_t i = 0; i < lam.size(); ++i) expected[d - 1 - i] = lam[i];
      CHECK(occupation == expected);
    }
}

TEST_CASE("young copy isometry") {
  for (int d = 2; d <= 3; ++d)
    for (const auto& lam : partitions_of(3, d)) {
      const IrrepCopy copy = young_copy(lam, d);
      CHECK(copy.q.cols() == weyl_dim(lam, d));
      CHECK(max_abs(copy.q.adjoint() * copy.q - identity(copy.q.cols())) < 1e-10);
      CHECK(std::abs(copy.lw.norm() - 1.0) < 1e-10);
      // The embedded lowest-weight vector lives in the lambda isotypic block.
      const Matrix proj = isotypic_projector(lam, d);
      const Vector embedded = copy.q * copy.lw;
      CHECK(max_abs((proj * embedded - embedded).eval()) < 1e-9);
    }
}

TEST_CASE("type permutation action") {
  const int d = 2, n = 2;
  CHECK(max_abs(type_permutation_action({0, 1}, d, n) - identity(4)) < 1e-14);
  // Letter swap maps the singlet to minus itself.
  const Matrix swap = type_permutation_action({1, 0}, d, n);
  CHECK(max_abs((swap * singlet() + singlet()).eval()) < 1e-12);
  // Action permutes weight vectors: occupation of sigma.x is sigma applied to
  // the occupation of x.
  const std::vector<int> sigma = {2, 0, 1};
  const Matrix act = type_permutation_action(sigma, 3, 2);
  for (long long x = 0; x < 9; ++x) {
    Vector e = Vector::Zero(9);
    e(x) = 1.0;
    const Vector out = (act * e).eval();
    int y = -1;
    for (int i = 0; i < 9; ++i)
      if (std::abs(out(i)) > 0.5) y = i;
    REQUIRE(y >= 0);
    const auto wx = weight_of_index(x, 3, 2);
    const auto wy = weight_of_index(y, 3, 2);
    for (int c = 0; c < 3; ++c) CHECK(wy[sigma[c]] == wx[c]);
  }
}

TEST_CASE("weight of index") {
  CHECK(weight_of_index(0, 2, 3) == std::vector<int>{3, 0});
  CHECK(weight_of_index(7, 2, 3) == std::vector<int>{0, 3});
  CHECK(weight_of_index(5, 2, 3) == std::vector<int>{1, 2});  // 101 base 2
}

TEST_CASE("commutant twirl") {
  // Invariant operators are fixed points: identity and the swap.
  const Matrix swap = permutation_operator({1, 0}, 2);
  CHECK(max_abs(commutant_twirl(identity(4), 2, 2, 1) - identity(4)) < 1e-9);
  CHECK(max_abs(commutant_twirl(swap, 2, 2, 1) - swap) < 1e-9);

  // n = 1: twirl is trace / r times identity (tensor rest untouched).
  Rng rng(15);
  const Matrix x1 = random_state(2, rng).mat();
  CHECK(max_abs(commutant_twirl(x1, 2, 1, 1) - identity(2) * (x1.trace() / 2.0)) < 1e-9);

  // Monte Carlo agreement: average U (x) U rho (U (x) U)^dag over Haar U.
  const Matrix x = (kron_vec(basis_ket(2, 0), basis_ket(2, 0)) *
                    kron_vec(basis_ket(2, 0), basis_ket(2, 0)).adjoint());
  Matrix avg = Matrix::Zero(4, 4);
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const Matrix u = haar_unitary(2, rng);
    const Matrix uu = kron(u, u);
    avg += uu * x * uu.adjoint();
  }
  avg /= samples;
  CHECK(max_abs(avg - commutant_twirl(x, 2, 2, 1)) < 2e-3);

  // Twirl preserves the trace.
  const Matrix xr = random_state(4, rng).mat();
  CHECK(std::abs((commutant_twirl(xr, 2, 2, 1).trace() - xr.trace())) < 1e-9);
}

TEST_CASE("symmetric subspace isometry and projector") {
  for (int d = 2; d <= 3; ++d)
    for (int m = 1; m <= 3; ++m) {
      const Matrix v = sym_isometry(d, m);
      CHECK(v.rows() == int_pow(d, m));
      CHECK(v.cols() == multiset_dim(d, m));
      CHECK(max_abs(v.adjoint() * v - identity(v.cols())) < 1e-10);
      const Matrix p = sym_projector(d, m);
      CHECK(max_abs(v * v.adjoint() - p) < 1e-10);
      CHECK(max_abs(p - isotypic_projector({m}, d)) < 1e-9);
    }
}
