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

#pragma once

#include <utility>
#include <vector>

#include "cqi/rational.hpp"
#include "cqi/state.hpp"

namespace cqi::schur {

// Weakly decreasing positive parts; the empty vector is the partition of 0.
using Partition = std::vector<int>;

struct YoungDiagram {
  Partition rows;
  int n() const;
  int num_rows() const { return static_cast<int>(rows.size()); }
  bool fits_dim(int d) const { return num_rows() <= d; }
};

std::vector<Partition> partitions_of(int n, int max_rows);
Partition conjugate_partition(const Partition& p);

// Symmetric-group data: exact integer arithmetic throughout.
long long sn_dim(const Partition& lambda);                      // hook lengths
long long conj_class_size(int n, const Partition& cycle_type);  // n!/prod j^m_j m_j!
long long sn_character(const Partition& lambda, const Partition& cycle_type);

// Number of multisets of size n from d letters = dim Sym^n(C^d).
long long multiset_dim(int d, long long n);

// Dimension of the GL(d) irrep with highest weight lambda (padded with 0s).
long long weyl_dim(const Partition& lambda, int d);

// Ratio weyl_dim(sigma, d) / weyl_dim(alpha, d-1) where alpha is sigma with
// row k (1-based) deleted and rows closed up, as an exact rational in the
// row differences of sigma.
Rat dimension_ratio(const Partition& sigma, int k, int d);

// Permutations are 0-based images: p[i] is where slot i goes.
using Perm = std::vector<int>;
std::vector<Perm> all_perms(int n);
Partition perm_cycle_type(const Perm& p);
int perm_num_cycles(const Perm& p);
Matrix permutation_operator(const Perm& p, int d);

// Isotypic (Young) projector onto the lambda component of (C^d)^{(x)n}.
// Returns the zero matrix when lambda has more than d rows.
Matrix isotypic_projector(const Partition& lambda, int d);

struct Sector {
  Partition lambda;
  double prob;
  Matrix projector;
};
std::vector<Sector> sector_decomposition(const Matrix& state, int d, int n);

// Weak Schur sampling: sector label + renormalized post-measurement state.
std::pair<YoungDiagram, DensityOperator> schur_sample(const DensityOperator& sigma,
                                                      Rng& rng);

// Normalized lowest-weight vector of one GL(d) irrep copy inside the lambda
// isotypic component: Young symmetrizer of the canonical tableau applied to
// the computational tensor whose row-i cells carry letter d-1-i (0-based),
// so the occupation is the reversed partition.
Vector lowest_weight_vector(const Partition& lambda, int d);

// Single irrep copy realized as the image of the Young symmetrizer.
struct IrrepCopy {
  Partition lambda;
  int d = 0;
  int n = 0;
  Matrix q;   // d^n x D isometry onto the copy
  Vector lw;  // lowest-weight vector in copy coordinates
};
IrrepCopy young_copy(const Partition& lambda, int d);

// sigma acts on letters: P_sigma^{(x)n} with (P_sigma)_{sigma(i),i} = 1.
Matrix type_permutation_action(const std::vector<int>& sigma, int d, int n);

// Occupation (type) of a computational basis index.
std::vector<int> weight_of_index(long long x, int d, int n);

// Haar average over U(r) of (U^{(x)n} (x) I_rest) X (.)^dag, computed as the
// Hilbert-Schmidt projection onto span{U_pi (x) B(rest)} via the Gram system
// <U_pi, U_tau> = r^{cycles(pi^-1 tau)}; pseudo-inverse when r < n.
Matrix commutant_twirl(const Matrix& x, int r, int n, long long rest_dim);

// Symmetric subspace: isometry (multiset basis, lexicographic) and projector.
Matrix sym_isometry(int d, int m);
Matrix sym_projector(int d, int m);

}  // namespace cqi::schur
