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

#include "cqi/channel.hpp"
#include "cqi/framework.hpp"
#include "cqi/rational.hpp"

namespace cqi::rp {

// Random purification and approximate cloning of rank-r mixed states.
struct RpSpec {
  int n = 1;  // input copies
  int m = 1;  // output copies
  int d = 2;  // system dimension
  int r = 1;  // environment (purification) dimension, 1 <= r <= d
  void validate() const;
};

// Optimal symmetric n -> m cloner on dimension D. The channel input is the
// compressed symmetric basis of n factors (dimension multiset_dim(D, n)); the
// output is the full m-factor space. On symmetric inputs it acts as
//   X |-> (multiset_dim(D,n)/multiset_dim(D,m)) S_m (X (x) I^{(x)(m-n)}) S_m.
Channel werner_cloner(int n, int m, int D);

// Haar average over environment unitaries of Psi_U^{(x)n},
// Psi_U = (I_d (x) U) psi0. Exact mode projects onto the environment
// permutation commutant; limited to n <= 4, r <= 2.
DensityOperator rp_twirl_exact(const Vector& psi0, int d, int r, int n);

struct McTwirlResult {
  DensityOperator state;
  double max_entry_stderr = 0;
  long long samples = 0;
};
McTwirlResult rp_twirl_mc(const Vector& psi0, int d, int r, int n, long long samples,
                          std::uint64_t seed);

// Psi_0 = sum_i sqrt(p_i) |i>|i> over the first r environment levels;
// p must be sorted descending with at most r nonzero entries.
Vector purification(const std::vector<double>& p, int d, int r);

// Protocol: from rho^{(x)n} produce m approximate copies of a random
// purification (each output site = system (x) environment of dim d*r).
Protocol purify_and_clone(const RpSpec& spec);
DensityOperator purify_and_clone_output(const RpSpec& spec, const DensityOperator& rho);

// Closed-form optimal fidelities (exact rationals; 1 when n >= m).
Rat f_all_bound(const RpSpec& spec);
Rat f_one_bound(const RpSpec& spec);

enum class Site { All, One };
// Optimal entanglement-breaking (measure-and-prepare) risk for producing m
// copies from n copies of an unknown pure state in dimension d.
Rat eb_tomography_risk(int n, int m, int d, Site site);

struct SeparationRow {
  int n = 0;
  double coherent = 0;  // 1 - f_one_bound at m = n + ell
  double eb = 0;        // (d-1)/(n+1)
};
std::vector<SeparationRow> separation_table(int d, int r, int ell,
                                            const std::vector<int>& ns);

// Asymptotic scaling exponents of the two columns, extracted with a 1/n
// finite-size correction term so moderate grids report the limiting slopes.
struct SeparationFit {
  double coherent_slope = 0;
  double eb_slope = 0;
  double coherent_r2 = 1;
  double eb_r2 = 1;
};
SeparationFit fit_separation_slopes(const std::vector<SeparationRow>& rows);

}  // namespace cqi::rp
