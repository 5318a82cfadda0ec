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

#include <functional>
#include <string>

#include "cqi/channel.hpp"
#include "cqi/distances.hpp"

namespace cqi {

// An inference task: i.i.d. copies of an unknown state drawn from a family,
// a target functional of that state, and a bounded loss.
struct CqiTask {
  int n_copies = 1;
  int m_outputs = 1;
  std::vector<int> in_site_dims;   // factor dims of one input copy
  std::vector<int> out_site_dims;  // factor dims of one output site
  std::function<DensityOperator(Rng&)> sample_input;  // draws one copy Sigma
  std::function<DensityOperator(const DensityOperator&)> target_all;   // Gamma(Sigma)
  std::function<DensityOperator(const DensityOperator&)> target_site;  // gamma(Sigma)
  Loss loss = Loss::Infidelity;
};

using Protocol = std::function<DensityOperator(const DensityOperator&)>;

struct RiskReport {
  double value = 0;
  double stderr_ = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
  bool lower_bound_only = false;  // finite-candidate maxima only bound sup from below
  std::string mode;  // "worst-case" | "average"
  std::string site;  // "all-site" | "one-site"
};

// Mean loss over sampled inputs; per-sample streams are split from the seed
// by sample index, so any parallel schedule reproduces the same result.
RiskReport average_risk(const CqiTask& task, const Protocol& proto, long long samples,
                        std::uint64_t seed);
// Mean over samples of the site-averaged one-site loss.
RiskReport one_site_risk(const CqiTask& task, const Protocol& proto,
                         long long samples, std::uint64_t seed);
// Max over the candidate list (a lower bound on the supremum).
RiskReport worst_case_risk(const CqiTask& task, const Protocol& proto,
                           const std::vector<DensityOperator>& candidates,
                           std::uint64_t seed = 0);
// Worst case over candidates of the best (minimum) site marginal loss.
RiskReport worst_case_one_site_risk(const CqiTask& task, const Protocol& proto,
                                    const std::vector<DensityOperator>& candidates,
                                    std::uint64_t seed = 0);

// Permutation-average the channel's identical input or output factors
// (performed at the Choi level).
enum class TwirlSide { In, Out, Both };
Channel exchange_twirl(const Channel& t, TwirlSide side);

// Haar average U^{dag(x)m} T(U^{(x)n} . U^{dag(x)n}) U^{(x)m}: exact via the
// mixed-commutant (partially transposed permutations) Gram projection.
Channel unitary_twirl_exact(const Channel& t, int d, int n, int m);
Channel unitary_twirl_mc(const Channel& t, int d, int n, int m, int samples, Rng& rng);

// Measure-and-prepare channel from a finite POVM and re-preparations.
Channel eb_channel(const Povm& povm, const std::vector<DensityOperator>& preps);

// Covariant measure-and-prepare channel with POVM density
// multiset_dim(d,m) psi^{(x)m} and re-preparation psi, on the compressed
// symmetric input basis. The Choi is computed exactly (the Haar integral of
// conj(psi)^{(x)m} (x) psi is the partially transposed (m+1)-symmetrizer);
// the Monte-Carlo variant exists as a cross-check.
Matrix definetti_mp_choi(int d, int m);
Channel definetti_mp_channel(int d, int m);
Matrix definetti_mp_choi_mc(int d, int m, long long samples, Rng& rng);

// One-site marginal channel of the identity on Sym^m(C^d), compressed input.
Matrix symmetric_identity_site_choi(int d, int m);

// Trace-norm gap between a symmetric channel's Choi (compressed input,
// one-site output) and the covariant measure-and-prepare Choi, with both
// normalized to unit trace (Choi states).
double definetti_gap(const Matrix& choi, int d, int m);

// PPT test on a bipartite operator (partial transpose on the B factor).
bool is_ppt(const Matrix& m, long long da, long long db, double tol = 1e-9);

}  // namespace cqi
