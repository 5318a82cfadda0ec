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
#include <vector>

#include "cqi/state.hpp"

namespace cqi::qpa {

// Spectrum bookkeeping for purity amplification: sorted eigenvalues and the
// gaps D_{k,i} = p_k - p_i around the target eigenindex k (1-based).
struct SpectrumParams {
  std::vector<double> p;
  int k = 1;

  SpectrumParams(std::vector<double> probs, int target);
  int d() const { return static_cast<int>(p.size()); }
  double gap(int i, int j) const;  // p_i - p_j, 1-based indices
  double min_gap() const;          // min_{i != k} |p_k - p_i|
};

// A bound evaluation together with whether its stated hypothesis held and
// whether lower-order terms were dropped.
struct QpaBoundReport {
  std::string name;
  double value = 0;
  bool valid = true;
  bool asymptotic = false;
  std::string note;
};

inline constexpr double kDefaultC = 2304.0;

// Largest root of S = C ln(C S), solved by bisection; S^2 > C S ln(C S)
// holds for every S above it.
double qpa_s0(double c = kDefaultC);

// min{ m/(eps D^2) + C S ln(C S), 135 m/(eps D^2) } with S = sqrt(m/eps)/D^2;
// valid iff S exceeds qpa_s0(C).
QpaBoundReport coherent_sample_upper(double m, double eps, double d_min,
                                     double c = kDefaultC);

// ceil(98 m / (eps D_{1,2}^2)) copies suffice for the top eigenstate.
long long one_gap_upper(double m, double eps, double d12);
// 98 for edge targets (k = 1 or k = d), 135 for interior ones.
long long adjacent_gap_upper(double m, double eps, double d_min, int k, int d);

// (1/(n(1-beta))) sum_j c_j/D_{j,j+1} + 2|J| exp(-(beta sqrt(n) D_min - 4)^2/32);
// cs and adjacent_gaps list the caller-supplied coefficients over the index
// set J. Valid iff 0 < beta < 1 and beta sqrt(n) D_min > 4.
QpaBoundReport relative_gap_loss(double n, double beta,
                                 const std::vector<double>& adjacent_gaps,
                                 const std::vector<double>& cs, double d_min);

// (1 - 8 e^{-n D^2/256}) (d-k) / (2(n+d-k)); valid iff n >= (4/D)(1 + 1/D).
QpaBoundReport eb_one_site_lower(double n, int d, int k, double d_min);

// 1 - (1/n)(sum_{i != k} p_i/D_{k,i}^2 + sum_{i>k} 1/D_{k,i}), first order in 1/n.
QpaBoundReport eb_asymptotic_fidelity(double n, const SpectrumParams& sp);

// (d-k)/(2 eps) - (d-k), lower-order factors dropped.
QpaBoundReport eb_sample_lower(double eps, int d, int k);

// Result of the covariant measure-and-prepare eigenstate protocol.
struct ProtocolEstimate {
  double fidelity = 0;
  double stderr_ = 0;
  double effective_samples = 0;  // importance-sampling ESS, sector-weighted
  long long raw_samples = 0;
  bool ess_ok = true;  // every sector with weight >= 1% reached ESS >= 100
  bool stopped_early = false;  // the stop callback fired before the ESS target

  struct Sector {
    std::vector<int> shape;
    double prob = 0;
    double fidelity = 0;
    double stderr_ = 0;
    double ess = 0;
  };
  std::vector<Sector> sectors;
};

// Covariant-POVM estimate of the fidelity with which the k-th eigenstate of
// rho is re-prepared from n copies. Each Young sector is handled by
// self-normalized importance sampling over Haar unitaries; `samples` is the
// per-sector batch size and batches are added until the weighted ESS reaches
// `min_effective` (0 = single batch). Qubits use the closed-form symmetric
// power weights at any n; other dimensions use the explicit irrep-copy
// realization and require n <= 4, d <= 3. A non-null `should_stop` is polled
// between batches; when it returns true the estimate is returned with
// whatever statistics have accumulated and `stopped_early` set.
ProtocolEstimate eb_covariant_protocol(const DensityOperator& rho, int n, int k,
                                       long long samples, std::uint64_t seed,
                                       double min_effective = 0,
                                       const std::function<bool()>& should_stop = {});

// Closed-form qubit helpers (test oracles for the sampler above).
double qubit_sector_fidelity(int a, int b, double p1, double p2);
double qubit_sector_prob(int a, int b, double p1, double p2);
double qubit_exact_fidelity(double p1, double p2, int n);

// Parameterized pure-state family and the nearest-state projection.
struct StateFamily {
  std::function<DensityOperator(const std::vector<double>&)> at;
  std::vector<std::pair<double, double>> box;  // per-parameter search range
};

struct NearestState {
  DensityOperator state;
  std::vector<double> params;
  double distance = 0;
  bool converged = true;
};

// Trace-distance projection onto the family by grid search plus shrinking
// local refinement; ties resolve to the earliest grid point scanned.
NearestState nearest_state_estimator(const Matrix& sigma, const StateFamily& family,
                                     int grid = 24, int refinements = 6);

StateFamily pure_qubit_family();

}  // namespace cqi::qpa
