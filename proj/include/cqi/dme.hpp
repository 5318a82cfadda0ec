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

#include <string>
#include <vector>

#include "cqi/state.hpp"

namespace cqi::dme {

// A density-matrix-exponentiation run: simulate e^{-i rho T} from n copies.
struct DmeSpec {
  double t = 1.0;
  int n = 1;
  int d = 2;
  void validate() const;
  // T = 0 mod 2pi makes the target trivial and every lower bound vacuous.
  bool phase_vacuous(double tol = 1e-12) const;
};

// One partial-swap interaction: Tr_2[e^{-i S delta} (sigma (x) rho) e^{i S delta}],
// evaluated in closed form (S^2 = I makes the exponential a rotation).
DensityOperator lmr_step(const DensityOperator& sigma, const DensityOperator& rho,
                         double delta);
// Same interaction when sigma carries a passive reference register:
// sigma lives on data (x) ref and the fresh copy swaps with the data factor.
DensityOperator lmr_step_ref(const DensityOperator& sigma_dr, const DensityOperator& rho,
                             double delta);

// n partial-swap steps of size T/n.
DensityOperator lmr_protocol(const DensityOperator& sigma, const DensityOperator& rho,
                             double t, int n);
DensityOperator lmr_protocol_ref(const DensityOperator& sigma_dr,
                                 const DensityOperator& rho, double t, int n);

// Probe set for channel-error estimation: the maximally entangled data-ref
// state followed by Haar-random pure data-ref states (ref dimension = d).
std::vector<DensityOperator> dme_probes(int d, int probes, std::uint64_t seed);

// Largest trace distance, over the probe set, between the LMR output and
// e^{-i rho T} applied to the data half. A diamond-distance lower bound.
double dme_error(const DensityOperator& rho, double t, int n, int probes,
                 std::uint64_t seed);

// |theta> = sqrt(1 - theta^2)|0> + sum_j theta_j |j>, theta in R^m, d = m+1.
Vector theta_ket(const std::vector<double>& theta);
DensityOperator theta_state(const std::vector<double>& theta);

// gamma_theta = e^{-i T |theta><theta|} |0><0| e^{+i T |theta><theta|}; the
// closed form uses A = 1 + (e^{-iT}-1)(1-theta^2), B = (e^{-iT}-1)sqrt(1-theta^2).
DensityOperator gamma_state(const std::vector<double>& theta, double t);
DensityOperator gamma_state_exp(const std::vector<double>& theta, double t);
Vector gamma_ket(const std::vector<double>& theta, double t);

double a_t_constant(double t);  // sin^2(T/2)/4

struct EmbeddingCheck {
  double lhs = 0;  // 1 - F(gamma_theta, gamma_eta)
  double rhs = 0;  // a_T ||theta - eta||^2
  bool holds = false;
};
EmbeddingCheck embedding_bound_check(const std::vector<double>& theta,
                                     const std::vector<double>& eta, double t,
                                     double r0);

// Largest radius (1e-3 grid, conservative by one step) on which the
// reparameterization G(zeta) = g(|zeta|^2) zeta satisfies A != 0,
// ||G|| <= 1/2 and ||grad G - (1-e^{iT}) I||_inf <= |1-e^{iT}|/2 on a dense
// sample of directions for every parameter count m <= max_m.
double compute_r0(double t, int max_m = 3, int dirs_per_m = 16);

struct IncoherentBound {
  double value = 0;
  bool valid = true;   // eps <= eps_T and T not 0 mod 2pi
  double eps_t = 0;
  std::string note;
};
// c_T d / eps with c_T = sin^2(T/2)/8192; valid for eps <= (a_T/1024) r0^2.
IncoherentBound incoherent_lower_bound(double eps, int d, double t);

// Orthogonal traceless Hermitian basis with Tr(G_a G_b) = 2 delta_ab.
std::vector<Matrix> gell_mann_basis(int d);

// Single-copy basis tomography: n copies split evenly over the d^2-1
// generator eigenbases, estimate by linear inversion, then clip negative
// eigenvalues and renormalize.
DensityOperator pauli_tomography_estimate(const DensityOperator& rho, long long n,
                                          Rng& rng);

// Measure-then-simulate baseline: tomography estimate, then apply
// e^{-i rho_hat T} to the data state (data half if a reference is attached).
DensityOperator incoherent_dme(const DensityOperator& rho, long long n, double t,
                               const DensityOperator& data_sigma, Rng& rng);

// Channel error of the baseline on the shared probe set, averaging the
// output state over `reps` independent tomography draws.
double incoherent_error(const DensityOperator& rho, double t, long long n, int probes,
                        int reps, std::uint64_t seed);

// Minimum discrimination error (1 - D_tr)/2.
double helstrom_error(const DensityOperator& rho0, const DensityOperator& rho1);

}  // namespace cqi::dme
