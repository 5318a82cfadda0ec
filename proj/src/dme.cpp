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

#include "cqi/dme.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "cqi/distances.hpp"

namespace cqi::dme {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

void DmeSpec::validate() const {
  if (n < 1) throw NumericalError("DmeSpec: n >= 1 required");
  if (d < 2) throw NumericalError("DmeSpec: d >= 2 required");
}

bool DmeSpec::phase_vacuous(double tol) const {
  const double m = std::fmod(std::abs(t), kTwoPi);
  return m <= tol || kTwoPi - m <= tol;
}

namespace {

// Closed-form partial swap on the data factor of sigma (ref may be trivial):
// cos^2(delta) sigma + sin^2(delta) rho (x) Tr_data(sigma)
//   - i cos(delta) sin(delta) [rho (x) I_ref, sigma].
Matrix partial_swap(const Matrix& sigma, const std::vector<int>& dims, const Matrix& rho,
                    double delta) {
  const double c = std::cos(delta), s = std::sin(delta);
  const long long d = rho.rows();
  const long long dref = sigma.rows() / d;
  Matrix rho_ext = dref == 1 ? rho : kron(rho, identity(dref));
  Matrix swapped;
  if (dref == 1) {
    swapped = rho * sigma.trace();
  } else {
    Matrix ref_marginal = partial_trace(sigma, dims, {1});
    swapped = kron(rho, ref_marginal);
  }
  Matrix comm = rho_ext * sigma - sigma * rho_ext;
  return c * c * sigma + s * s * swapped - Cx(0, 1) * c * s * comm;
}

}  // namespace

DensityOperator lmr_step(const DensityOperator& sigma, const DensityOperator& rho,
                         double delta) {
  if (sigma.dim() != rho.dim()) throw NumericalError("lmr_step: dimension mismatch");
  std::vector<int> dims{static_cast<int>(rho.dim())};
  Matrix out = partial_swap(sigma.mat(), dims, rho.mat(), delta);
  return DensityOperator(out, sigma.dims());
}

DensityOperator lmr_step_ref(const DensityOperator& sigma_dr, const DensityOperator& rho,
                             double delta) {
  if (sigma_dr.dims().size() != 2 || sigma_dr.dims()[0] != rho.dim())
    throw NumericalError("lmr_step_ref: sigma must be data (x) ref with matching data dim");
  Matrix out = partial_swap(sigma_dr.mat(), sigma_dr.dims(), rho.mat(), delta);
  return DensityOperator(out, sigma_dr.dims());
}

DensityOperator lmr_protocol(const DensityOperator& sigma, const DensityOperator& rho,
                             double t, int n) {
  if (n < 1) throw NumericalError("lmr_protocol: n >= 1 required");
  DensityOperator out = sigma;
  const double delta = t / n;
  for (int i = 0; i < n; ++i) out = lmr_step(out, rho, delta);
  return out;
}

DensityOperator lmr_protocol_ref(const DensityOperator& sigma_dr,
                                 const DensityOperator& rho, double t, int n) {
  if (n < 1) throw NumericalError("lmr_protocol_ref: n >= 1 required");
  DensityOperator out = sigma_dr;
  const double delta = t / n;
  for (int i = 0; i < n; ++i) out = lmr_step_ref(out, rho, delta);
  return out;
}

std::vector<DensityOperator> dme_probes(int d, int probes, std::uint64_t seed) {
  std::vector<DensityOperator> list;
  Vector bell = Vector::Zero(static_cast<long long>(d) * d);
  for (int i = 0; i < d; ++i) bell(static_cast<long long>(i) * d + i) = 1.0 / std::sqrt(d);
  list.push_back(DensityOperator::pure(bell, {d, d}));
  Rng base(seed);
  for (int i = 0; i < probes; ++i) {
    Rng stream = base.split(static_cast<std::uint64_t>(i));
    list.push_back(DensityOperator::pure(haar_pure_ket(d * d, stream), {d, d}));
  }
  return list;
}

namespace {

DensityOperator apply_unitary_to_data(const Matrix& u, const DensityOperator& probe) {
  Matrix w = kron(u, identity(probe.dims()[1]));
  return DensityOperator(w * probe.mat() * w.adjoint(), probe.dims());
}

}  // namespace

double dme_error(const DensityOperator& rho, double t, int n, int probes,
                 std::uint64_t seed) {
  const int d = static_cast<int>(rho.dim());
  Matrix target_u = herm_exp(rho.mat(), t);
  double worst = 0;
  for (const auto& probe : dme_probes(d, probes, seed)) {
    DensityOperator out = lmr_protocol_ref(probe, rho, t, n);
    DensityOperator want = apply_unitary_to_data(target_u, probe);
    worst = std::max(worst, trace_distance(out, want));
  }
  return worst;
}

Vector theta_ket(const std::vector<double>& theta) {
  double s = 0;
  for (double x : theta) s += x * x;
  if (s > 1.0 + 1e-12) throw NumericalError("theta_ket: ||theta|| must be <= 1");
  s = std::min(s, 1.0);
  Vector v(static_cast<long long>(theta.size()) + 1);
  v(0) = std::sqrt(1.0 - s);
  for (std::size_t j = 0; j < theta.size(); ++j) v(static_cast<long long>(j) + 1) = theta[j];
  return v;
}

DensityOperator theta_state(const std::vector<double>& theta) {
  Vector v = theta_ket(theta);
  return DensityOperator::pure(v, {static_cast<int>(v.size())});
}

Vector gamma_ket(const std::vector<double>& theta, double t) {
  double s = 0;
  for (double x : theta) s += x * x;
  if (s > 1.0 + 1e-12) throw NumericalError("gamma_ket: ||theta|| must be <= 1");
  s = std::min(s, 1.0);
  const Cx q = std::exp(Cx(0, -t)) - 1.0;
  const Cx a = 1.0 + q * (1.0 - s);
  const Cx b = q * std::sqrt(1.0 - s);
  Vector v(static_cast<long long>(theta.size()) + 1);
  v(0) = a;
  for (std::size_t j = 0; j < theta.size(); ++j)
    v(static_cast<long long>(j) + 1) = b * theta[j];
  return v;  // normalized by construction: e^{-iTtheta}|0> has unit norm
}

DensityOperator gamma_state(const std::vector<double>& theta, double t) {
  Vector v = gamma_ket(theta, t);
  return DensityOperator::pure(v, {static_cast<int>(v.size())});
}

DensityOperator gamma_state_exp(const std::vector<double>& theta, double t) {
  Vector v = theta_ket(theta);
  Matrix proj = v * v.adjoint();
  Matrix u = herm_exp(proj, t);
  Vector zero = Vector::Zero(v.size());
  zero(0) = 1;
  Vector out = u * zero;
  return DensityOperator::pure(out, {static_cast<int>(v.size())});
}

double a_t_constant(double t) {
  const double s = std::sin(t / 2);
  return 0.25 * s * s;
}

EmbeddingCheck embedding_bound_check(const std::vector<double>& theta,
                                     const std::vector<double>& eta, double t,
                                     double r0) {
  if (theta.size() != eta.size())
    throw NumericalError("embedding_bound_check: parameter length mismatch");
  double nt = 0, ne = 0, diff = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    nt += theta[i] * theta[i];
    ne += eta[i] * eta[i];
    diff += (theta[i] - eta[i]) * (theta[i] - eta[i]);
  }
  if (std::sqrt(nt) > r0 + 1e-12 || std::sqrt(ne) > r0 + 1e-12)
    throw NumericalError("embedding_bound_check: point outside admissible radius");
  Vector gt = gamma_ket(theta, t);
  Vector ge = gamma_ket(eta, t);
  const double f = std::norm((gt.adjoint() * ge)(0, 0));
  EmbeddingCheck chk;
  chk.lhs = 1.0 - f;
  chk.rhs = a_t_constant(t) * diff;
  chk.holds = chk.lhs >= chk.rhs - 1e-12;
  return chk;
}

namespace {

struct GDerivs {
  Cx g;       // g(s)
  Cx gprime;  // dg/ds
  Cx a;       // A at this s
};

GDerivs g_of_s(double s, double t) {
  const Cx q = std::exp(Cx(0, -t)) - 1.0;
  const double u = std::sqrt(std::max(0.0, 1.0 - s));
  const Cx denom = 1.0 + q * u * u;
  GDerivs gd;
  gd.a = denom;
  gd.g = q * u / denom;
  // dg/du = q(1 - q u^2)/(1 + q u^2)^2, du/ds = -1/(2u).
  gd.gprime = -q * (1.0 - q * u * u) / (denom * denom) / (2.0 * u);
  return gd;
}

bool r0_conditions_hold(const std::vector<double>& zeta, double t) {
  double s = 0;
  for (double x : zeta) s += x * x;
  if (s >= 1.0) return false;
  GDerivs gd = g_of_s(s, t);
  if (std::abs(gd.a) < 1e-9) return false;
  if (std::abs(gd.g) * std::sqrt(s) > 0.5) return false;
  const Cx g0 = 1.0 - std::exp(Cx(0, t));
  const Cx e_diag = gd.g - g0;
  const Cx f = 2.0 * gd.gprime;
  // Max row sum of E = (g - g0) I + 2 g'(s) zeta zeta^T.
  double l1 = 0;
  for (double x : zeta) l1 += std::abs(x);
  double worst = 0;
  for (double x : zeta) {
    const double row = std::abs(e_diag + f * x * x) + std::abs(f) * std::abs(x) * (l1 - std::abs(x));
    worst = std::max(worst, row);
  }
  if (zeta.empty()) worst = std::abs(e_diag);
  return worst <= 0.5 * std::abs(g0);
}

}  // namespace

double compute_r0(double t, int max_m, int dirs_per_m) {
  DmeSpec spec{t, 1, 2};
  if (spec.phase_vacuous())
    throw NumericalError("compute_r0: T is 0 mod 2pi, no admissible radius");
  // Fixed direction set per parameter count: axes, the uniform diagonal, and
  // seeded random unit vectors.
  Rng rng(0x51d0u);
  std::vector<std::vector<double>> dirs;
  for (int m = 1; m <= max_m; ++m) {
    for (int axis = 0; axis < m; ++axis) {
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(axis)] = 1.0;
      dirs.push_back(v);
    }
    dirs.emplace_back(static_cast<std::size_t>(m), 1.0 / std::sqrt(m));
    for (int extra = 0; extra < dirs_per_m; ++extra) {
      std::vector<double> v(static_cast<std::size_t>(m));
      double norm = 0;
      for (auto& x : v) {
        x = rng.normal();
        norm += x * x;
      }
      norm = std::sqrt(norm);
      for (auto& x : v) x /= norm;
      dirs.push_back(v);
    }
  }

  const double step = 1e-3;
  double admissible = 0;
  for (int i = 1; i * step < 1.0; ++i) {
    const double r = i * step;
    bool ok = true;
    for (const auto& dir : dirs) {
      std::vector<double> zeta(dir.size());
      for (std::size_t j = 0; j < dir.size(); ++j) zeta[j] = r * dir[j];
      if (!r0_conditions_hold(zeta, t)) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
    admissible = r;
  }
  if (admissible <= step)
    throw NumericalError("compute_r0: no admissible radius (T too close to 0 mod 2pi)");
  return admissible - step;  // conservative by one grid step
}

IncoherentBound incoherent_lower_bound(double eps, int d, double t) {
  if (!(eps > 0)) throw NumericalError("incoherent_lower_bound: eps > 0 required");
  if (d < 2) throw NumericalError("incoherent_lower_bound: d >= 2 required");
  IncoherentBound rep;
  DmeSpec spec{t, 1, d};
  const double a = a_t_constant(t);
  rep.value = (a / 2048.0) * d / eps;
  if (spec.phase_vacuous()) {
    rep.valid = false;
    rep.eps_t = 0;
    rep.note = "T is 0 mod 2pi: bound vacuous";
    return rep;
  }
  const double r0 = compute_r0(t);
  rep.eps_t = a / 1024.0 * r0 * r0;
  rep.valid = eps <= rep.eps_t;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "c_T=%.6g eps_T=%.6g r0=%.4g", a / 2048.0, rep.eps_t, r0);
  rep.note = buf;
  return rep;
}

std::vector<Matrix> gell_mann_basis(int d) {
  std::vector<Matrix> basis;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = 1;
      sym(k, j) = 1;
      basis.push_back(sym);
      Matrix asym = Matrix::Zero(d, d);
      asym(j, k) = Cx(0, -1);
      asym(k, j) = Cx(0, 1);
      basis.push_back(asym);
    }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    const double norm = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int i = 0; i < l; ++i) diag(i, i) = norm;
    diag(l, l) = -norm * l;
    basis.push_back(diag);
  }
  return basis;
}

DensityOperator pauli_tomography_estimate(const DensityOperator& rho, long long n,
                                          Rng& rng) {
  const int d = static_cast<int>(rho.dim());
  auto basis = gell_mann_basis(d);
  const long long groups = static_cast<long long>(basis.size());
  if (n < static_cast<long long>(d) * d)
    throw NumericalError("pauli_tomography_estimate: need n >= d^2 copies");
  const long long shots = n / groups;

  Matrix est = identity(d) / static_cast<double>(d);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(basis[a]);
    // Born probabilities of the generator's eigenbasis on rho.
    std::vector<double> probs(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      Vector v = es.eigenvectors().col(i);
      probs[static_cast<std::size_t>(i)] =
          std::max(0.0, (v.adjoint() * rho.mat() * v)(0, 0).real());
    }
    double tot = 0;
    for (double p : probs) tot += p;
    double mean = 0;
    for (long long s = 0; s < shots; ++s) {
      double u = rng.uniform() * tot;
      int outcome = d - 1;
      for (int i = 0; i < d; ++i) {
        if (u < probs[static_cast<std::size_t>(i)]) {
          outcome = i;
          break;
        }
        u -= probs[static_cast<std::size_t>(i)];
      }
      mean += es.eigenvalues()(outcome);
    }
    mean /= static_cast<double>(shots);
    est += 0.5 * mean * basis[a];
  }

  // Physical projection: clip negative eigenvalues, renormalize the trace.
  Eigen::SelfAdjointEigenSolver<Matrix> es(est);
  Matrix clipped = Matrix::Zero(d, d);
  double tr = 0;
  for (int i = 0; i < d; ++i) {
    const double ev = std::max(0.0, es.eigenvalues()(i));
    tr += ev;
    clipped += ev * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  if (tr <= 1e-12)
    clipped = identity(d) / static_cast<double>(d);
  else
    clipped /= tr;
  return DensityOperator(clipped, {d});
}

DensityOperator incoherent_dme(const DensityOperator& rho, long long n, double t,
                               const DensityOperator& data_sigma, Rng& rng) {
  DensityOperator est = pauli_tomography_estimate(rho, n, rng);
  Matrix u = herm_exp(est.mat(), t);
  if (data_sigma.dims().size() == 2) {
    return apply_unitary_to_data(u, data_sigma);
  }
  return DensityOperator(u * data_sigma.mat() * u.adjoint(), data_sigma.dims());
}

double incoherent_error(const DensityOperator& rho, double t, long long n, int probes,
                        int reps, std::uint64_t seed) {
  const int d = static_cast<int>(rho.dim());
  Matrix target_u = herm_exp(rho.mat(), t);
  Rng base(seed);
  double worst = 0;
  auto probe_list = dme_probes(d, probes, seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t pi = 0; pi < probe_list.size(); ++pi) {
    const auto& probe = probe_list[pi];
    Matrix avg = Matrix::Zero(probe.mat().rows(), probe.mat().cols());
    for (int rep = 0; rep < reps; ++rep) {
      Rng stream = base.split(pi * 4096 + static_cast<std::uint64_t>(rep));
      avg += incoherent_dme(rho, n, t, probe, stream).mat();
    }
    avg /= static_cast<double>(reps);
    DensityOperator out(avg, probe.dims());
    DensityOperator want = apply_unitary_to_data(target_u, probe);
    worst = std::max(worst, trace_distance(out, want));
  }
  return worst;
}

double helstrom_error(const DensityOperator& rho0, const DensityOperator& rho1) {
  return 0.5 * (1.0 - trace_distance(rho0, rho1));
}

}  // namespace cqi::dme
