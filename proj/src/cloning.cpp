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

#include "cqi/cloning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cqi/schur.hpp"
#include "cqi/stats.hpp"

namespace cqi::rp {

void RpSpec::validate() const {
  if (n < 1 || m < 1) throw NumericalError("RpSpec: n, m >= 1 required");
  if (r < 1 || r > d) throw NumericalError("RpSpec: 1 <= r <= d required");
}

Channel werner_cloner(int n, int m, int D) {
  if (m < n || n < 1) throw NumericalError("werner_cloner: m >= n >= 1 required");
  if (int_pow(D, m) > 4096) throw NumericalError("werner_cloner: D^m too large");
  const long long ms_n = schur::multiset_dim(D, n);
  const long long ms_m = schur::multiset_dim(D, m);
  const double scale = std::sqrt(static_cast<double>(ms_n) / static_cast<double>(ms_m));
  Matrix iso_n = schur::sym_isometry(D, n);
  Matrix iso_m = schur::sym_isometry(D, m);
  const long long anc = int_pow(D, m - n);
  const long long dm = int_pow(D, m);

  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(anc));
  for (long long a = 0; a < anc; ++a) {
    Matrix k(dm, ms_n);
    for (long long j = 0; j < ms_n; ++j) {
      // S_m (s_j (x) e_a), applied as iso_m (iso_m^dag v) to avoid a dense projector.
      Vector v = Vector::Zero(dm);
      for (long long x = 0; x < int_pow(D, n); ++x) {
        Cx c = iso_n(x, j);
        if (c != Cx(0)) v(x * anc + a) = c;
      }
      k.col(j) = iso_m * (iso_m.adjoint() * v);
    }
    kraus.push_back(scale * k);
  }
  std::vector<int> in_dims{static_cast<int>(ms_n)};
  std::vector<int> out_dims(static_cast<std::size_t>(m), D);
  return Channel(std::move(kraus), in_dims, out_dims);
}

Vector purification(const std::vector<double>& p, int d, int r) {
  if (static_cast<int>(p.size()) > d) throw NumericalError("purification: spectrum longer than d");
  double tot = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12) throw NumericalError("purification: negative weight");
    if (i + 1 < p.size() && p[i + 1] > p[i] + 1e-12)
      throw NumericalError("purification: spectrum must be sorted descending");
    if (static_cast<int>(i) >= r && p[i] > 1e-12)
      throw NumericalError("purification: rank exceeds r");
    tot += p[i];
  }
  if (std::abs(tot - 1.0) > 1e-9) throw NumericalError("purification: spectrum must sum to 1");
  Vector psi = Vector::Zero(static_cast<long long>(d) * r);
  for (int i = 0; i < std::min<int>(r, static_cast<int>(p.size())); ++i)
    psi(static_cast<long long>(i) * r + i) = std::sqrt(std::max(0.0, p[i]));
  psi /= psi.norm();
  return psi;
}

namespace {

std::vector<int> pair_dims(int d, int r, int copies) {
  std::vector<int> dims;
  dims.reserve(2 * static_cast<std::size_t>(copies));
  for (int i = 0; i < copies; ++i) {
    dims.push_back(d);
    dims.push_back(r);
  }
  return dims;
}

}  // namespace

DensityOperator rp_twirl_exact(const Vector& psi0, int d, int r, int n) {
  if (psi0.size() != static_cast<long long>(d) * r)
    throw NumericalError("rp_twirl_exact: psi0 dimension mismatch");
  if (n > 4 || r > 2) throw NumericalError("rp_twirl_exact: exact mode needs n <= 4, r <= 2");
  Vector big = kron_pow_vec(psi0, n);
  Matrix rho = big * big.adjoint();
  std::vector<int> dims = pair_dims(d, r, n);
  // Group all environment factors in front so the commutant twirl can act on
  // them as one block: new order (e_1..e_n, s_1..s_n).
  std::vector<int> perm(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    perm[i] = 2 * i + 1;       // environments first
    perm[n + i] = 2 * i;       // then systems
  }
  Matrix grouped = permute_subsystems(rho, dims, perm);
  Matrix twirled = schur::commutant_twirl(grouped, r, n, int_pow(d, n));
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  std::vector<int> grouped_dims(static_cast<std::size_t>(n), r);
  grouped_dims.insert(grouped_dims.end(), static_cast<std::size_t>(n), d);
  Matrix back = permute_subsystems(twirled, grouped_dims, inv);
  return DensityOperator(back, dims);
}

McTwirlResult rp_twirl_mc(const Vector& psi0, int d, int r, int n, long long samples,
                          std::uint64_t seed) {
  if (samples <= 0) throw NumericalError("rp_twirl_mc: samples > 0 required");
  const long long dim = int_pow(static_cast<long long>(d) * r, n);
  Matrix mean = Matrix::Zero(dim, dim);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);  // accumulates |entry|^2
  Rng base(seed);
  std::vector<int> dims{d, r};
  for (long long i = 0; i < samples; ++i) {
    Rng stream = base.split(static_cast<std::uint64_t>(i));
    Matrix u = haar_unitary(r, stream);
    Vector one = apply_factor_op(u, psi0, dims, 1);
    Vector big = kron_pow_vec(one, n);
    Matrix term = big * big.adjoint();
    mean += term;
    sq += term.cwiseAbs2().real();
  }
  mean /= static_cast<double>(samples);
  sq /= static_cast<double>(samples);
  double max_se = 0;
  for (long long a = 0; a < dim; ++a)
    for (long long b = 0; b < dim; ++b) {
      double var = std::max(0.0, sq(a, b) - std::norm(mean(a, b)));
      max_se = std::max(max_se, std::sqrt(var / static_cast<double>(samples)));
    }
  return McTwirlResult{DensityOperator(mean, pair_dims(d, r, n)), max_se, samples};
}

DensityOperator purify_and_clone_output(const RpSpec& spec, const DensityOperator& rho) {
  spec.validate();
  if (rho.dim() != spec.d) throw NumericalError("purify_and_clone: state dimension mismatch");
  const int n = spec.n, m = spec.m, d = spec.d, r = spec.r;
  if (int_pow(static_cast<long long>(d) * r, m) > 4096)
    throw NumericalError("purify_and_clone: (d r)^m too large");

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat());
  std::vector<double> p;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
    p.push_back(std::max(0.0, es.eigenvalues()(i)));
  // Purify in the eigenbasis, then rotate the system legs back.
  Vector psi0 = purification(p, d, r);
  Matrix v(d, d);
  for (int i = 0; i < d; ++i) v.col(i) = es.eigenvectors().col(d - 1 - i);
  psi0 = apply_factor_op(v, psi0, {d, r}, 0);

  DensityOperator twirled = rp_twirl_exact(psi0, d, r, n);
  if (m == n) return twirled;
  if (m < n) {
    std::vector<int> keep(2 * static_cast<std::size_t>(m));
    std::iota(keep.begin(), keep.end(), 0);
    return twirled.keep(keep);
  }
  // m > n: clone on the purification dimension d*r. The pairwise fine index
  // (s_i, e_i) coincides with the coarse digit s_i*r + e_i, so no reshuffle
  // is needed before compressing to the symmetric basis.
  const int dr = d * r;
  Matrix iso_n = schur::sym_isometry(dr, n);
  Matrix compressed = iso_n.adjoint() * twirled.mat() * iso_n;
  Channel cloner = werner_cloner(n, m, dr);
  Matrix out = cloner.apply_mat(compressed);
  return DensityOperator(out, pair_dims(d, r, m));
}

Protocol purify_and_clone(const RpSpec& spec) {
  spec.validate();
  return [spec](const DensityOperator& input) {
    std::vector<int> first{0};
    DensityOperator rho = input.keep(first);
    return purify_and_clone_output(spec, rho);
  };
}

Rat f_all_bound(const RpSpec& spec) {
  spec.validate();
  if (spec.n >= spec.m) return Rat(1);
  const long long dr = static_cast<long long>(spec.d) * spec.r;
  return Rat(schur::multiset_dim(static_cast<int>(dr), spec.n),
             schur::multiset_dim(static_cast<int>(dr), spec.m));
}

Rat f_one_bound(const RpSpec& spec) {
  spec.validate();
  if (spec.n >= spec.m) return Rat(1);
  const long long n = spec.n, m = spec.m, dr = static_cast<long long>(spec.d) * spec.r;
  return Rat(n * (m + dr) + m - n, m * (n + dr));
}

Rat eb_tomography_risk(int n, int m, int d, Site site) {
  if (n < 1 || m < 1) throw NumericalError("eb_tomography_risk: n, m >= 1 required");
  if (site == Site::One) return Rat(d - 1, n + 1);
  return Rat(1) - Rat(schur::multiset_dim(d, n), schur::multiset_dim(d, n + m));
}

std::vector<SeparationRow> separation_table(int d, int r, int ell,
                                            const std::vector<int>& ns) {
  std::vector<SeparationRow> rows;
  rows.reserve(ns.size());
  for (int n : ns) {
    RpSpec spec{n, n + ell, d, r};
    SeparationRow row;
    row.n = n;
    row.coherent = (Rat(1) - f_one_bound(spec)).to_double();
    row.eb = Rat(d - 1, n + 1).to_double();
    rows.push_back(row);
  }
  return rows;
}

SeparationFit fit_separation_slopes(const std::vector<SeparationRow>& rows) {
  std::vector<double> ns, coh, eb;
  for (const auto& row : rows) {
    ns.push_back(static_cast<double>(row.n));
    coh.push_back(row.coherent);
    eb.push_back(row.eb);
  }
  SeparationFit fit;
  const PowerFit pc = power_fit(ns, coh);
  const PowerFit pe = power_fit(ns, eb);
  fit.coherent_slope = pc.slope;
  fit.eb_slope = pe.slope;
  fit.coherent_r2 = pc.r2;
  fit.eb_r2 = pe.r2;
  return fit;
}

}  // namespace cqi::rp
