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

#include "cqi/framework.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cqi/schur.hpp"

namespace cqi {

namespace {

std::vector<int> repeated_dims(const std::vector<int>& site, int count) {
  std::vector<int> dims;
  dims.reserve(site.size() * static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) dims.insert(dims.end(), site.begin(), site.end());
  return dims;
}

DensityOperator site_marginal(const DensityOperator& out, const CqiTask& task, int site) {
  const int s = static_cast<int>(task.out_site_dims.size());
  std::vector<int> keep(s);
  std::iota(keep.begin(), keep.end(), site * s);
  return out.keep(keep);
}

double one_site_average_loss(const CqiTask& task, const DensityOperator& target,
                             const DensityOperator& out) {
  double acc = 0;
  for (int j = 0; j < task.m_outputs; ++j)
    acc += loss_eval(task.loss, target, site_marginal(out, task, j));
  return acc / task.m_outputs;
}

double one_site_best_loss(const CqiTask& task, const DensityOperator& target,
                          const DensityOperator& out) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < task.m_outputs; ++j)
    best = std::min(best, loss_eval(task.loss, target, site_marginal(out, task, j)));
  return best;
}

RiskReport mc_risk(const CqiTask& task, const Protocol& proto, long long samples,
                   std::uint64_t seed, bool site_mode) {
  if (samples <= 0) throw NumericalError("risk estimate needs samples > 0");
  Rng base(seed);
  double sum = 0, sumsq = 0;
  for (long long i = 0; i < samples; ++i) {
    Rng stream = base.split(static_cast<std::uint64_t>(i));
    DensityOperator sigma = task.sample_input(stream);
    DensityOperator input = tensor_power(sigma, task.n_copies);
    DensityOperator out = proto(input);
    double l = site_mode ? one_site_average_loss(task, task.target_site(sigma), out)
                         : loss_eval(task.loss, task.target_all(sigma), out);
    sum += l;
    sumsq += l * l;
  }
  RiskReport rep;
  rep.value = sum / samples;
  double var = std::max(0.0, sumsq / samples - rep.value * rep.value);
  rep.stderr_ = samples > 1 ? std::sqrt(var / (samples - 1)) : 0.0;
  rep.samples = samples;
  rep.seed = seed;
  rep.mode = "average";
  rep.site = site_mode ? "one-site" : "all-site";
  return rep;
}

RiskReport max_risk(const CqiTask& task, const Protocol& proto,
                    const std::vector<DensityOperator>& candidates, std::uint64_t seed,
                    bool site_mode) {
  if (candidates.empty()) throw NumericalError("worst-case risk needs candidates");
  RiskReport rep;
  rep.lower_bound_only = true;
  rep.mode = "worst-case";
  rep.site = site_mode ? "one-site" : "all-site";
  rep.samples = static_cast<long long>(candidates.size());
  rep.seed = seed;
  for (const auto& sigma : candidates) {
    DensityOperator out = proto(tensor_power(sigma, task.n_copies));
    double l = site_mode ? one_site_best_loss(task, task.target_site(sigma), out)
                         : loss_eval(task.loss, task.target_all(sigma), out);
    rep.value = std::max(rep.value, l);
  }
  return rep;
}

}  // namespace

RiskReport average_risk(const CqiTask& task, const Protocol& proto, long long samples,
                        std::uint64_t seed) {
  return mc_risk(task, proto, samples, seed, false);
}

RiskReport one_site_risk(const CqiTask& task, const Protocol& proto,
                         long long samples, std::uint64_t seed) {
  return mc_risk(task, proto, samples, seed, true);
}

RiskReport worst_case_risk(const CqiTask& task, const Protocol& proto,
                           const std::vector<DensityOperator>& candidates,
                           std::uint64_t seed) {
  return max_risk(task, proto, candidates, seed, false);
}

RiskReport worst_case_one_site_risk(const CqiTask& task, const Protocol& proto,
                                    const std::vector<DensityOperator>& candidates,
                                    std::uint64_t seed) {
  return max_risk(task, proto, candidates, seed, true);
}

static Channel exchange_twirl_impl(const Channel& t, bool input_side, bool output_side) {
  const auto check_uniform = [](const std::vector<int>& dims, const char* side) {
    for (int d : dims)
      if (d != dims[0])
        throw NumericalError(std::string("exchange twirl needs equal ") + side + " factors");
  };
  Matrix c = t.choi();
  const long long din = total_dim(t.in_dims());
  const long long dout = total_dim(t.out_dims());

  if (input_side && t.in_dims().size() > 1) {
    check_uniform(t.in_dims(), "input");
    const int n = static_cast<int>(t.in_dims().size());
    const int d = t.in_dims()[0];
    Matrix acc = Matrix::Zero(c.rows(), c.cols());
    auto perms = schur::all_perms(n);
    for (const auto& p : perms) {
      // Choi of T(U_pi . U_pi^dag) is (U_pi^T (x) I) C (U_pi^T (x) I)^dag.
      Matrix w = kron(schur::permutation_operator(p, d).transpose(),
                      identity(dout));
      acc += w * c * w.adjoint();
    }
    c = acc / static_cast<double>(perms.size());
  }
  if (output_side && t.out_dims().size() > 1) {
    check_uniform(t.out_dims(), "output");
    const int n = static_cast<int>(t.out_dims().size());
    const int d = t.out_dims()[0];
    Matrix acc = Matrix::Zero(c.rows(), c.cols());
    auto perms = schur::all_perms(n);
    for (const auto& p : perms) {
      Matrix w = kron(identity(din), schur::permutation_operator(p, d));
      acc += w * c * w.adjoint();
    }
    c = acc / static_cast<double>(perms.size());
  }
  return channel_from_choi(c, t.in_dims(), t.out_dims());
}

Channel exchange_twirl(const Channel& t, TwirlSide side) {
  return exchange_twirl_impl(t, side != TwirlSide::Out, side != TwirlSide::In);
}

Channel unitary_twirl_exact(const Channel& t, int d, int n, int m) {
  const long long din = total_dim(t.in_dims());
  const long long dout = total_dim(t.out_dims());
  if (din != int_pow(d, n) || dout != int_pow(d, m))
    throw NumericalError("unitary twirl: dimension mismatch");
  if (n + m > 5) throw NumericalError("unitary twirl: n+m too large for exact projection");

  // The twirled Choi is the orthogonal projection of the Choi onto the span
  // of partially transposed permutation operators on the n+m factors.
  std::vector<int> dims(static_cast<std::size_t>(n + m), d);
  std::vector<int> out_slots(static_cast<std::size_t>(m));
  std::iota(out_slots.begin(), out_slots.end(), n);
  auto perms = schur::all_perms(n + m);
  std::vector<Matrix> basis;
  basis.reserve(perms.size());
  for (const auto& p : perms)
    basis.push_back(partial_transpose(schur::permutation_operator(p, d), dims, out_slots));

  const std::size_t k = basis.size();
  Eigen::MatrixXd gram(k, k);
  Vector rhs(k);
  const Matrix c = t.choi();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double g = (basis[a].adjoint() * basis[b]).trace().real();
      gram(a, b) = g;
      gram(b, a) = g;
    }
    rhs(a) = (basis[a].adjoint() * c).trace();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const auto& ev = es.eigenvalues();
  const double cutoff = std::max(1e-12 * std::max(ev.maxCoeff(), 1.0), 1e-12);
  Vector coeff = Vector::Zero(k);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) <= cutoff) continue;
    Eigen::VectorXd u = es.eigenvectors().col(i);
    Cx proj = 0;
    for (std::size_t a = 0; a < k; ++a) proj += u(static_cast<Eigen::Index>(a)) * rhs(a);
    for (std::size_t a = 0; a < k; ++a)
      coeff(a) += u(static_cast<Eigen::Index>(a)) * proj / ev(i);
  }
  Matrix twirled = Matrix::Zero(c.rows(), c.cols());
  for (std::size_t a = 0; a < k; ++a) twirled += coeff(a) * basis[a];
  twirled = (twirled + twirled.adjoint()).eval() / 2.0;
  return channel_from_choi(twirled, t.in_dims(), t.out_dims(), 1e-8);
}

Channel unitary_twirl_mc(const Channel& t, int d, int n, int m, int samples, Rng& rng) {
  const Matrix c = t.choi();
  Matrix acc = Matrix::Zero(c.rows(), c.cols());
  for (int s = 0; s < samples; ++s) {
    Matrix u = haar_unitary(d, rng);
    Matrix w = kron(kron_pow(u.transpose(), n), kron_pow(u.adjoint(), m));
    acc += w * c * w.adjoint();
  }
  acc /= static_cast<double>(samples);
  return channel_from_choi(acc, t.in_dims(), t.out_dims(), 1e-6);
}

Channel eb_channel(const Povm& povm, const std::vector<DensityOperator>& preps) {
  if (povm.effects.size() != preps.size())
    throw NumericalError("eb_channel: one re-preparation per POVM effect");
  if (povm.effects.empty()) throw NumericalError("eb_channel: empty POVM");
  const long long din = povm.effects[0].rows();
  const long long dout = preps[0].dim();
  // Kraus set { sqrt(s_a) |a> <b| sqrt(M_i) } over effects i, re-preparation
  // eigenpairs (s_a, |a>), and input basis rows b.
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < povm.effects.size(); ++i) {
    Matrix root = herm_sqrt(povm.effects[i]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(preps[i].mat());
    for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) {
      double s = es.eigenvalues()(a);
      if (s <= 1e-14) continue;
      for (long long b = 0; b < din; ++b) {
        Matrix k = std::sqrt(s) * es.eigenvectors().col(a) * root.row(b);
        kraus.push_back(std::move(k));
      }
    }
  }
  std::vector<int> in_dims{static_cast<int>(din)};
  std::vector<int> out_dims{static_cast<int>(dout)};
  return Channel(std::move(kraus), in_dims, out_dims);
}

Matrix definetti_mp_choi(int d, int m) {
  // Haar integral of conj(psi)^{(x)m} (x) psi equals the transpose over the
  // first m factors of Pi_sym^{(m+1)} / multiset_dim(d, m+1).
  Matrix p = schur::sym_projector(d, m + 1);
  std::vector<int> dims(static_cast<std::size_t>(m + 1), d);
  std::vector<int> first(static_cast<std::size_t>(m));
  std::iota(first.begin(), first.end(), 0);
  Matrix c = partial_transpose(p, dims, first);
  const double scale = static_cast<double>(schur::multiset_dim(d, m)) /
                       static_cast<double>(schur::multiset_dim(d, m + 1));
  c *= scale;
  Matrix iso = schur::sym_isometry(d, m);
  Matrix embed = kron(iso, identity(d));
  return (embed.adjoint() * c * embed).eval();
}

Channel definetti_mp_channel(int d, int m) {
  std::vector<int> in_dims{static_cast<int>(schur::multiset_dim(d, m))};
  std::vector<int> out_dims{d};
  return channel_from_choi(definetti_mp_choi(d, m), in_dims, out_dims, 1e-8);
}

Matrix definetti_mp_choi_mc(int d, int m, long long samples, Rng& rng) {
  const long long ms = schur::multiset_dim(d, m);
  Matrix iso = schur::sym_isometry(d, m);
  Matrix acc = Matrix::Zero(ms * d, ms * d);
  for (long long s = 0; s < samples; ++s) {
    Vector psi = haar_pure_ket(d, rng);
    Vector pm = iso.adjoint() * kron_pow_vec(psi, m);
    Vector w = kron_vec(pm.conjugate(), psi);
    acc.noalias() += w * w.adjoint();
  }
  acc *= static_cast<double>(ms) / static_cast<double>(samples);
  return acc;
}

Matrix symmetric_identity_site_choi(int d, int m) {
  const long long ms = schur::multiset_dim(d, m);
  Matrix iso = schur::sym_isometry(d, m);
  const long long rest = int_pow(d, m - 1);
  Matrix choi = Matrix::Zero(ms * d, ms * d);
  for (long long i = 0; i < ms; ++i)
    for (long long j = 0; j < ms; ++j)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          Cx v = 0;
          for (long long r = 0; r < rest; ++r)
            v += iso(b * rest + r, i) * std::conj(iso(c * rest + r, j));
          choi(i * d + b, j * d + c) = v;
        }
  return choi;
}

double definetti_gap(const Matrix& choi, int d, int m) {
  // Compare the two channels as Choi states (trace normalized to 1); the
  // approximate-separability statement is about the state distance, and the
  // raw operator norm would carry the growing input dimension with it.
  Matrix diff = choi - definetti_mp_choi(d, m);
  const double d_a = static_cast<double>(schur::multiset_dim(d, m));
  return herm_trace_norm((diff + diff.adjoint()).eval() / 2.0) / d_a;
}

bool is_ppt(const Matrix& m, long long da, long long db, double tol) {
  std::vector<int> dims{static_cast<int>(da), static_cast<int>(db)};
  Matrix pt = partial_transpose(m, dims, {1});
  Eigen::SelfAdjointEigenSolver<Matrix> es((pt + pt.adjoint()).eval() / 2.0);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace cqi
