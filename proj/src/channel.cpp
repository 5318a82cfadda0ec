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

#include "cqi/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace cqi {

Channel::Channel(std::vector<Matrix> kraus, std::vector<int> in_dims,
                 std::vector<int> out_dims)
    : kraus_(std::move(kraus)), in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)) {
  if (kraus_.empty()) throw NumericalError("Channel: empty Kraus list");
  const long long di = total_dim(in_dims_), d_out_t = total_dim(out_dims_);
  Matrix acc = Matrix::Zero(di, di);
  for (const Matrix& k : kraus_) {
    if (k.rows() != d_out_t || k.cols() != di)
      throw NumericalError("Channel: Kraus operator has wrong shape");
    acc += k.adjoint() * k;
  }
  if (max_abs(acc - Matrix::Identity(di, di)) > kTpTol)
    throw NumericalError("Channel: not trace-preserving within 1e-9");
}

Matrix Channel::apply_mat(const Matrix& x) const {
  Matrix out = Matrix::Zero(dout(), dout());
  for (const Matrix& k : kraus_) out += k * x * k.adjoint();
  return out;
}

DensityOperator Channel::apply(const DensityOperator& x) const {
  return DensityOperator(apply_mat(x.mat()), out_dims_);
}

const Matrix& Channel::choi() const {
  if (!choi_) choi_ = kraus_to_choi(kraus_);
  return *choi_;
}

Matrix kraus_to_choi(const std::vector<Matrix>& kraus) {
  const long long di = kraus[0].cols(), d_out_t = kraus[0].rows();
  Matrix choi = Matrix::Zero(di * d_out_t, di * d_out_t);
  // C = sum_k w_k w_k^dag with w_k = sum_i |i> (x) K|i>, i.e. w_k(i*do+b) = K_k(b,i).
  for (const Matrix& k : kraus) {
    Vector w(di * d_out_t);
    for (long long i = 0; i < di; ++i)
      for (long long b = 0; b < d_out_t; ++b) w(i * d_out_t + b) = k(b, i);
    choi += w * w.adjoint();
  }
  return choi;
}

std::vector<Matrix> choi_to_kraus(const Matrix& choi, long long din, long long dout,
                                  double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((choi + choi.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalError("choi_to_kraus: eigensolver failed");
  std::vector<Matrix> kraus;
  for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) {
    double lam = es.eigenvalues()(a);
    if (lam < -tol) throw NumericalError("choi_to_kraus: Choi not PSD within tolerance");
    if (lam <= tol) continue;
    Vector w = std::sqrt(lam) * es.eigenvectors().col(a);
    Matrix k(dout, din);
    for (long long i = 0; i < din; ++i)
      for (long long b = 0; b < dout; ++b) k(b, i) = w(i * dout + b);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) throw NumericalError("choi_to_kraus: zero Choi");
  return kraus;
}

Channel channel_from_choi(const Matrix& choi, std::vector<int> in_dims,
                          std::vector<int> out_dims, double tol) {
  long long di = total_dim(in_dims), d_out_t = total_dim(out_dims);
  return Channel(choi_to_kraus(choi, di, d_out_t, tol), std::move(in_dims), std::move(out_dims));
}

void validate_choi(const Matrix& choi, long long din, long long dout, double tol) {
  if (choi.rows() != din * dout) throw NumericalError("validate_choi: size mismatch");
  if (!is_hermitian(choi, tol)) throw NumericalError("validate_choi: not Hermitian");
  if (herm_eigs(choi).minCoeff() < -tol)
    throw NumericalError("validate_choi: not PSD within tolerance");
  // Input marginal: Tr_out C = I_in.
  Matrix marg = partial_trace(choi, {static_cast<int>(din), static_cast<int>(dout)}, {0});
  if (max_abs(marg - Matrix::Identity(din, din)) > tol)
    throw NumericalError("validate_choi: input marginal differs from identity");
}

Channel identity_channel(std::vector<int> dims) {
  long long d = total_dim(dims);
  return Channel({Matrix::Identity(d, d)}, dims, dims);
}

Channel compose(const Channel& second, const Channel& first) {
  if (second.din() != first.dout()) throw NumericalError("compose: dimension mismatch");
  std::vector<Matrix> kraus;
  for (const Matrix& a : second.kraus())
    for (const Matrix& b : first.kraus()) kraus.push_back(a * b);
  return Channel(std::move(kraus), first.in_dims(), second.out_dims());
}

Channel mix(const std::vector<Channel>& parts, const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw NumericalError("mix: bad arguments");
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (weights[i] < 0) throw NumericalError("mix: negative weight");
    double s = std::sqrt(weights[i]);
    for (const Matrix& k : parts[i].kraus()) kraus.push_back(s * k);
  }
  return Channel(std::move(kraus), parts[0].in_dims(), parts[0].out_dims());
}

Channel tensor(const Channel& a, const Channel& b) {
  std::vector<Matrix> kraus;
  for (const Matrix& ka : a.kraus())
    for (const Matrix& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  std::vector<int> in = a.in_dims(), out = a.out_dims();
  in.insert(in.end(), b.in_dims().begin(), b.in_dims().end());
  out.insert(out.end(), b.out_dims().begin(), b.out_dims().end());
  return Channel(std::move(kraus), std::move(in), std::move(out));
}

Channel unitary_channel(const Matrix& u, std::vector<int> dims) {
  return Channel({u}, dims, dims);
}

Channel depolarizing_channel(int d, double lambda) {
  // (1-lambda) X + lambda Tr(X) I/d via Kraus: sqrt weights over the
  // Heisenberg-Weyl basis would do; simplest is Choi construction.
  Matrix choi = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      // T(|i><j|) = (1-lambda)|i><j| + lambda delta_ij I/d
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          Cx v = 0.0;
          if (b == i && c == j) v += (1.0 - lambda);
          if (i == j && b == c) v += lambda / d;
          choi(i * d + b, j * d + c) = v;
        }
    }
  return channel_from_choi(choi, {d}, {d});
}

Channel random_channel(int din, int dout, int kraus_rank, Rng& rng) {
  // Columns of a Haar unitary give an isometry V: C^din -> C^dout (x) C^rank.
  const int de = dout * kraus_rank;
  if (de < din) throw NumericalError("random_channel: rank too small");
  Matrix u = haar_unitary(de, rng);
  std::vector<Matrix> kraus(kraus_rank, Matrix::Zero(dout, din));
  for (int e = 0; e < kraus_rank; ++e)
    for (int b = 0; b < dout; ++b)
      for (int i = 0; i < din; ++i) kraus[e](b, i) = u(b * kraus_rank + e, i);
  return Channel(std::move(kraus), {din}, {dout});
}

void Povm::validate(double tol) const {
  if (finite()) {
    const long long d = effects[0].rows();
    Matrix acc = Matrix::Zero(d, d);
    for (const Matrix& e : effects) {
      if (!is_hermitian(e, tol)) throw NumericalError("Povm: effect not Hermitian");
      if (herm_eigs(e).minCoeff() < -tol)
        throw NumericalError("Povm: effect not PSD within tolerance");
      acc += e;
    }
    if (max_abs(acc - Matrix::Identity(d, d)) > tol)
      throw NumericalError("Povm: effects do not sum to identity within 1e-9");
  } else if (!continuous) {
    throw NumericalError("Povm: neither finite nor continuous");
  }
}

int sample_outcome(const Povm& povm, const DensityOperator& rho, Rng& rng) {
  if (!povm.finite()) throw NumericalError("sample_outcome: finite POVM required");
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < povm.effects.size(); ++i) {
    acc += (povm.effects[i] * rho.mat()).trace().real();
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(povm.effects.size()) - 1;
}

}  // namespace cqi
