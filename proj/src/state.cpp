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

#include "cqi/state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cqi {

DensityOperator::DensityOperator(Matrix m, std::vector<int> dims)
    : m_(std::move(m)), dims_(std::move(dims)) {
  if (m_.rows() != m_.cols()) throw NumericalError("DensityOperator: not square");
  if (total_dim(dims_) != m_.rows())
    throw NumericalError("DensityOperator: dims do not match matrix size");
  if (!is_hermitian(m_, kHermTol))
    throw NumericalError("DensityOperator: not Hermitian within 1e-10");
  m_ = (m_ + m_.adjoint().eval()) / 2.0;
  double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw NumericalError("DensityOperator: trace deviates from 1 beyond 1e-10");
  m_ /= tr;
  RealVector ev = herm_eigs(m_);
  if (ev.minCoeff() < -kEigTol)
    throw NumericalError("DensityOperator: eigenvalue below -1e-10");
}

DensityOperator DensityOperator::pure(const Vector& psi, std::vector<int> dims) {
  Vector v = psi / psi.norm();
  return DensityOperator(v * v.adjoint(), std::move(dims));
}

DensityOperator DensityOperator::keep(const std::vector<int>& slots) const {
  std::vector<int> kept;
  for (int s : slots) kept.push_back(dims_[s]);
  return DensityOperator(partial_trace(m_, dims_, slots), kept);
}

DensityOperator DensityOperator::reshaped(std::vector<int> dims) const {
  if (total_dim(dims) != m_.rows())
    throw NumericalError("reshaped: dims do not match matrix size");
  return DensityOperator(m_, std::move(dims));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOperator(kron(a.mat(), b.mat()), dims);
}

DensityOperator tensor_power(const DensityOperator& a, int n) {
  DensityOperator out = a;
  for (int i = 1; i < n; ++i) out = tensor(out, a);
  return out;
}

DensityOperator state_with_spectrum(const std::vector<double>& p, const Matrix& basis) {
  const int d = static_cast<int>(p.size());
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    if (p[i] < 0.0) throw NumericalError("state_with_spectrum: negative entry");
    if (i + 1 < d && p[i] < p[i + 1] - 1e-12)
      throw NumericalError("state_with_spectrum: spectrum not sorted descending");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw NumericalError("state_with_spectrum: spectrum does not sum to 1");
  Matrix diag = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = p[i];
  return DensityOperator(basis * diag * basis.adjoint(), {d});
}

DensityOperator state_with_spectrum(const std::vector<double>& p) {
  return state_with_spectrum(p, identity(static_cast<int>(p.size())));
}

DensityOperator haar_pure_state(int d, Rng& rng) {
  return DensityOperator::pure(haar_pure_ket(d, rng), {d});
}

DensityOperator maximally_mixed(int d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d), {d});
}

DensityOperator random_state(int d, Rng& rng) {
  std::vector<double> p(d);
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double e = -std::log(1.0 - rng.uniform());
    p[i] = e;
    s += e;
  }
  for (int i = 0; i < d; ++i) p[i] /= s;
  std::sort(p.begin(), p.end(), std::greater<double>());
  return state_with_spectrum(p, haar_unitary(d, rng));
}

}  // namespace cqi
