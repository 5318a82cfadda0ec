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

#include "cqi/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace cqi {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vector kron_pow_vec(const Vector& a, int n) {
  Vector out = Vector::Ones(1);
  for (int i = 0; i < n; ++i) out = kron_vec(out, a);
  return out;
}

Matrix kron_pow(const Matrix& a, int n) {
  Matrix out = Matrix::Ones(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix identity(int d) { return Matrix::Identity(d, d); }

Vector basis_ket(int d, int i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return v;
}

long long total_dim(const std::vector<int>& dims) {
  long long t = 1;
  for (int d : dims) t *= d;
  return t;
}

void decode_index(long long x, const std::vector<int>& dims, std::vector<int>& digits) {
  digits.resize(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(x % dims[i]);
    x /= dims[i];
  }
}

long long encode_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  long long x = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) x = x * dims[i] + digits[i];
  return x;
}

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims,
                     const std::vector<int>& keep) {
  const std::size_t k = dims.size();
  std::vector<bool> kept(k, false);
  for (int s : keep) kept.at(s) = true;
  std::vector<int> keep_dims, drop_dims, keep_slots, drop_slots;
  for (std::size_t i = 0; i < k; ++i) {
    if (kept[i]) { keep_dims.push_back(dims[i]); keep_slots.push_back((int)i); }
    else { drop_dims.push_back(dims[i]); drop_slots.push_back((int)i); }
  }
  const long long dk = total_dim(keep_dims);
  const long long dd = total_dim(drop_dims);
  Matrix out = Matrix::Zero(dk, dk);
  std::vector<int> row(k), col(k), kd(keep_slots.size()), ld(keep_slots.size()),
      dd_digits(drop_slots.size());
  for (long long a = 0; a < dk; ++a) {
    decode_index(a, keep_dims, kd);
    for (long long b = 0; b < dk; ++b) {
      decode_index(b, keep_dims, ld);
      Cx acc = 0.0;
      for (long long t = 0; t < dd; ++t) {
        decode_index(t, drop_dims, dd_digits);
        for (std::size_t i = 0; i < keep_slots.size(); ++i) {
          row[keep_slots[i]] = kd[i];
          col[keep_slots[i]] = ld[i];
        }
        for (std::size_t i = 0; i < drop_slots.size(); ++i) {
          row[drop_slots[i]] = dd_digits[i];
          col[drop_slots[i]] = dd_digits[i];
        }
        acc += m(encode_index(row, dims), encode_index(col, dims));
      }
      out(a, b) = acc;
    }
  }
  return out;
}

Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                          const std::vector<int>& perm) {
  const std::size_t k = dims.size();
  std::vector<int> new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[perm[i]];
  const long long n = total_dim(dims);
  Matrix out(n, n);
  std::vector<long long> map(n);
  std::vector<int> digits(k), nd(k);
  for (long long x = 0; x < n; ++x) {
    decode_index(x, dims, digits);
    for (std::size_t i = 0; i < k; ++i) nd[i] = digits[perm[i]];
    map[x] = encode_index(nd, new_dims);
  }
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

Vector permute_subsystems_vec(const Vector& v, const std::vector<int>& dims,
                              const std::vector<int>& perm) {
  const std::size_t k = dims.size();
  std::vector<int> new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[perm[i]];
  const long long n = total_dim(dims);
  Vector out(n);
  std::vector<int> digits(k), nd(k);
  for (long long x = 0; x < n; ++x) {
    decode_index(x, dims, digits);
    for (std::size_t i = 0; i < k; ++i) nd[i] = digits[perm[i]];
    out(encode_index(nd, new_dims)) = v(x);
  }
  return out;
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& transposed) {
  const std::size_t k = dims.size();
  std::vector<bool> t(k, false);
  for (int s : transposed) t.at(s) = true;
  const long long n = total_dim(dims);
  Matrix out(n, n);
  std::vector<int> r(k), c(k), rr(k), cc(k);
  for (long long i = 0; i < n; ++i) {
    decode_index(i, dims, r);
    for (long long j = 0; j < n; ++j) {
      decode_index(j, dims, c);
      for (std::size_t s = 0; s < k; ++s) {
        rr[s] = t[s] ? c[s] : r[s];
        cc[s] = t[s] ? r[s] : c[s];
      }
      out(encode_index(rr, dims), encode_index(cc, dims)) = m(i, j);
    }
  }
  return out;
}

Vector apply_factor_op(const Matrix& u, const Vector& v,
                       const std::vector<int>& dims, int slot) {
  const int d = dims[slot];
  long long left = 1, right = 1;
  for (int i = 0; i < slot; ++i) left *= dims[i];
  for (std::size_t i = slot + 1; i < dims.size(); ++i) right *= dims[i];
  Vector out = Vector::Zero(v.size());
  for (long long l = 0; l < left; ++l) {
    for (long long r = 0; r < right; ++r) {
      const long long base = l * d * right + r;
      for (int a = 0; a < d; ++a) {
        Cx acc = 0.0;
        for (int b = 0; b < d; ++b) acc += u(a, b) * v(base + b * right);
        out(base + a * right) = acc;
      }
    }
  }
  return out;
}

Matrix herm_exp(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalError("herm_exp: eigensolver failed");
  Vector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    double e = es.eigenvalues()(i);
    phases(i) = Cx(std::cos(e * t), -std::sin(e * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix herm_sqrt(const Matrix& h, double clamp_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalError("herm_sqrt: eigensolver failed");
  RealVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clamp_tol)
      throw NumericalError("herm_sqrt: eigenvalue below -tolerance");
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.cast<Cx>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix haar_unitary(int d, Rng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    Cx rjj = r(j, j);
    double a = std::abs(rjj);
    Cx phase = a > 0 ? rjj / a : Cx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

Vector haar_pure_ket(int d, Rng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  double n = v.norm();
  if (n == 0.0) return basis_ket(d, 0);
  return v / n;
}

RealVector herm_eigs(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw NumericalError("herm_eigs: eigensolver failed");
  return es.eigenvalues();
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double herm_trace_norm(const Matrix& m) {
  RealVector e = herm_eigs(m);
  return e.cwiseAbs().sum();
}

}  // namespace cqi
