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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cqi/rng.hpp"

namespace cqi {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Raised when a numerical contract is violated (non-PSD state, non-TP
// channel, failed convergence, ...). The CLI maps it to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline long long int_pow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron_vec(const Vector& a, const Vector& b);
Vector kron_pow_vec(const Vector& a, int n);
Matrix kron_pow(const Matrix& a, int n);

bool is_hermitian(const Matrix& m, double tol);
double max_abs(const Matrix& m);

Matrix identity(int d);
Vector basis_ket(int d, int i);

// Tensor-factor index helpers. dims lists factor sizes left to right; the
// leftmost factor is the most significant digit of the composite index.
long long total_dim(const std::vector<int>& dims);
void decode_index(long long x, const std::vector<int>& dims, std::vector<int>& digits);
long long encode_index(const std::vector<int>& digits, const std::vector<int>& dims);

// Keep the listed factors (0-based, ascending), trace out the rest.
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims,
                     const std::vector<int>& keep);

// New factor i is old factor perm[i].
Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                          const std::vector<int>& perm);
Vector permute_subsystems_vec(const Vector& v, const std::vector<int>& dims,
                              const std::vector<int>& perm);

// Transpose the listed factors in place (partial transpose).
Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& transposed);

// Apply a single-factor operator U (d x d) to factor `slot` of a vector on
// the tensor space described by dims, without forming U^{(x)...}.
Vector apply_factor_op(const Matrix& u, const Vector& v,
                       const std::vector<int>& dims, int slot);

// exp(-i t H) for Hermitian H via eigendecomposition.
Matrix herm_exp(const Matrix& h, double t);

// Hermitian square root with eigenvalue clamping at -tol.
Matrix herm_sqrt(const Matrix& h, double clamp_tol = 1e-10);

// Haar random d x d unitary: complex Ginibre, QR, R-diagonal phase fix.
Matrix haar_unitary(int d, Rng& rng);
Vector haar_pure_ket(int d, Rng& rng);

// Eigenvalues of a Hermitian matrix, ascending.
RealVector herm_eigs(const Matrix& h);

double trace_norm(const Matrix& m);        // sum of singular values
double herm_trace_norm(const Matrix& m);   // sum |eig|, m Hermitian

}  // namespace cqi
