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

#include <vector>

#include "cqi/matrix.hpp"

namespace cqi {

// Density operator with declared tensor-factor dimensions. Construction
// validates Hermiticity within 1e-10, eigenvalues >= -1e-10 (values in
// [-1e-10, 0) are treated as 0 by consumers), and unit trace within 1e-10;
// the stored matrix is exactly hermitized and trace-normalized.
class DensityOperator {
 public:
  DensityOperator(Matrix m, std::vector<int> dims);

  static DensityOperator pure(const Vector& psi, std::vector<int> dims);

  const Matrix& mat() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }
  long long dim() const { return m_.rows(); }

  DensityOperator keep(const std::vector<int>& slots) const;
  // Same operator, reinterpreted with a finer/coarser factor structure.
  DensityOperator reshaped(std::vector<int> dims) const;

  static constexpr double kHermTol = 1e-10;
  static constexpr double kEigTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;

 private:
  Matrix m_;
  std::vector<int> dims_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator tensor_power(const DensityOperator& a, int n);

// diag(p) conjugated by basis: p must be sorted descending, nonnegative,
// summing to 1 within 1e-10. basis defaults to identity.
DensityOperator state_with_spectrum(const std::vector<double>& p, const Matrix& basis);
DensityOperator state_with_spectrum(const std::vector<double>& p);

DensityOperator haar_pure_state(int d, Rng& rng);
DensityOperator maximally_mixed(int d);

// Random full-rank state: Haar basis with a Dirichlet-ish spectrum.
DensityOperator random_state(int d, Rng& rng);

}  // namespace cqi
