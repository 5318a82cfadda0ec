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
#include <optional>
#include <vector>

#include "cqi/state.hpp"

namespace cqi {

// CPTP map in Kraus form. Trace preservation (sum K^dag K = I within 1e-9) is
// validated at construction. The Choi matrix follows the convention
// C = sum_{ij} |i><j| (x) T(|i><j|), so the input marginal Tr_out C = I_in.
class Channel {
 public:
  Channel(std::vector<Matrix> kraus, std::vector<int> in_dims, std::vector<int> out_dims);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  const std::vector<int>& in_dims() const { return in_dims_; }
  const std::vector<int>& out_dims() const { return out_dims_; }
  long long din() const { return total_dim(in_dims_); }
  long long dout() const { return total_dim(out_dims_); }

  Matrix apply_mat(const Matrix& x) const;
  DensityOperator apply(const DensityOperator& x) const;
  const Matrix& choi() const;  // cached

  static constexpr double kTpTol = 1e-9;

 private:
  std::vector<Matrix> kraus_;
  std::vector<int> in_dims_, out_dims_;
  mutable std::optional<Matrix> choi_;
};

Matrix kraus_to_choi(const std::vector<Matrix>& kraus);
// Eigendecomposition of the Choi; eigenvalues below tol are dropped,
// below -tol rejected.
std::vector<Matrix> choi_to_kraus(const Matrix& choi, long long din, long long dout,
                                  double tol = 1e-9);
Channel channel_from_choi(const Matrix& choi, std::vector<int> in_dims,
                          std::vector<int> out_dims, double tol = 1e-9);

// Validation helper: PSD within tol and input marginal == I within tol.
void validate_choi(const Matrix& choi, long long din, long long dout, double tol = 1e-9);

Channel identity_channel(std::vector<int> dims);
Channel compose(const Channel& second, const Channel& first);
Channel mix(const std::vector<Channel>& parts, const std::vector<double>& weights);
Channel tensor(const Channel& a, const Channel& b);
Channel unitary_channel(const Matrix& u, std::vector<int> dims);
Channel depolarizing_channel(int d, double lambda);

// Haar-random Stinespring isometry with the given Kraus rank.
Channel random_channel(int din, int dout, int kraus_rank, Rng& rng);

// POVM: finite effect list, or a continuous covariant description given by
// a unitary sampler plus an effect density M(U). Finite validation checks
// PSD effects summing to identity within 1e-9; the continuous form is
// validated by Monte-Carlo completeness checks in tests.
struct Povm {
  std::vector<Matrix> effects;
  struct Continuous {
    std::function<Matrix(Rng&)> sample_unitary;
    std::function<Matrix(const Matrix&)> effect_density;
  };
  std::optional<Continuous> continuous;

  bool finite() const { return !effects.empty(); }
  void validate(double tol = 1e-9) const;
};

// Born-rule sampling from a finite POVM.
int sample_outcome(const Povm& povm, const DensityOperator& rho, Rng& rng);

}  // namespace cqi
