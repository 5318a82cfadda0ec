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

#include "cqi/distances.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace cqi {

double fidelity_mat(const Matrix& rho, const Matrix& sigma) {
  Matrix sr = herm_sqrt(rho);
  Matrix inner = sr * sigma * sr;
  RealVector ev = herm_eigs(inner);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) acc += std::sqrt(ev(i));
  double f = acc * acc;
  return std::min(f, 1.0 + 1e-9);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  return fidelity_mat(rho.mat(), sigma.mat());
}

double fidelity_pure(const Vector& psi, const Matrix& rho) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double trace_distance_mat(const Matrix& rho, const Matrix& sigma) {
  return 0.5 * herm_trace_norm(rho - sigma);
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  return trace_distance_mat(rho.mat(), sigma.mat());
}

double loss_eval(Loss loss, const DensityOperator& target, const DensityOperator& out) {
  switch (loss) {
    case Loss::Infidelity:
      return std::max(0.0, 1.0 - fidelity(target, out));
    case Loss::TraceDistance:
      return trace_distance(target, out);
    case Loss::BuresSq: {
      double f = fidelity(target, out);
      return 2.0 * (1.0 - std::sqrt(std::max(0.0, std::min(1.0, f))));
    }
  }
  return 0.0;
}

std::string loss_name(Loss loss) {
  switch (loss) {
    case Loss::Infidelity: return "infidelity";
    case Loss::TraceDistance: return "trace_distance";
    case Loss::BuresSq: return "bures_sq";
  }
  return "";
}

}  // namespace cqi
