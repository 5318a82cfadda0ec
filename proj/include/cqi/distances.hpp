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

#include <string>

#include "cqi/state.hpp"

namespace cqi {

// Uhlmann fidelity, squared-overlap convention: for pure states
// F(psi, phi) = |<psi|phi>|^2.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double fidelity_mat(const Matrix& rho, const Matrix& sigma);
// F(|psi>, rho) = <psi|rho|psi>.
double fidelity_pure(const Vector& psi, const Matrix& rho);

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);
double trace_distance_mat(const Matrix& rho, const Matrix& sigma);

// Loss registry. Cross-entropy is deliberately absent: it is unbounded on
// rank-deficient pairs and breaks the bounded-loss continuity arguments.
enum class Loss { Infidelity, TraceDistance, BuresSq };

double loss_eval(Loss loss, const DensityOperator& target, const DensityOperator& out);
std::string loss_name(Loss loss);

}  // namespace cqi
