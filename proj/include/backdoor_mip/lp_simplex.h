// Copyright 2026 The backdoor-mip Authors
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

#ifndef BACKDOOR_MIP_LP_SIMPLEX_H_
#define BACKDOOR_MIP_LP_SIMPLEX_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "backdoor_mip/mip_instance.h"

namespace backdoor_mip {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view LpStatusToString(LpStatus status);

// Free nonbasic variables (both bounds infinite) sit at zero and are reported
// as kAtLower.
enum class BasisStatus { kBasic, kAtLower, kAtUpper };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  // Structural values, one per variable.
  std::vector<double> x;
  // Row duals. For a maximization problem at optimality, <= rows have
  // nonnegative duals, >= rows nonpositive, = rows free.
  std::vector<double> duals;
  std::vector<BasisStatus> basis;
  double objective = 0.0;
  int64_t iterations = 0;
};

// Per-variable bounds replacing the instance bounds (intersected with them).
struct VariableBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct LpOptions {
  int64_t iteration_limit = 1'000'000;
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  // Basis inverse is recomputed from scratch after this many updates.
  int refactorization_interval = 64;
};

// Bounded-variable primal simplex on the LP relaxation of `instance`.
// Phase one uses one artificial per initially violated row; Dantzig pricing
// switches permanently to Bland's rule after 10 * (n + m) consecutive
// degenerate pivots. Deterministic for identical inputs.
LpSolution SolveLp(const MipInstance& instance, const VariableBounds* overrides = nullptr,
                   const LpOptions& options = {});

// Distance to the nearest integer, in [0, 0.5].
double Fractionality(double value);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_LP_SIMPLEX_H_
