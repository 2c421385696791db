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

#ifndef BACKDOOR_MIP_BACKDOOR_H_
#define BACKDOOR_MIP_BACKDOOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "backdoor_mip/bnb_solver.h"
#include "backdoor_mip/lp_simplex.h"
#include "backdoor_mip/mip_instance.h"
#include "backdoor_mip/random.h"

namespace backdoor_mip {

// A proposed pseudo-backdoor: a subset of the integer variables whose
// branching priority is raised.
struct CandidateSet {
  std::string instance_id;
  // Sorted, unique, subset of the instance's integer set.
  std::vector<int> vars;
  uint64_t source_seed = 0;

  bool operator==(const CandidateSet&) const = default;
};

// Added to every fractionality so all-integral roots still sample uniformly.
inline constexpr double kSamplingEpsilon = 1e-6;

// max(1, ceil(size_fraction * num_integer)).
int CandidateSetSize(int num_integer, double size_fraction);

// Draws `k` distinct indices, each draw proportional to the weights of the
// indices not yet taken. Requires positive weights and k <= weights.size().
std::vector<int> WeightedSampleWithoutReplacement(std::span<const double> weights, int k, Rng& rng);

// `count` candidate sets of CandidateSetSize(|I|, size_fraction) variables,
// weighting integer variable i by Fractionality(x_i) + kSamplingEpsilon.
// All sets come from one generator seeded with `seed`; duplicate sets may
// occur.
absl::StatusOr<std::vector<CandidateSet>> SampleCandidates(const MipInstance& instance,
                                                           const LpSolution& root_lp, int count,
                                                           double size_fraction, uint64_t seed);

// Priority 1 on members, 0 elsewhere. Empty or out-of-range sets are
// rejected.
absl::StatusOr<PriorityMap> PrioritiesFrom(const CandidateSet& candidate, int num_vars);

// Candidate file: {"instance_id", "seed", "sets": [[indices]...]}.
std::string WriteCandidates(std::string_view instance_id, uint64_t seed,
                            std::span<const CandidateSet> sets);
absl::StatusOr<std::vector<CandidateSet>> ReadCandidates(std::string_view text);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_BACKDOOR_H_
