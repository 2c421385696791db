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

#include "backdoor_mip/backdoor.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace backdoor_mip {

int CandidateSetSize(int num_integer, double size_fraction) {
  // The small offset keeps products like 0.01 * 1000 from rounding up.
  const double raw = std::ceil(size_fraction * num_integer - 1e-9);
  return std::clamp(static_cast<int>(raw), 1, std::max(1, num_integer));
}

std::vector<int> WeightedSampleWithoutReplacement(std::span<const double> weights, int k,
                                                  Rng& rng) {
  std::vector<double> remaining(weights.begin(), weights.end());
  std::vector<int> chosen;
  chosen.reserve(k);
  for (int draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (double w : remaining) total += w;
    const double target = rng.Uniform() * total;
    double cumulative = 0.0;
    int pick = -1;
    for (size_t i = 0; i < remaining.size(); ++i) {
      if (remaining[i] <= 0.0) continue;
      cumulative += remaining[i];
      pick = static_cast<int>(i);
      if (target < cumulative) break;
    }
    chosen.push_back(pick);
    remaining[pick] = 0.0;
  }
  return chosen;
}

absl::StatusOr<std::vector<CandidateSet>> SampleCandidates(const MipInstance& instance,
                                                           const LpSolution& root_lp, int count,
                                                           double size_fraction, uint64_t seed) {
  if (instance.integer_vars.empty()) {
    return absl::FailedPreconditionError("instance has no integer variables to sample from");
  }
  if (root_lp.status != LpStatus::kOptimal ||
      static_cast<int>(root_lp.x.size()) != instance.num_vars) {
    return absl::FailedPreconditionError("root LP solution is not optimal for this instance");
  }
  if (!(size_fraction > 0.0 && size_fraction <= 1.0)) {
    return absl::InvalidArgumentError("size_fraction must lie in (0, 1]");
  }
  if (count < 0) return absl::InvalidArgumentError("count must be non-negative");

  const int num_integer = static_cast<int>(instance.integer_vars.size());
  std::vector<double> weights(num_integer);
  for (int k = 0; k < num_integer; ++k) {
    weights[k] = Fractionality(root_lp.x[instance.integer_vars[k]]) + kSamplingEpsilon;
  }
  const int set_size = CandidateSetSize(num_integer, size_fraction);

  Rng rng(seed);
  std::vector<CandidateSet> sets;
  sets.reserve(count);
  for (int c = 0; c < count; ++c) {
    CandidateSet set;
    set.instance_id = instance.id;
    set.source_seed = seed;
    for (int position : WeightedSampleWithoutReplacement(weights, set_size, rng)) {
      set.vars.push_back(instance.integer_vars[position]);
    }
    std::sort(set.vars.begin(), set.vars.end());
    sets.push_back(std::move(set));
  }
  return sets;
}

absl::StatusOr<PriorityMap> PrioritiesFrom(const CandidateSet& candidate, int num_vars) {
  if (candidate.vars.empty()) return absl::InvalidArgumentError("candidate set is empty");
  PriorityMap map = ZeroPriorities(num_vars);
  for (int var : candidate.vars) {
    if (var < 0 || var >= num_vars) {
      return absl::InvalidArgumentError(absl::StrCat("candidate variable ", var, " out of range"));
    }
    map.priority[var] = 1;
  }
  return map;
}

std::string WriteCandidates(std::string_view instance_id, uint64_t seed,
                            std::span<const CandidateSet> sets) {
  nlohmann::json root;
  root["instance_id"] = std::string(instance_id);
  root["seed"] = seed;
  root["sets"] = nlohmann::json::array();
  for (const CandidateSet& set : sets) root["sets"].push_back(set.vars);
  return root.dump() + "\n";
}

absl::StatusOr<std::vector<CandidateSet>> ReadCandidates(std::string_view text) {
  nlohmann::json root = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    return absl::InvalidArgumentError("candidate file: not a JSON object");
  }
  auto id = root.find("instance_id");
  auto seed = root.find("seed");
  auto sets = root.find("sets");
  if (id == root.end() || !id->is_string() || seed == root.end() ||
      !seed->is_number_unsigned() || sets == root.end() || !sets->is_array()) {
    return absl::InvalidArgumentError("candidate file: expected instance_id, seed and sets");
  }
  std::vector<CandidateSet> result;
  for (size_t s = 0; s < sets->size(); ++s) {
    const auto& entry = (*sets)[s];
    CandidateSet set;
    set.instance_id = id->get<std::string>();
    set.source_seed = seed->get<uint64_t>();
    if (!entry.is_array() || entry.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("candidate file: sets[", s, "] is not a non-empty array"));
    }
    for (const auto& var : entry) {
      if (!var.is_number_integer()) {
        return absl::InvalidArgumentError(absl::StrCat("candidate file: sets[", s, "] has a non-integer entry"));
      }
      set.vars.push_back(var.get<int>());
    }
    if (!std::is_sorted(set.vars.begin(), set.vars.end()) ||
        std::adjacent_find(set.vars.begin(), set.vars.end()) != set.vars.end()) {
      return absl::InvalidArgumentError(absl::StrCat("candidate file: sets[", s, "] is not sorted and unique"));
    }
    result.push_back(std::move(set));
  }
  return result;
}

}  // namespace backdoor_mip
