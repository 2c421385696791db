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

#ifndef BACKDOOR_MIP_BIPARTITE_GRAPH_H_
#define BACKDOOR_MIP_BIPARTITE_GRAPH_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "backdoor_mip/backdoor.h"
#include "backdoor_mip/lp_simplex.h"
#include "backdoor_mip/mip_instance.h"
#include "backdoor_mip/tensor.h"

namespace backdoor_mip {

inline constexpr int kFeatureSchemaVersion = 1;

// Variable node feature columns.
enum VarFeature : int {
  kVarObjective = 0,
  kVarLpValue = 1,
  kVarFractionality = 2,
  kVarBasic = 3,
  kVarAtLower = 4,
  kVarAtUpper = 5,
  kVarBackdoor = 6,
  kNumVarFeatures = 7,
};

// Constraint node feature columns.
enum ConsFeature : int {
  kConsRhs = 0,
  kConsDual = 1,
  kConsLessEqual = 2,
  kConsGreaterEqual = 3,
  kConsEqual = 4,
  kNumConsFeatures = 5,
};

struct GraphEdge {
  int var = 0;
  int cons = 0;
  // A_ij divided by the instance-wide max |A_ij|.
  double coef = 0.0;

  bool operator==(const GraphEdge&) const = default;
};

struct BipartiteGraph {
  Matrix var_features;   // n x kNumVarFeatures
  Matrix cons_features;  // m x kNumConsFeatures
  std::vector<GraphEdge> edges;
  int feature_schema_version = kFeatureSchemaVersion;

  int num_vars() const { return var_features.rows(); }
  int num_cons() const { return cons_features.rows(); }

  bool operator==(const BipartiteGraph&) const = default;
};

// Encodes (instance, candidate) with root-LP features. Objective, rhs, dual
// and edge coefficients are divided by the instance-wide max absolute value
// of that quantity (1 when all are zero); LP values by max(1, max |x|).
// Fails when the candidate belongs to another instance or the LP is not
// optimal.
absl::StatusOr<BipartiteGraph> Encode(const MipInstance& instance, const LpSolution& root_lp,
                                      const CandidateSet& candidate);

// Rewrites the backdoor column in place: 1 for `vars`, 0 elsewhere.
void SetBackdoorFlags(BipartiteGraph& graph, std::span<const int> vars);

// Debug dump.
std::string GraphToJson(const BipartiteGraph& graph);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_BIPARTITE_GRAPH_H_
