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

#ifndef BACKDOOR_MIP_BNB_SOLVER_H_
#define BACKDOOR_MIP_BNB_SOLVER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "backdoor_mip/lp_simplex.h"
#include "backdoor_mip/mip_instance.h"

namespace backdoor_mip {

// Branching priority per variable; higher is branched first. This artifact
// only uses levels 0 and 1.
struct PriorityMap {
  std::vector<int> priority;

  bool operator==(const PriorityMap&) const = default;
};

PriorityMap ZeroPriorities(int num_vars);

enum class BnbStatus { kOptimal, kNodeLimit, kTimeLimit, kInfeasible, kUnbounded };

std::string_view BnbStatusToString(BnbStatus status);
std::optional<BnbStatus> BnbStatusFromString(std::string_view name);

enum class PerformanceMeasure { kNodeCount, kWallSeconds };

struct BnbConfig {
  double integrality_tolerance = 1e-6;
  int64_t node_limit = 1'000'000;
  std::optional<double> wall_time_limit;
  PerformanceMeasure measure = PerformanceMeasure::kNodeCount;
  // Keeps one NodeLogEntry per processed node, including the LP values of the
  // integer variables, so branching decisions can be audited afterwards.
  bool record_node_log = false;
  LpOptions lp_options;
};

struct BranchLogEntry {
  int64_t node_id = 0;
  int var = 0;
  double value = 0.0;
};

enum class NodeOutcome { kBranched, kIntegral, kInfeasible, kPruned };

std::string_view NodeOutcomeToString(NodeOutcome outcome);

struct NodeLogEntry {
  int64_t node_id = 0;
  int64_t parent_id = -1;
  int depth = 0;
  NodeOutcome outcome = NodeOutcome::kInfeasible;
  // NaN when the node LP is infeasible.
  double lp_objective = 0.0;
  // Global upper bound after the node was processed.
  double global_bound = 0.0;
  std::optional<double> incumbent;
  int branch_var = -1;
  double branch_value = 0.0;
  // LP values of the integer variables, in integer-set order.
  std::vector<double> integer_values;
};

struct BnbResult {
  BnbStatus status = BnbStatus::kInfeasible;
  std::optional<std::vector<double>> incumbent;
  std::optional<double> objective;
  double best_bound = 0.0;
  int64_t node_count = 0;
  double wall_seconds = 0.0;
  // Node count or wall seconds, per BnbConfig::measure.
  double measure_value = 0.0;
  std::vector<BranchLogEntry> branch_log;
  std::vector<NodeLogEntry> node_log;
};

// Fractional integer variable maximizing (priority, fractionality, -index);
// nullopt when every integer variable is integral within `tolerance`.
std::optional<int> SelectBranchVar(std::span<const double> x, std::span<const int> integer_set,
                                   const PriorityMap& priorities, double tolerance);

// Best-bound branch and bound (ties by lowest node id). Branching tightens the
// selected variable to ceil (up child, created first) and floor (down child).
// No cuts, presolve or primal heuristics, so the node count is a function of
// the branching order alone. Fails on invalid input or when a node LP hits
// its iteration limit.
absl::StatusOr<BnbResult> SolveMip(const MipInstance& instance, const PriorityMap& priorities,
                                   const BnbConfig& config);

// One JSON object per line for every entry of result.node_log.
std::string NodeLogToJsonLines(const BnbResult& result);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_BNB_SOLVER_H_
