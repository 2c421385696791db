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

#include "backdoor_mip/bnb_solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace backdoor_mip {
namespace {

struct OpenNode {
  int64_t id = 0;
  int64_t parent_id = -1;
  int depth = 0;
  // Upper bound inherited from the parent LP.
  double bound = kInfinity;
  VariableBounds bounds;
};

// Max-heap on bound; equal bounds pop the lowest id first.
struct WorseNode {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

double Gap(double objective) { return 1e-6 * std::max(1.0, std::abs(objective)); }

nlohmann::json NumberOrNull(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

}  // namespace

PriorityMap ZeroPriorities(int num_vars) { return PriorityMap{std::vector<int>(num_vars, 0)}; }

std::string_view BnbStatusToString(BnbStatus status) {
  switch (status) {
    case BnbStatus::kOptimal:
      return "Optimal";
    case BnbStatus::kNodeLimit:
      return "NodeLimit";
    case BnbStatus::kTimeLimit:
      return "TimeLimit";
    case BnbStatus::kInfeasible:
      return "Infeasible";
    case BnbStatus::kUnbounded:
      return "Unbounded";
  }
  return "?";
}

std::optional<BnbStatus> BnbStatusFromString(std::string_view name) {
  for (BnbStatus status : {BnbStatus::kOptimal, BnbStatus::kNodeLimit, BnbStatus::kTimeLimit,
                           BnbStatus::kInfeasible, BnbStatus::kUnbounded}) {
    if (BnbStatusToString(status) == name) return status;
  }
  return std::nullopt;
}

std::string_view NodeOutcomeToString(NodeOutcome outcome) {
  switch (outcome) {
    case NodeOutcome::kBranched:
      return "branched";
    case NodeOutcome::kIntegral:
      return "integral";
    case NodeOutcome::kInfeasible:
      return "infeasible";
    case NodeOutcome::kPruned:
      return "pruned";
  }
  return "?";
}

std::optional<int> SelectBranchVar(std::span<const double> x, std::span<const int> integer_set,
                                   const PriorityMap& priorities, double tolerance) {
  std::optional<int> best;
  int best_priority = 0;
  double best_fractionality = 0.0;
  for (int var : integer_set) {
    const double fractionality = Fractionality(x[var]);
    if (fractionality <= tolerance) continue;
    const int priority = priorities.priority[var];
    // Integer set is sorted, so strict comparisons keep the lowest index.
    if (!best || priority > best_priority ||
        (priority == best_priority && fractionality > best_fractionality)) {
      best = var;
      best_priority = priority;
      best_fractionality = fractionality;
    }
  }
  return best;
}

absl::StatusOr<BnbResult> SolveMip(const MipInstance& instance, const PriorityMap& priorities,
                                   const BnbConfig& config) {
  if (std::vector<std::string> violations = Validate(instance); !violations.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("invalid instance: ", violations.front()));
  }
  if (static_cast<int>(priorities.priority.size()) != instance.num_vars) {
    return absl::InvalidArgumentError(absl::StrCat("priority map has length ",
                                                   priorities.priority.size(), ", expected ",
                                                   instance.num_vars));
  }
  if (config.node_limit < 1) return absl::InvalidArgumentError("node_limit must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  BnbResult result;
  std::priority_queue<OpenNode, std::vector<OpenNode>, WorseNode> open;
  OpenNode root;
  root.bounds.lower = instance.lower;
  root.bounds.upper = instance.upper;
  open.push(std::move(root));
  int64_t next_id = 1;

  double incumbent_value = -kInfinity;
  // Highest bound among nodes discarded by the incumbent test.
  double pruned_bound = -kInfinity;
  bool unbounded = false;
  bool stopped = false;
  BnbStatus stop_status = BnbStatus::kNodeLimit;

  while (!open.empty()) {
    if (result.node_count >= config.node_limit) {
      stopped = true;
      stop_status = BnbStatus::kNodeLimit;
      break;
    }
    if (config.wall_time_limit && elapsed() >= *config.wall_time_limit) {
      stopped = true;
      stop_status = BnbStatus::kTimeLimit;
      break;
    }
    OpenNode node = open.top();
    open.pop();
    if (result.incumbent && node.bound <= incumbent_value + Gap(incumbent_value)) {
      pruned_bound = std::max(pruned_bound, node.bound);
      continue;
    }

    ++result.node_count;
    LpSolution lp = SolveLp(instance, &node.bounds, config.lp_options);
    if (lp.status == LpStatus::kIterationLimit) {
      return absl::ResourceExhaustedError(
          absl::StrCat("LP iteration limit reached at node ", node.id));
    }

    NodeLogEntry entry;
    entry.node_id = node.id;
    entry.parent_id = node.parent_id;
    entry.depth = node.depth;
    entry.lp_objective = std::numeric_limits<double>::quiet_NaN();

    if (lp.status == LpStatus::kUnbounded) {
      unbounded = true;
      break;
    }
    if (lp.status == LpStatus::kInfeasible) {
      entry.outcome = NodeOutcome::kInfeasible;
    } else {
      entry.lp_objective = lp.objective;
      if (config.record_node_log) {
        entry.integer_values.reserve(instance.integer_vars.size());
        for (int var : instance.integer_vars) entry.integer_values.push_back(lp.x[var]);
      }
      const double node_bound = std::min(node.bound, lp.objective);
      std::optional<int> branch_var =
          SelectBranchVar(lp.x, instance.integer_vars, priorities, config.integrality_tolerance);
      if (result.incumbent && node_bound <= incumbent_value + Gap(incumbent_value)) {
        entry.outcome = NodeOutcome::kPruned;
        pruned_bound = std::max(pruned_bound, node_bound);
      } else if (!branch_var) {
        entry.outcome = NodeOutcome::kIntegral;
        incumbent_value = lp.objective;
        result.incumbent = lp.x;
      } else {
        entry.outcome = NodeOutcome::kBranched;
        const int var = *branch_var;
        const double value = lp.x[var];
        entry.branch_var = var;
        entry.branch_value = value;
        result.branch_log.push_back({node.id, var, value});

        OpenNode up;
        up.id = next_id++;
        up.parent_id = node.id;
        up.depth = node.depth + 1;
        up.bound = node_bound;
        up.bounds = node.bounds;
        up.bounds.lower[var] = std::ceil(value);

        OpenNode down;
        down.id = next_id++;
        down.parent_id = node.id;
        down.depth = node.depth + 1;
        down.bound = node_bound;
        down.bounds = std::move(node.bounds);
        down.bounds.upper[var] = std::floor(value);

        open.push(std::move(up));
        open.push(std::move(down));
      }
    }

    if (config.record_node_log) {
      double global = open.empty() ? -kInfinity : open.top().bound;
      if (result.incumbent) {
        global = std::max(global, incumbent_value);
        entry.incumbent = incumbent_value;
      }
      entry.global_bound = global;
      result.node_log.push_back(std::move(entry));
    }
  }

  result.wall_seconds = elapsed();
  result.measure_value = config.measure == PerformanceMeasure::kNodeCount
                             ? static_cast<double>(result.node_count)
                             : result.wall_seconds;
  if (result.incumbent) result.objective = incumbent_value;

  if (unbounded) {
    result.status = BnbStatus::kUnbounded;
    result.best_bound = kInfinity;
  } else if (stopped) {
    result.status = stop_status;
    result.best_bound = std::max(incumbent_value, open.top().bound);
  } else if (result.incumbent) {
    result.status = BnbStatus::kOptimal;
    result.best_bound = std::max(incumbent_value, pruned_bound);
  } else {
    result.status = BnbStatus::kInfeasible;
    result.best_bound = -kInfinity;
  }
  return result;
}

std::string NodeLogToJsonLines(const BnbResult& result) {
  std::ostringstream out;
  for (const NodeLogEntry& entry : result.node_log) {
    nlohmann::json line = {
        {"node", entry.node_id},
        {"parent", entry.parent_id},
        {"depth", entry.depth},
        {"outcome", std::string(NodeOutcomeToString(entry.outcome))},
        {"lp_objective", NumberOrNull(entry.lp_objective)},
        {"global_bound", NumberOrNull(entry.global_bound)},
        {"incumbent", entry.incumbent ? nlohmann::json(*entry.incumbent) : nlohmann::json(nullptr)},
    };
    if (entry.outcome == NodeOutcome::kBranched) {
      line["branch_var"] = entry.branch_var;
      line["branch_value"] = entry.branch_value;
    }
    if (!entry.integer_values.empty()) line["x"] = entry.integer_values;
    out << line.dump() << '\n';
  }
  return out.str();
}

}  // namespace backdoor_mip
