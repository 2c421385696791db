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

#include "backdoor_mip/bipartite_graph.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace backdoor_mip {
namespace {

double MaxAbsOrOne(std::span<const double> values) {
  double result = 0.0;
  for (double v : values) result = std::max(result, std::abs(v));
  return result > 0.0 ? result : 1.0;
}

}  // namespace

absl::StatusOr<BipartiteGraph> Encode(const MipInstance& instance, const LpSolution& root_lp,
                                      const CandidateSet& candidate) {
  if (candidate.instance_id != instance.id) {
    return absl::InvalidArgumentError(absl::StrCat("candidate belongs to instance \"",
                                                   candidate.instance_id, "\", not \"",
                                                   instance.id, "\""));
  }
  const int n = instance.num_vars;
  const int m = instance.num_rows();
  if (root_lp.status != LpStatus::kOptimal || static_cast<int>(root_lp.x.size()) != n ||
      static_cast<int>(root_lp.duals.size()) != m) {
    return absl::FailedPreconditionError("root LP solution is not optimal for this instance");
  }

  std::vector<double> rhs(m);
  std::vector<double> coefs;
  for (int r = 0; r < m; ++r) {
    rhs[r] = instance.rows[r].rhs;
    for (const Coefficient& entry : instance.rows[r].coeffs) coefs.push_back(entry.value);
  }
  const double objective_scale = MaxAbsOrOne(instance.objective);
  const double value_scale = std::max(1.0, MaxAbsOrOne(root_lp.x));
  const double rhs_scale = MaxAbsOrOne(rhs);
  const double dual_scale = MaxAbsOrOne(root_lp.duals);
  const double coef_scale = MaxAbsOrOne(coefs);

  BipartiteGraph graph;
  graph.var_features = Matrix(n, kNumVarFeatures);
  for (int i = 0; i < n; ++i) {
    graph.var_features(i, kVarObjective) = instance.objective[i] / objective_scale;
    graph.var_features(i, kVarLpValue) = root_lp.x[i] / value_scale;
    graph.var_features(i, kVarFractionality) = Fractionality(root_lp.x[i]);
    switch (root_lp.basis[i]) {
      case BasisStatus::kBasic:
        graph.var_features(i, kVarBasic) = 1.0;
        break;
      case BasisStatus::kAtLower:
        graph.var_features(i, kVarAtLower) = 1.0;
        break;
      case BasisStatus::kAtUpper:
        graph.var_features(i, kVarAtUpper) = 1.0;
        break;
    }
  }
  for (int var : candidate.vars) {
    if (var < 0 || var >= n) {
      return absl::InvalidArgumentError(absl::StrCat("candidate variable ", var, " out of range"));
    }
  }
  SetBackdoorFlags(graph, candidate.vars);

  graph.cons_features = Matrix(m, kNumConsFeatures);
  for (int r = 0; r < m; ++r) {
    const LinearRow& row = instance.rows[r];
    graph.cons_features(r, kConsRhs) = row.rhs / rhs_scale;
    graph.cons_features(r, kConsDual) = root_lp.duals[r] / dual_scale;
    switch (row.sense) {
      case RowSense::kLessEqual:
        graph.cons_features(r, kConsLessEqual) = 1.0;
        break;
      case RowSense::kGreaterEqual:
        graph.cons_features(r, kConsGreaterEqual) = 1.0;
        break;
      case RowSense::kEqual:
        graph.cons_features(r, kConsEqual) = 1.0;
        break;
    }
    for (const Coefficient& entry : row.coeffs) {
      if (entry.value == 0.0) continue;
      graph.edges.push_back({entry.var, r, entry.value / coef_scale});
    }
  }
  return graph;
}

void SetBackdoorFlags(BipartiteGraph& graph, std::span<const int> vars) {
  for (int i = 0; i < graph.num_vars(); ++i) graph.var_features(i, kVarBackdoor) = 0.0;
  for (int var : vars) graph.var_features(var, kVarBackdoor) = 1.0;
}

std::string GraphToJson(const BipartiteGraph& graph) {
  nlohmann::json root;
  root["feature_schema_version"] = graph.feature_schema_version;
  auto rows_of = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
      rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    }
    return rows;
  };
  root["var_features"] = rows_of(graph.var_features);
  root["cons_features"] = rows_of(graph.cons_features);
  root["edges"] = nlohmann::json::array();
  for (const GraphEdge& e : graph.edges) root["edges"].push_back({e.var, e.cons, e.coef});
  return root.dump();
}

}  // namespace backdoor_mip
