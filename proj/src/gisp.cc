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

#include "backdoor_mip/gisp.h"

#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "backdoor_mip/random.h"

namespace backdoor_mip {

absl::Status ValidateGispConfig(const GispConfig& config) {
  if (config.num_vertices < 0) return absl::InvalidArgumentError("num_vertices must be >= 0");
  if (!(config.edge_probability >= 0.0 && config.edge_probability <= 1.0)) {
    return absl::InvalidArgumentError("edge_probability must lie in [0, 1]");
  }
  if (!(config.vertex_revenue > 0.0)) return absl::InvalidArgumentError("vertex_revenue must be > 0");
  if (!(config.edge_cost > 0.0)) return absl::InvalidArgumentError("edge_cost must be > 0");
  return absl::OkStatus();
}

absl::StatusOr<GispConfig> GispPreset(std::string_view name) {
  // Edge cost 50 against revenue 100 keeps root relaxations fractional at
  // these graph sizes; with cost 1 every root LP is already integral.
  GispConfig config;
  config.edge_probability = 0.5;
  config.edge_cost = 50.0;
  if (name == "toy") {
    config.num_vertices = 10;
  } else if (name == "easy") {
    config.num_vertices = 20;
  } else if (name == "hard") {
    config.num_vertices = 25;
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown preset \"", std::string(name), "\""));
  }
  return config;
}

absl::StatusOr<MipInstance> GenerateGisp(const GispConfig& config, std::string id) {
  if (absl::Status status = ValidateGispConfig(config); !status.ok()) return status;
  const int num_vertices = config.num_vertices;

  Rng rng(config.seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < num_vertices; ++u) {
    for (int v = u + 1; v < num_vertices; ++v) {
      if (rng.Uniform() < config.edge_probability) edges.emplace_back(u, v);
    }
  }

  MipInstance instance;
  instance.id = id.empty() ? absl::StrCat("gisp_v", num_vertices, "_p", config.edge_probability,
                                          "_s", config.seed)
                           : std::move(id);
  const int num_edges = static_cast<int>(edges.size());
  instance.num_vars = num_vertices + num_edges;
  instance.objective.assign(num_vertices, config.vertex_revenue);
  instance.objective.resize(instance.num_vars, -config.edge_cost);
  instance.lower.assign(instance.num_vars, 0.0);
  instance.upper.assign(instance.num_vars, 1.0);
  instance.integer_vars.resize(instance.num_vars);
  for (int i = 0; i < instance.num_vars; ++i) instance.integer_vars[i] = i;
  instance.rows.reserve(num_edges);
  for (int e = 0; e < num_edges; ++e) {
    LinearRow row;
    row.coeffs = {{edges[e].first, 1.0}, {edges[e].second, 1.0}, {num_vertices + e, -1.0}};
    row.sense = RowSense::kLessEqual;
    row.rhs = 1.0;
    instance.rows.push_back(std::move(row));
  }
  return instance;
}

}  // namespace backdoor_mip
