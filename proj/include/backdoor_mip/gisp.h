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

#ifndef BACKDOOR_MIP_GISP_H_
#define BACKDOOR_MIP_GISP_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "backdoor_mip/mip_instance.h"

namespace backdoor_mip {

// Generalized Independent Set Problem on an Erdos-Renyi graph where every
// edge is removable:
//   max  sum_v revenue * x_v - sum_e cost * y_e
//   s.t. x_u + x_v - y_e <= 1   for every edge e = {u, v}
//        x, y binary.
// Variables are ordered x_0..x_{V-1} followed by y_e in lexicographic edge
// order; rows follow the same edge order.
struct GispConfig {
  int num_vertices = 0;
  double edge_probability = 0.0;
  double vertex_revenue = 100.0;
  double edge_cost = 1.0;
  uint64_t seed = 0;
};

absl::Status ValidateGispConfig(const GispConfig& config);

// Named hardness settings: "toy", "easy", "hard". The seed is left at 0.
absl::StatusOr<GispConfig> GispPreset(std::string_view name);

// `id` defaults to a name derived from the configuration.
absl::StatusOr<MipInstance> GenerateGisp(const GispConfig& config, std::string id = "");

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_GISP_H_
