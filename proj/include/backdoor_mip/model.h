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

#ifndef BACKDOOR_MIP_MODEL_H_
#define BACKDOOR_MIP_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "backdoor_mip/bipartite_graph.h"
#include "backdoor_mip/tensor.h"

namespace backdoor_mip {

struct Hyperparams {
  int hidden = 32;
  int heads = 4;
  int rounds = 2;
  double leaky_slope = 0.2;

  bool operator==(const Hyperparams&) const = default;
};

// One graph attention layer mapping (source states, destination states) to
// new destination states. Weight matrices are stored input-major (in x out).
struct GatParams {
  Matrix weight;          // h x (K*h), shared by source and destination
  Matrix attention;       // K x (2h+1): [source | destination | edge attribute]
  Matrix project_weight;  // (K*h) x h
  Matrix project_bias;    // 1 x h
  Matrix self_weight;     // h x h

  bool operator==(const GatParams&) const = default;
};

// Parameters of one scorer or classifier network. Also used as the gradient
// container (same shapes).
struct ModelParams {
  Hyperparams hyper;
  int feature_schema_version = kFeatureSchemaVersion;

  Matrix embed_var_weight;   // 7 x h
  Matrix embed_var_bias;     // 1 x h
  Matrix embed_cons_weight;  // 5 x h
  Matrix embed_cons_bias;    // 1 x h
  std::vector<GatParams> cons_from_var;  // one per round
  std::vector<GatParams> var_from_cons;  // one per round
  Matrix gate_weight;        // h x 1
  Matrix gate_bias;          // 1 x 1
  Matrix transform_weight;   // h x h
  Matrix transform_bias;     // 1 x h
  Matrix hidden_weight;      // h x h
  Matrix hidden_bias;        // 1 x h
  Matrix out_weight;         // h x 1
  Matrix out_bias;           // 1 x 1

  // Stable (name, tensor) enumeration used by the optimizer and file I/O.
  std::vector<std::pair<std::string, Matrix*>> Tensors();
  std::vector<std::pair<std::string, const Matrix*>> Tensors() const;
  size_t NumParameters() const;

  bool operator==(const ModelParams&) const = default;
};

ModelParams ZeroParams(const Hyperparams& hyper);
// Initial pooling gate bias; sigmoid(-4) is about 0.018.
inline constexpr double kInitialGateBias = -4.0;

// Glorot-uniform weights; zero biases except the pooling gate.
ModelParams InitParams(const Hyperparams& hyper, uint64_t seed);

// a += scale * b, tensor by tensor.
void AddScaled(ModelParams& a, const ModelParams& b, double scale);

// Graph plus destination-grouped edge lists, built once and reused.
struct PreparedGraph {
  BipartiteGraph graph;
  std::vector<int> edge_var;
  std::vector<int> edge_cons;
  std::vector<double> edge_coef;
  // CSR over edge ids, grouped by constraint and by variable.
  std::vector<int> cons_offsets;
  std::vector<int> cons_edges;
  std::vector<int> var_offsets;
  std::vector<int> var_edges;
};

PreparedGraph Prepare(BipartiteGraph graph);

struct GatCache {
  Matrix z_src;                // Ns x K*h
  Matrix z_dst;                // Nd x K*h
  std::vector<double> raw;     // E x K attention logits before LeakyReLU
  std::vector<double> alpha;   // E x K attention weights
  Matrix aggregated;           // Nd x K*h, before ELU
  Matrix heads;                // Nd x K*h, after ELU
};

struct ForwardCache {
  Matrix var_embed_pre;
  Matrix cons_embed_pre;
  // states[0] is the embedding, states[l + 1] the output of round l.
  std::vector<Matrix> var_states;
  std::vector<Matrix> cons_states;
  std::vector<GatCache> cons_layers;
  std::vector<GatCache> var_layers;
  Matrix nodes;                 // (n + m) x h, variables first
  std::vector<double> gate;     // sigmoid outputs, one per node
  Matrix transform;             // tanh outputs
  std::vector<double> pooled;
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  double output = 0.0;
};

// Scalar network output. Requires matching feature schema (not checked).
double Forward(const ModelParams& params, const PreparedGraph& graph, ForwardCache& cache);

// Accumulates d(output)/d(params) * d_output into `grads`.
void Backward(const ModelParams& params, const PreparedGraph& graph, const ForwardCache& cache,
              double d_output, ModelParams& grads);

// Checked entry point: fails on feature schema mismatch.
absl::StatusOr<double> Score(const ModelParams& params, const BipartiteGraph& graph);

// Individual layers, exposed for testing.
void GatForward(const GatParams& layer, const Hyperparams& hyper, const Matrix& src,
                const Matrix& dst, std::span<const int> edge_src, std::span<const int> edge_dst,
                std::span<const double> edge_coef, std::span<const int> dst_offsets,
                std::span<const int> dst_edges, GatCache& cache, Matrix& out);

// Global attention pooling: sum_v sigmoid(gate(h_v)) * tanh(transform(h_v)).
// Fails on an empty node set.
absl::StatusOr<std::vector<double>> AttentionPool(const ModelParams& params, const Matrix& nodes);

// Model weights file.
inline constexpr int kModelFormatVersion = 1;

std::string WriteModel(const ModelParams& params);
// FailedPrecondition on a format or feature schema version mismatch,
// InvalidArgument on malformed content.
absl::StatusOr<ModelParams> ReadModel(std::string_view text);

}  // namespace backdoor_mip

#endif  // BACKDOOR_MIP_MODEL_H_
